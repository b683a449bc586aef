"""Conformal metrics ``g = exp(-2f)|dz|^2`` on flat charts and the Ricci condition.

The Ricci condition on the Gaussian curvature ``K`` reads

    K * Lap_g(K) + g(dK, dK) + 4 K**3 = 0,

with ``Lap_g = exp(2f) * laplacian_flat`` the (positive) Laplace-Beltrami
operator of ``g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analytic import Chart, GridField, gradient, laplacian_flat
from .errors import PreconditionError


@dataclass(frozen=True, eq=False)
class ConformalMetric:
    """Metric ``exp(-2f)|dz|^2`` with the log-factor ``f`` sampled on a chart.

    ``f = log_factor + log_offset``: keeping an exact constant out of the
    samples avoids rounding the varying part to the spacing of the constant,
    which the third derivatives in the Ricci residual would amplify.
    ``closed_form`` (``z -> f(z) - log_offset``), when present, is what
    ``log_factor`` was sampled from and is used for off-grid evaluation and
    refinement.
    """

    log_factor: GridField
    closed_form: Callable | None = None
    name: str = ""
    log_offset: float = 0.0

    @classmethod
    def from_log_factor(cls, fn, chart: Chart, name: str = "", log_offset: float = 0.0) -> "ConformalMetric":
        return cls(chart.sample(lambda z: np.real(fn(z))), fn, name, float(log_offset))

    @property
    def f_values(self) -> np.ndarray:
        """Full log-factor samples ``f``."""
        return self.log_factor.values + self.log_offset

    def e2f(self) -> np.ndarray:
        return np.exp(2 * self.f_values)

    @classmethod
    def from_factor(cls, factor, chart: Chart, name: str = "") -> "ConformalMetric":
        """Metric ``factor(z)**2 |dz|^2`` from the length factor ``exp(-f)``."""
        fn = lambda z: -np.log(np.real(factor(z)))
        with np.errstate(divide="ignore", invalid="ignore"):
            g = cls.from_log_factor(fn, chart, name)
        bad = ~np.isfinite(g.log_factor.values)
        if np.any(bad):
            pts = g.log_factor.z[bad][:5]
            raise PreconditionError(
                f"conformal factor not positive at {int(bad.sum())} node(s), e.g. {pts}",
                violations=int(bad.sum()),
            )
        return g

    @property
    def rect(self):
        return self.log_factor.rect

    @property
    def chart(self) -> Chart:
        return Chart(self.rect, self.log_factor.nx - 1)

    def conformal_factor(self, z):
        """Length factor ``exp(-f)`` at arbitrary points (needs the closed form)."""
        if self.closed_form is None:
            raise ValueError("metric has no closed form")
        return np.exp(-np.real(self.closed_form(np.asarray(z, dtype=complex))) - self.log_offset)

    def refined(self, res: int) -> "ConformalMetric":
        if self.closed_form is None:
            raise ValueError("only closed-form metrics can be resampled")
        return ConformalMetric.from_log_factor(self.closed_form, Chart(self.rect, res), self.name, self.log_offset)

    def coarsened(self) -> "ConformalMetric":
        return ConformalMetric(self.log_factor.coarsened(), self.closed_form, self.name, self.log_offset)

    def scaled(self, weight: GridField | np.ndarray, closed=None) -> "ConformalMetric":
        """Metric ``W * g`` for a positive weight field ``W``."""
        w = weight.values if isinstance(weight, GridField) else np.asarray(weight)
        f = self.log_factor.values - 0.5 * np.log(w)
        cf = None
        if closed is not None and self.closed_form is not None:
            cf = lambda z: np.real(self.closed_form(z)) - 0.5 * np.log(np.real(closed(z)))
        return ConformalMetric(self.log_factor.with_values(f), cf, self.name, self.log_offset)


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    K: GridField
    ricci_residual: GridField
    normalized_residual: float
    sign_class: str
    tau_sign: float
    order: int = 4

    def summary(self) -> dict:
        K = self.K.values
        return {
            "normalized_residual": self.normalized_residual,
            "max_abs_residual": float(np.nanmax(np.abs(self.ricci_residual.values))),
            "K_min": float(np.nanmin(K)),
            "K_max": float(np.nanmax(K)),
            "sign_class": self.sign_class,
            "tau_sign": self.tau_sign,
            "stencil_order": self.order,
            "grid": [self.K.nx, self.K.ny],
            "rect": list(self.K.rect),
        }


def gaussian_curvature(g: ConformalMetric, order: int = 4) -> GridField:
    """``K = exp(2f) * (0 - Lap_0 f)`` on the stencil interior."""
    f = g.log_factor
    return f.with_values(-g.e2f() * laplacian_flat(f, order).values)


def laplace_beltrami(g: ConformalMetric, u: GridField, order: int = 4) -> GridField:
    return u.with_values(g.e2f() * laplacian_flat(u, order).values)


def richardson_error(g: ConformalMetric, order: int = 4) -> float:
    """Sup-norm estimate of the discretization error of ``K`` on ``g``'s grid.

    Compares against the grid with every other node; the error ratio between
    spacings ``2h`` and ``h`` is ``2**order``.
    """
    fine = gaussian_curvature(g, order).values[::2, ::2]
    coarse = gaussian_curvature(g.coarsened(), order).values
    d = np.abs(fine - coarse)
    if not np.any(np.isfinite(d)):
        return 0.0
    return float(np.nanmax(d)) / (2**order - 1)


def sign_analysis(K: GridField | np.ndarray, tau: float | None = None) -> str:
    """Classify the sign of ``K`` with tolerance ``tau``.

    ``mixed`` is returned only when values above ``tau`` and below ``-tau``
    both occur. Without ``tau`` a relative floor of ``1e-9 * max(1, sup|K|)``
    is used.
    """
    v = K.values if isinstance(K, GridField) else np.asarray(K)
    v = v[np.isfinite(v)]
    if tau is None:
        tau = 1e-9 * max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
    pos = bool(np.any(v > tau))
    neg = bool(np.any(v < -tau))
    if pos and neg:
        return "mixed"
    if neg:
        return "nonpositive"
    if pos:
        return "nonnegative"
    return "zero"


def _residual_field(g: ConformalMetric, K: GridField, order: int) -> np.ndarray:
    e2f = g.e2f()
    Kx, Ky = gradient(K, order)
    lapK = e2f * laplacian_flat(K, order).values
    k = K.values
    return k * lapK + e2f * (Kx**2 + Ky**2) + 4 * k**3


def ricci_residual(g: ConformalMetric, order: int = 4, tau_sign: float | None = None) -> CurvatureReport:
    """Residual ``K Lap K + |dK|_g^2 + 4K^3`` with normalization ``/(1+|K|)^3``.

    ``tau_sign`` defaults to ten times the two-grid discretization estimate
    of ``K`` (plus a 1e-12 floor); it needs odd sample counts.
    """
    K = gaussian_curvature(g, order)
    res = _residual_field(g, K, order)
    normalized = float(np.nanmax(np.abs(res) / (1 + np.abs(K.values)) ** 3))
    if tau_sign is None:
        tau_sign = 10 * richardson_error(g, order) + 1e-12
    return CurvatureReport(K, K.with_values(res), normalized, sign_analysis(K, tau_sign), tau_sign, order)


def log_ricci_residual(g: ConformalMetric, order: int = 4, tau_zero: float | None = None) -> GridField:
    """``Lap_g log|K| + 4K`` where ``|K| >= tau_zero``; NaN elsewhere."""
    K = gaussian_curvature(g, order)
    if tau_zero is None:
        tau_zero = max(1e-8, 10 * richardson_error(g, order))
    k = K.values
    mask = np.abs(k) >= tau_zero
    if not np.any(mask & np.isfinite(k)):
        raise PreconditionError("curvature vanishes on the whole chart", tau_zero=tau_zero)
    # masked nodes are NaN, so their stencil neighbourhood drops out too
    logk = np.where(mask, np.log(np.where(mask, np.abs(k), 1.0)), np.nan)
    out = laplace_beltrami(g, K.with_values(logk), order).values + 4 * k
    return K.with_values(np.where(mask, out, np.nan))


def conformal_power(g: ConformalMetric, r: float, variant: str = "negative", order: int = 4) -> ConformalMetric:
    """Metric ``(-K)**r g`` (``variant='negative'``) or ``K**r g`` (``'positive'``).

    For a Ricci metric the result has curvature ``(1-2r)(-K)**(-r) K``
    (resp. ``(1-2r) K**(1-r)``).
    """
    if variant not in ("negative", "positive"):
        raise ValueError(f"variant must be 'negative' or 'positive', got {variant!r}")
    K = gaussian_curvature(g, order)
    s = -K.values if variant == "negative" else K.values
    bad = np.isfinite(s) & (s <= 0)
    if np.any(bad):
        pts = K.z[bad][:5]
        raise PreconditionError(
            f"curvature has the wrong sign or vanishes at {int(bad.sum())} node(s), e.g. {pts}",
            offending=pts.tolist(),
        )
    f = g.log_factor.values - 0.5 * r * np.log(s)
    return ConformalMetric(g.log_factor.with_values(f), None, f"{g.name}^{r}", g.log_offset)


def predicted_power_curvature(K: np.ndarray, r: float, variant: str = "negative") -> np.ndarray:
    if variant == "negative":
        return (1 - 2 * r) * (-K) ** (-r) * K
    return (1 - 2 * r) * K ** (-r) * K


def _exclusion_mask(field: GridField, exclude) -> np.ndarray:
    mask = np.ones(field.values.shape, dtype=bool)
    z = field.z
    for z0, rad in exclude or ():
        mask &= np.abs(z - z0) > rad
    return mask


def _ricci_from_flat(V, g_half: ConformalMetric, target: float, order: int, tol: float, exclude):
    """Shared body of the spherical/hyperbolic constructions."""
    chart = g_half.chart
    Vf = chart.sample(lambda z: np.real(V(z))) if callable(V) else V
    v = np.asarray(Vf.values, dtype=float)
    mask = _exclusion_mask(g_half.log_factor, exclude)
    if np.any((v <= 0) & mask):
        raise PreconditionError("V must be positive on the chart")

    def sup(a):
        a = np.where(mask, a, np.nan)
        return float(np.nanmax(np.abs(a)))

    k_half = sup(gaussian_curvature(g_half, order).values)
    closed_v = V if callable(V) else None
    g_model = g_half.scaled(Vf, closed_v)
    k_model = sup(gaussian_curvature(g_model, order).values - target)
    if k_half > tol or k_model > tol:
        raise PreconditionError(
            f"precondition failed: |K(g_half)| = {k_half:.3e}, |K(V g_half) - ({target:+g})| = {k_model:.3e} (tol {tol:.1e})",
            flat_residual=k_half,
            model_residual=k_model,
        )
    inv = None if closed_v is None else (lambda z: 1.0 / np.real(closed_v(z)))
    g = g_half.scaled(1.0 / v, inv)
    K = gaussian_curvature(g, order).values
    report = ricci_residual(g, order)
    res = np.where(mask, report.ricci_residual.values / (1 + np.abs(K)) ** 3, np.nan)
    expected = -target * v**2  # -V^2 for spherical, +V^2 for hyperbolic
    report_d = {
        "flat_residual": k_half,
        "model_residual": k_model,
        "curvature_vs_V2": sup(K - expected),
        "normalized_ricci_residual": float(np.nanmax(np.abs(res))),
    }
    return g, report_d


def ricci_from_flat_spherical(V, g_half: ConformalMetric, order: int = 4, tol: float = 1e-3, exclude=None):
    """Ricci metric ``V**-1 g_half`` of curvature ``-V**2``.

    ``V`` is a callable (``z -> V``) or a GridField on ``g_half``'s chart.
    Requires ``g_half`` flat and ``V g_half`` of curvature 1, both checked on
    the grid away from the ``exclude`` disks ``[(center, radius), ...]``.
    Returns ``(metric, report)``.
    """
    return _ricci_from_flat(V, g_half, 1.0, order, tol, exclude)


def ricci_from_flat_hyperbolic(V, g_half: ConformalMetric, order: int = 4, tol: float = 1e-3, exclude=None):
    """Ricci metric ``V**-1 g_half`` of curvature ``+V**2`` (``V g_half`` hyperbolic)."""
    return _ricci_from_flat(V, g_half, -1.0, order, tol, exclude)
