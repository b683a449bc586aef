"""Log-harmonic functions: residuals, virtual measure, factorization ``F = |h|^2``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import (
    Chart,
    CirclePath,
    GridField,
    PlaneFunction,
    as_holomorphic,
    circle_integral,
    gradient,
    harmonic_conjugate,
    interpolate,
    laplacian_flat,
    log_modulus,
    wirtinger,
)
from .conformal import sign_analysis
from .errors import PreconditionError


def log_harmonic_residual(F: GridField, order: int = 4, tau: float | None = None) -> GridField:
    """``F Lap_0 F + |dF|^2``; NaN on the zero band ``|F| < tau``.

    Vanishes exactly where ``log|F|`` is harmonic, and stays finite at zeros.
    """
    Fx, Fy = gradient(F, order)
    res = F.values * laplacian_flat(F, order).values + Fx**2 + Fy**2
    if tau is None:
        tau = _zero_threshold(F.values)
    return F.with_values(np.where(np.abs(F.values) < tau, np.nan, res))


def _zero_threshold(values) -> float:
    return 1e-10 * float(np.nanmax(np.abs(values)))


@dataclass(frozen=True, eq=False)
class LogHarmonicSample:
    F: GridField
    zero_mask: np.ndarray
    tau_F: float

    @classmethod
    def from_field(cls, F: GridField, tau: float | None = None) -> "LogHarmonicSample":
        tau = _zero_threshold(F.values) if tau is None else tau
        return cls(F, np.abs(F.values) < tau, tau)

    @classmethod
    def from_function(cls, fn, chart: Chart, tau: float | None = None) -> "LogHarmonicSample":
        return cls.from_field(chart.sample(lambda z: np.real(fn(z))), tau)

    def residual(self, order: int = 4) -> GridField:
        return log_harmonic_residual(self.F, order, self.tau_F)

    def normalized_residual(self, order: int = 4) -> float:
        """Sup of the residual relative to ``sup |dF|^2`` (scale invariant)."""
        Fx, Fy = gradient(self.F, order)
        scale = max(float(np.nanmax(Fx**2 + Fy**2)), float(np.nanmax(self.F.values**2)))
        return float(np.nanmax(np.abs(self.residual(order).values))) / scale

    def sign_class(self) -> str:
        return sign_analysis(np.where(self.zero_mask, np.nan, self.F.values), self.tau_F)


@dataclass(frozen=True)
class VirtualMeasureReport:
    mu: float
    nu: float
    radii: tuple
    fluxes: tuple
    flux_spread: float
    fit_mu: float
    fit_residual: float


def _as_plane_function(f) -> PlaneFunction:
    if isinstance(f, PlaneFunction):
        return f
    if isinstance(f, GridField):
        return interpolate(f)
    return PlaneFunction(f)


def virtual_measure(f, radii=(0.5, 0.625, 0.75, 0.875, 1.0), center: complex = 0j, m: int = 256, tol: float = 1e-6):
    """Virtual measure ``mu`` of a function harmonic on an annulus.

    ``mu`` is the flux ``int f_x dy - f_y dx`` over each circle (it must not
    depend on the radius); the circle means are fitted against
    ``mu log r + nu`` as a cross-check.
    """
    f = _as_plane_function(f)
    radii = tuple(float(r) for r in radii)
    if not radii:
        raise ValueError("need at least one radius")
    fluxes = [circle_integral(f, CirclePath(center, r, m), "flux") for r in radii]
    means = [circle_integral(f, CirclePath(center, r, m), "dtheta") for r in radii]
    mu = float(np.mean(fluxes))
    spread = float(np.max(fluxes) - np.min(fluxes))
    if spread > tol * max(1.0, abs(mu)):
        raise PreconditionError(
            f"flux varies by {spread:.3e} across radii; input is not harmonic on the annulus",
            fluxes=fluxes,
        )
    if len(radii) >= 2:
        A = np.column_stack([np.log(radii), np.ones(len(radii))])
        coef, *_ = np.linalg.lstsq(A, np.asarray(means), rcond=None)
        fit_res = float(np.max(np.abs(A @ coef - means)))
        fit_mu, nu = float(coef[0]), float(coef[1])
    else:
        fit_mu, fit_res = mu, 0.0
        nu = float(means[0] - mu * np.log(radii[0]))
    return VirtualMeasureReport(mu, nu, radii, tuple(fluxes), spread, fit_mu, fit_res)


@dataclass(frozen=True, eq=False)
class Factorization:
    """``F = |h|^2`` with ``h`` on the grid (NaN on the stencil ring)."""

    h: GridField
    k: int
    modulus_error: float
    holomorphy_residual: float
    path_error: float
    theta_defect: float = 0.0


def _interior(values, order):
    r = 2 * (order // 2)
    return values[r:-r, r:-r]


def _factor_errors(F: np.ndarray, h: GridField, order: int):
    mod = np.abs(np.abs(h.values) ** 2 - F)
    modulus_error = float(np.nanmax(mod) / np.nanmax(np.abs(F)))
    dzbar = _interior(wirtinger(h, "dzbar", order).values, order)
    holo = float(np.nanmax(np.abs(dzbar)) / np.nanmax(np.abs(h.values)))
    return modulus_error, holo


def factor_positive(F: GridField, order: int = 4, tol: float = 1e-4) -> Factorization:
    """Holomorphic ``h`` with ``F = |h|^2`` for positive log-harmonic ``F``.

    ``h = exp(u + iv)`` with ``u = log(F) / 2`` and ``v`` its harmonic conjugate;
    ``h`` is fixed up to a constant phase by ``v = 0`` at the base corner.
    """
    vals = np.asarray(F.values, dtype=float)
    if np.any(vals <= 0):
        raise PreconditionError(f"F is not positive at {int(np.sum(vals <= 0))} node(s)")
    u = F.with_values(0.5 * np.log(vals))
    v, path_error = harmonic_conjugate(u, order, tol)
    h = F.with_values(np.exp(u.values + 1j * v.values))
    modulus_error, holo = _factor_errors(vals, h, order)
    return Factorization(h, 0, modulus_error, holo, path_error)


@dataclass(frozen=True)
class OrderReport:
    n: int
    mu: float
    defect: float
    radial_ratio: float
    radii: tuple
    fluxes: tuple


def _log_of(F) -> PlaneFunction:
    if isinstance(F, GridField):
        vals = np.asarray(F.values, dtype=float)
        with np.errstate(divide="ignore"):
            lg = np.log(np.maximum(vals, np.finfo(float).tiny))
        return interpolate(F.with_values(lg))
    return PlaneFunction(lambda z: np.log(np.real(F(z))))


def vanishing_order(F, z0: complex = 0j, radius: float = 0.1, m: int = 256, tol: float = 0.05) -> OrderReport:
    """Order ``n = mu(log F) / 2 pi`` of the zero of ``F`` at ``z0``.

    ``F`` is a callable or a GridField; its only zero inside the probe circles
    must be ``z0``. The flux of ``log F`` over a circle of radius ``r`` is
    ``2 pi n + O(r^2)`` for ``F = |z - z0|^n G`` with smooth positive ``G``
    (and exactly constant when ``F`` is log-harmonic), so the fluxes at three
    radii are extrapolated to ``r = 0`` in powers of ``r^2``. Also reports
    ``max F / min F`` on the smallest probe circle, which tends to 1 for a
    radial leading term.
    """
    lf = _log_of(F)
    radii = (float(radius), float(radius / np.sqrt(2)), 0.5 * float(radius))
    fluxes = [circle_integral(lf, CirclePath(z0, r, m), "flux") for r in radii]
    r2 = np.asarray(radii) ** 2
    mu = float(np.polynomial.polynomial.polyfit(r2, fluxes, len(radii) - 1)[0])
    q = mu / (2 * np.pi)
    n = int(round(q))
    defect = abs(q - n)
    if defect > tol:
        raise PreconditionError(
            f"mu / 2pi = {q:.4f} is not an integer (defect {defect:.3f}); F is not |h|^2-like near {z0}",
            mu=mu,
            defect=defect,
        )
    ring = np.exp(lf(CirclePath(z0, radii[-1], m).points()))
    return OrderReport(n, mu, float(defect), float(np.max(ring) / np.min(ring)), radii, tuple(fluxes))


def _fill_node(G: np.ndarray, i: int, j: int) -> None:
    """Replace ``G[i, j]`` by fourth-order midpoint interpolation of its row and column."""
    def mid(a, b, c, d):
        return (-a + 4 * b + 4 * c - d) / 6.0

    est = []
    if 2 <= i < G.shape[0] - 2:
        est.append(mid(G[i - 2, j], G[i - 1, j], G[i + 1, j], G[i + 2, j]))
    if 2 <= j < G.shape[1] - 2:
        est.append(mid(G[i, j - 2], G[i, j - 1], G[i, j + 1], G[i, j + 2]))
    if not est:
        raise PreconditionError("zero lies on the chart boundary")
    G[i, j] = np.mean(est)


def factor_with_zero(F, z0: complex, chart: Chart | None = None, radius: float = 0.1, order: int = 4, tol: float = 1e-4) -> Factorization:
    """``F = |h|^2`` through an isolated zero at ``z0``.

    The vanishing order ``n`` must be even; ``k = n / 2`` and
    ``h = (z - z0)**k * h0`` where ``h0`` factors the positive quotient
    ``F / |z - z0|**(2k)``. ``theta_defect`` is ``mu / 4pi - k`` (zero for
    smooth ``F``).
    """
    if isinstance(F, GridField):
        Fg = F
    else:
        if chart is None:
            raise ValueError("a chart is needed to sample a callable F")
        Fg = chart.sample(lambda z: np.real(F(z)))
    rep = vanishing_order(F, z0, radius)
    if rep.n % 2:
        raise PreconditionError(
            f"odd vanishing order {rep.n}: k = {rep.n / 2} is not an integer", n=rep.n, mu=rep.mu
        )
    k = rep.n // 2
    z = Fg.z
    w = z - z0
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.asarray(Fg.values, dtype=float) / np.abs(w) ** (2 * k)
    tiny = np.abs(w) < 1e-9 * max(Fg.hx, Fg.hy)
    for i, j in zip(*np.nonzero(tiny)):
        G[i, j] = np.nan
    for i, j in zip(*np.nonzero(tiny)):
        _fill_node(G, i, j)
    base = factor_positive(Fg.with_values(G), order, tol)
    h = Fg.with_values(w**k * base.h.values)
    modulus_error, holo = _factor_errors(np.asarray(Fg.values, dtype=float), h, order)
    theta = rep.mu / (4 * np.pi) - k
    return Factorization(h, k, modulus_error, holo, base.path_error, float(theta))


def modulus_squared(h):
    """Callable ``|h|^2`` for a holomorphic ``h``."""
    h = as_holomorphic(h)
    return lambda z: np.abs(h(z)) ** 2


def poisson_extension(boundary, m: int = 4096) -> PlaneFunction:
    """Harmonic extension to the unit disk of ``t -> boundary(exp(i t))``.

    Poisson-kernel quadrature ``phi = Re Phi`` with
    ``Phi(z) = (1/2pi) int (e^{it} + z)/(e^{it} - z) b(t) dt``; the gradient
    comes from ``Phi'``.
    """
    t = 2 * np.pi * np.arange(m) / m
    e = np.exp(1j * t)
    b = np.real(boundary(e)) / m

    def Phi(z):
        z = np.asarray(z, dtype=complex)
        return np.tensordot((e + z[..., None]) / (e - z[..., None]), b, axes=([-1], [0])) if z.ndim else np.sum((e + z) / (e - z) * b)

    def dPhi(z):
        z = np.asarray(z, dtype=complex)
        return np.sum(2 * e / (e - z[..., None]) ** 2 * b, axis=-1)

    def grad(z):
        q = dPhi(z)
        return q.real, -q.imag

    return PlaneFunction(lambda z: np.real(Phi(z)), grad)


def dirichlet_normalize(h, m: int = 4096):
    """``log(exp(-phi) |h|^2)`` where ``phi`` is harmonic with ``phi = log|h|^2`` on the unit circle.

    ``h`` must not vanish on the unit circle. The normalized function equals
    1 on the circle; returns ``(log_normalized, phi)``.
    """
    h = as_holomorphic(h)
    ring = np.abs(h(np.exp(2j * np.pi * np.arange(m) / m)))
    if np.min(ring) < 1e-8 * max(np.max(ring), 1.0):
        raise PreconditionError("h vanishes on the unit circle")
    phi = poisson_extension(lambda w: 2 * np.log(np.abs(h(w))), m)
    return log_modulus(h, 2.0) - phi, phi
