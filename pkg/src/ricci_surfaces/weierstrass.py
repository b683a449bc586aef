"""Weierstrass-Enneper immersions, fundamental forms and mesh export.

Euclidean data ``(alpha, beta)`` gives ``C = (alpha(1+beta^2), i alpha(1-beta^2), 2i alpha beta)``
and ``A = Re int C dz`` in R^3. The Lorentz analog uses
``C = (a^2+b^2, i(a^2-b^2), -2ab)`` from a spinor pair with ``eps = -1`` and the
pairing ``diag(1, 1, -1)``; it is a maximal spacelike immersion in R^{2,1}
with induced metric ``(|a|^2-|b|^2)^2 |dz|^2`` (checked by the test suite).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import Chart, GridField, LaurentSeries, d_dx, d2_dx2, wirtinger
from .errors import PreconditionError

EUCLIDEAN = np.array([1.0, 1.0, 1.0])
LORENTZ = np.array([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class WEData:
    alpha: LaurentSeries
    beta: LaurentSeries

    def __post_init__(self):
        if self.alpha.is_zero:
            raise ValueError("alpha must not vanish identically")

    def factor(self, z):
        """Length factor ``exp(-f) = |alpha| (1 + |beta|^2)``."""
        return np.abs(self.alpha(z)) * (1 + np.abs(self.beta(z)) ** 2)

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "beta": self.beta.to_json()}

    @classmethod
    def from_json(cls, data) -> "WEData":
        center = complex(*data.get("center", (0.0, 0.0)))
        kw = {}
        if "annulus" in data:
            kw = {"r_inner": float(data["annulus"][0]), "r_outer": float(data["annulus"][1])}
        return cls(
            LaurentSeries.from_json(data["alpha"], center, **kw),
            LaurentSeries.from_json(data["beta"], center, **kw),
        )


def c_vector(we: WEData):
    a, b = we.alpha, we.beta
    bb = b * b
    return (a * (1 + bb), 1j * a * (1 - bb), 2j * a * b)


def isotropy(C) -> LaurentSeries:
    """``<C, C>`` as an exact series; the zero series for WE data."""
    return C[0] * C[0] + C[1] * C[1] + C[2] * C[2]


def lorentz_c_vector(p):
    a, b = p.a, p.b
    return (a * a + b * b, 1j * (a * a - b * b), -2 * a * b)


def hopf_h(we: WEData) -> LaurentSeries:
    """``h = -2i alpha beta'``."""
    return -2j * we.alpha * we.beta.derivative()


@dataclass(frozen=True, eq=False)
class Immersion:
    """Grid of points ``A(x_i, y_j)`` with ``points[i, j] = (A1, A2, A3)``."""

    points: np.ndarray
    rect: tuple
    signature: np.ndarray = EUCLIDEAN
    C: tuple = ()
    name: str = ""

    @property
    def nx(self) -> int:
        return self.points.shape[0]

    @property
    def ny(self) -> int:
        return self.points.shape[1]

    @property
    def is_lorentz(self) -> bool:
        return bool(self.signature[2] < 0)

    def component(self, k: int) -> GridField:
        return GridField(self.rect, self.points[..., k])


def _antiderivative_with_log(s: LaurentSeries, name: str):
    """``Re int s dz`` where a real residue contributes ``r log|z - c|``."""
    r = s[-1]
    if abs(r.imag) > 1e-12 * max(1.0, abs(r)):
        raise PreconditionError(
            f"{name} has residue {r}; its period {-2 * np.pi * r.imag:.3e} does not vanish",
            component=name,
            residue=[r.real, r.imag],
        )
    P = (s - LaurentSeries.monomial(-1, r, s.center, r_inner=s.r_inner, r_outer=s.r_outer)).antiderivative()
    if r == 0:
        return lambda z: np.real(P(z))
    c = s.center
    return lambda z: np.real(P(z)) + r.real * np.log(np.abs(z - c))


def _immerse_components(C, chart: Chart, signature, name: str) -> Immersion:
    labels = ("first", "second", "third")
    prims = [_antiderivative_with_log(s, f"{labels[k]} component") for k, s in enumerate(C)]
    z = chart.sample(lambda w: w).values
    z0 = chart.center
    pts = np.stack([P(z) - P(np.array(z0)) for P in prims], axis=-1)
    return Immersion(pts, chart.rect, signature, tuple(C), name)


def immerse(we: WEData, chart: Chart, name: str = "") -> Immersion:
    """Minimal immersion ``A = Re int C dz`` normalized by ``A(center) = 0``."""
    return _immerse_components(c_vector(we), chart, EUCLIDEAN, name)


def lorentz_immerse(p, chart: Chart, name: str = "") -> Immersion:
    """Maximal immersion in R^{2,1} from a spinor pair with ``eps = -1``."""
    if p.epsilon != -1:
        raise ValueError("lorentz_immerse needs eps = -1")
    fac = chart.sample(p.factor).values
    if np.any(fac <= 0):
        raise PreconditionError(f"|a| <= |b| at {int(np.sum(fac <= 0))} node(s)")
    return _immerse_components(lorentz_c_vector(p), chart, LORENTZ, name)


def periods(C, center: complex = 0j, radius: float = 1.0, m: int = 256) -> np.ndarray:
    """Real periods ``Re oint C dz`` over a circle, by trapezoid quadrature."""
    t = 2 * np.pi * np.arange(m) / m
    z = center + radius * np.exp(1j * t)
    dz = 1j * radius * np.exp(1j * t) * (2 * np.pi / m)
    return np.array([np.real(np.sum(s(z) * dz)) for s in C])


@dataclass(frozen=True, eq=False)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    normal: np.ndarray
    W: np.ndarray
    nu_norm: float  # <nu, nu>: +1 Euclidean, -1 Lorentz
    rect: tuple

    @property
    def factor_sq(self) -> np.ndarray:
        """``exp(-2f)`` as the mean of ``|A_x|^2`` and ``|A_y|^2``."""
        return 0.5 * (self.E + self.G)

    def field(self, values) -> GridField:
        return GridField(self.rect, values)


def _cross(u, v):
    return np.cross(u, v)


def fundamental_forms(imm: Immersion, order: int = 4) -> FundamentalForms:
    """First form, normal ``nu = exp(2f) J(A_x x A_y)`` and ``W = exp(4f) [<A_ij, A_x x A_y>]``.

    ``J = diag(1, 1, -1)`` in the Lorentz case, identity otherwise. All
    derivatives are finite differences of the sampled points.
    """
    hx = (imm.rect[1] - imm.rect[0]) / (imm.nx - 1)
    hy = (imm.rect[3] - imm.rect[2]) / (imm.ny - 1)
    P = imm.points
    Ax = d_dx(P, hx, 0, order)
    Ay = d_dx(P, hy, 1, order)
    Axx = d2_dx2(P, hx, 0, order)
    Ayy = d2_dx2(P, hy, 1, order)
    Axy = d_dx(Ax, hy, 1, order)
    eta = imm.signature
    E = np.sum(eta * Ax * Ax, axis=-1)
    F = np.sum(eta * Ax * Ay, axis=-1)
    G = np.sum(eta * Ay * Ay, axis=-1)
    N = _cross(Ax, Ay)
    nN = np.linalg.norm(N, axis=-1)
    ok = np.isfinite(nN)
    if np.any(nN[ok] < 1e-12 * max(1.0, float(np.max(nN[ok])))):
        raise PreconditionError("degenerate frame: A_x and A_y are parallel somewhere")
    e2f = 1.0 / (0.5 * (E + G))
    normal = e2f[..., None] * eta * N
    W = np.empty(P.shape[:2] + (2, 2))
    W[..., 0, 0] = np.sum(Axx * N, axis=-1)
    W[..., 0, 1] = W[..., 1, 0] = np.sum(Axy * N, axis=-1)
    W[..., 1, 1] = np.sum(Ayy * N, axis=-1)
    W *= (e2f**2)[..., None, None]
    return FundamentalForms(E, F, G, normal, W, -1.0 if imm.is_lorentz else 1.0, imm.rect)


def curvature_via_detW(forms: FundamentalForms) -> GridField:
    """Gauss equation ``K = <nu, nu> det W``."""
    W = forms.W
    det = W[..., 0, 0] * W[..., 1, 1] - W[..., 0, 1] * W[..., 1, 0]
    return forms.field(forms.nu_norm * det)


def mean_curvature_residual(forms: FundamentalForms) -> GridField:
    return forms.field(forms.W[..., 0, 0] + forms.W[..., 1, 1])


def hopf_h_grid(forms: FundamentalForms) -> GridField:
    """``h = exp(-2f) (W_11 - i W_12)`` from the sampled fundamental forms."""
    return forms.field(forms.factor_sq * (forms.W[..., 0, 0] - 1j * forms.W[..., 0, 1]))


def isothermal_residual(forms: FundamentalForms) -> float:
    """Sup of ``| |A_x|^2 - |A_y|^2 |`` and ``|<A_x, A_y>|`` relative to ``exp(-2f)``."""
    s = forms.factor_sq
    r = np.maximum(np.abs(forms.E - forms.G), np.abs(forms.F)) / s
    return float(np.nanmax(r))


def orthogonality_residuals(we: WEData, chart: Chart, order: int = 4) -> dict:
    """Sample residuals of ``<C,C> = 0``, ``<C,C'> = 0`` and ``<C, conj(C') + 2 f_zbar conj(C)> = 0``.

    The last relation is the ``d/dzbar`` derivative of ``<C, conj(C)> = 2 exp(-2f)``.
    """
    z = chart.sample(lambda w: w).values
    C = c_vector(we)
    Cz = np.stack([s(z) for s in C], axis=-1)
    dC = np.stack([s.derivative()(z) for s in C], axis=-1)
    f = chart.sample(lambda w: -np.log(we.factor(w)))
    fzb = wirtinger(f, "dzbar", order).values
    scale = np.max(np.abs(Cz)) ** 2
    r3 = np.sum(Cz * (np.conj(dC) + 2 * fzb[..., None] * np.conj(Cz)), axis=-1)
    return {
        "isotropy": float(np.max(np.abs(np.sum(Cz * Cz, axis=-1))) / scale),
        "C_dot_Cprime": float(np.max(np.abs(np.sum(Cz * dC, axis=-1))) / scale),
        "conjugate_relation": float(np.nanmax(np.abs(r3)) / scale),
    }


# --------------------------------------------------------------------------
# Mesh export
# --------------------------------------------------------------------------


def obj_text(points: np.ndarray) -> str:
    """Wavefront OBJ for a grid of points: row-major vertices, two triangles per cell."""
    nx, ny, _ = points.shape
    lines = [f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in points.reshape(-1, 3)]
    for i in range(nx - 1):
        for j in range(ny - 1):
            v00 = i * ny + j + 1
            v10 = v00 + ny
            lines.append(f"f {v00} {v10} {v10 + 1}")
            lines.append(f"f {v00} {v10 + 1} {v00 + 1}")
    return "\n".join(lines) + "\n"


def export_mesh(imm: Immersion, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(obj_text(imm.points))
    return path
