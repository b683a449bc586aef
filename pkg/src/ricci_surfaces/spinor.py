"""Spinor pairs ``(a, b, eps)`` with ``exp(-f) = |a|^2 + eps |b|^2``.

``eps = +1`` gives minimal surfaces in R^3 (curvature <= 0), ``eps = -1``
maximal surfaces in R^{2,1} (curvature >= 0). Also holds the U(2)/U(1,1)
relation machinery between pairs with equal (pseudo-)norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import (
    Chart,
    GridField,
    HolomorphicFunction,
    LaurentSeries,
    as_holomorphic,
    holomorphic_sqrt,
    wirtinger,
)
from .conformal import ConformalMetric
from .errors import PreconditionError

J = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class SpinorPair:
    a: object
    b: object
    epsilon: int = 1

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        for s in (self.a, self.b):
            if isinstance(s, LaurentSeries) and s.min_exponent < 0:
                raise ValueError("spinor components must be holomorphic (no negative exponents)")

    def factor(self, z):
        """``|a|^2 + eps |b|^2``, the length factor ``exp(-f)``."""
        a, b = self.a(z), self.b(z)
        return np.abs(a) ** 2 + self.epsilon * np.abs(b) ** 2

    def transformed(self, A) -> "SpinorPair":
        """Pair ``A (a, b)`` for a constant 2x2 matrix ``A``."""
        A = np.asarray(A, dtype=complex)
        a, b = as_holomorphic(self.a), as_holomorphic(self.b)
        return SpinorPair(A[0, 0] * a + A[0, 1] * b, A[1, 0] * a + A[1, 1] * b, self.epsilon)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "epsilon": self.epsilon}

    @classmethod
    def from_json(cls, data) -> "SpinorPair":
        center = complex(*data.get("center", (0.0, 0.0)))
        return cls(
            LaurentSeries.from_json(data["a"], center),
            LaurentSeries.from_json(data["b"], center),
            int(data.get("epsilon", 1)),
        )


def metric_from_spinor(p: SpinorPair, chart: Chart) -> ConformalMetric:
    """Metric ``(|a|^2 + eps|b|^2)^2 |dz|^2``; errors if the factor is not positive on the chart."""
    fac = chart.sample(p.factor).values
    bad = fac <= 0
    if np.any(bad):
        pts = chart.sample(lambda z: z).values[bad][:5]
        raise PreconditionError(
            f"|a|^2 {'+' if p.epsilon > 0 else '-'} |b|^2 is not positive at {int(bad.sum())} node(s), e.g. {pts}",
            violations=int(bad.sum()),
        )
    a = p.a
    if isinstance(a, LaurentSeries) and a.max_exponent == 0 and a.min_exponent == 0 and not a.is_zero:
        a2 = abs(a[0]) ** 2
        return ConformalMetric.from_log_factor(
            lambda z: -np.log1p(p.epsilon * np.abs(p.b(z)) ** 2 / a2), chart, "spinor", -np.log(a2)
        )
    return ConformalMetric.from_log_factor(lambda z: log_factor(p, z), chart, "spinor")


def log_factor(p: SpinorPair, z):
    """``f = -log|a|^2 - log1p(eps |b/a|^2)``.

    Equal to ``-log(|a|^2 + eps|b|^2)``, but a constant ``a`` contributes the
    same float at every node, which keeps finite differences of ``f`` free of
    that part's rounding noise.
    """
    z = np.asarray(z, dtype=complex)
    a2 = np.abs(p.a(z)) ** 2
    b2 = np.abs(p.b(z)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        f = -np.log(a2) - np.log1p(p.epsilon * b2 / a2)
    return np.where(a2 > 0, f, -np.log(a2 + p.epsilon * b2))


def curvature_closed_form(p: SpinorPair):
    """Callable ``K(z) = -4 eps |a b' - b a'|^2 / (|a|^2 + eps |b|^2)^4``."""
    a, b = as_holomorphic(p.a), as_holomorphic(p.b)
    da, db = a.derivative(), b.derivative()

    def K(z):
        z = np.asarray(z, dtype=complex)
        w = a(z) * db(z) - b(z) * da(z)
        return -4.0 * p.epsilon * np.abs(w) ** 2 / p.factor(z) ** 4

    return K


def dirac_residual(a_field: GridField, b_field: GridField, order: int = 4):
    """``(d_zbar a, d_zbar b)``: both vanish exactly for admissible spinor data."""
    return wirtinger(a_field, "dzbar", order), wirtinger(b_field, "dzbar", order)


def _zeros_in_chart(s, chart: Chart):
    """Zeros of ``s`` inside the chart rectangle (exact roots for series, sampled otherwise)."""
    if isinstance(s, LaurentSeries):
        if s.is_zero:
            return np.array([chart.center])
        if s.max_exponent <= 0:
            return np.array([], dtype=complex)
        r = s.roots()
        return r[chart.contains(r)]
    vals = chart.sample(s).values
    near = np.abs(vals) < 1e-12 * max(float(np.max(np.abs(vals))), 1.0)
    return chart.sample(lambda z: z).values[near]


def we_from_spinor(p: SpinorPair, chart: Chart):
    """Weierstrass-Enneper data ``alpha = a^2``, ``beta = b / a``.

    ``a`` must be zero-free on the chart and ``b / a`` a finite series
    (always true when ``a`` is a monomial).
    """
    from .weierstrass import WEData

    if p.epsilon != 1:
        raise ValueError("Weierstrass-Enneper data is defined for eps = +1")
    if not (isinstance(p.a, LaurentSeries) and isinstance(p.b, LaurentSeries)):
        raise TypeError("we_from_spinor needs series components")
    zeros = _zeros_in_chart(p.a, chart)
    if zeros.size:
        raise PreconditionError(f"a vanishes in the chart at {zeros}", zeros=zeros.tolist())
    return WEData(p.a * p.a, p.b.exact_divide(p.a))


def spinor_from_uniformizers(phi, psi, epsilon: int, chart: Chart) -> SpinorPair:
    """Pair ``(phi'/zeta, psi phi'/zeta)`` with ``zeta**2 = 2 psi'``.

    ``zeta`` is the principal root at the chart centre continued along
    segments; the opposite root gives the pair ``(-a, -b)`` and the same metric.
    Series inputs keep second derivatives available, so the closed-form
    curvature of the result works.
    """
    derivs = []
    for name, s in (("psi'", psi), ("phi'", phi)):
        d = s.derivative()
        zeros = _zeros_in_chart(d, chart)
        if zeros.size:
            raise PreconditionError(f"{name} vanishes in the chart at {zeros}", zeros=zeros.tolist())
        derivs.append(as_holomorphic(d))
    dpsi, dphi = derivs
    zeta = holomorphic_sqrt(2 * dpsi, chart.center)
    a = dphi / zeta
    return SpinorPair(a, as_holomorphic(psi) * a, epsilon)


# --------------------------------------------------------------------------
# Relation matrices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class U11Class:
    kind: str  # elliptic | parabolic | hyperbolic | scalar
    theta: float  # global phase exp(2 pi i theta)
    parameter: float  # alpha, a or t of the model matrix
    trace: float  # trace after removing the phase


@dataclass(frozen=True, eq=False)
class RelationMatrix:
    entries: np.ndarray
    group: str
    residual: float
    defect: float
    unique: bool
    conjugacy: U11Class | None = None


def group_defect(A, group: str) -> float:
    A = np.asarray(A, dtype=complex)
    if group == "U(2)":
        return float(np.max(np.abs(A.conj().T @ A - np.eye(2))))
    if group == "U(1,1)":
        return float(np.max(np.abs(A.conj().T @ J @ A - J)))
    raise ValueError(f"unknown group {group!r}")


def model_matrix(kind: str, param: float) -> np.ndarray:
    """Model matrices ``A1(alpha)``, ``A2(a)``, ``A3(t)`` of the U(1,1) classes."""
    if kind == "elliptic":
        e = np.exp(2j * np.pi * param)
        return np.array([[e, 0], [0, 1 / e]])
    if kind == "parabolic":
        s = 2 * np.pi * param
        return np.array([[1 + 1j * s, s], [s, 1 - 1j * s]])
    if kind == "hyperbolic":
        c, s = np.cosh(2 * np.pi * param), np.sinh(2 * np.pi * param)
        return np.array([[c, -s], [-s, c]], dtype=complex)
    raise ValueError(f"unknown class {kind!r}")


def one_parameter_group(kind: str, param: float, z):
    """``B_j(z)`` with ``B_j(2 pi i)`` equal to the model matrix.

    The parabolic group is ``I + z a N`` with the nilpotent ``N = [[1, -i], [-i, -1]]``.
    """
    z = complex(z)
    if kind == "elliptic":
        return np.array([[np.exp(z * param), 0], [0, np.exp(-z * param)]])
    if kind == "parabolic":
        w = z * param
        return np.array([[1 + w, -1j * w], [-1j * w, 1 - w]])
    if kind == "hyperbolic":
        c, s = np.cosh(1j * z * param), np.sinh(1j * z * param)
        return np.array([[c, s], [s, c]])
    raise ValueError(f"unknown class {kind!r}")


def _wrap(theta: float) -> float:
    theta = float(theta) % 1.0
    return 0.0 if min(theta, 1.0 - theta) < 1e-12 else theta


def classify_u11(A, tol: float = 1e-8) -> U11Class:
    """Conjugacy class of ``A`` in U(1,1) by the trace trichotomy.

    ``A = exp(2 pi i theta) B`` with ``det B = 1``; ``B`` is elliptic,
    parabolic or hyperbolic as ``|tr B|`` is below, at or above 2. For the
    parabolic class the reported ``a`` is ``Im(B_11) / 2 pi``; its sign is the
    conjugacy invariant and it equals the model parameter for model matrices.
    """
    A = np.asarray(A, dtype=complex)
    d = group_defect(A, "U(1,1)")
    if d > tol:
        raise PreconditionError(f"matrix is not in U(1,1) (defect {d:.2e})", defect=d)
    theta = (np.angle(np.linalg.det(A)) / (4 * np.pi)) % 0.5
    B = np.exp(-2j * np.pi * theta) * A
    tr = np.trace(B).real
    if tr < 0 and abs(tr) >= 2 - tol:
        theta, B, tr = theta + 0.5, -B, -tr
    theta = _wrap(theta)
    if np.max(np.abs(B - np.eye(2))) < tol:
        return U11Class("scalar", theta, 0.0, 2.0)
    if np.max(np.abs(B + np.eye(2))) < tol:
        return U11Class("scalar", _wrap(theta + 0.5), 0.0, 2.0)
    if abs(abs(tr) - 2) <= tol * 10:
        return U11Class("parabolic", float(theta), float(B[0, 0].imag / (2 * np.pi)), float(tr))
    if abs(tr) < 2:
        return U11Class("elliptic", float(theta), float(np.arccos(tr / 2) / (2 * np.pi)), float(tr))
    return U11Class("hyperbolic", float(theta), float(np.arccosh(tr / 2) / (2 * np.pi)), float(tr))


def _two_circle_points(center=0j, radii=(0.3, 0.6), per_circle=8):
    t = 2 * np.pi * (np.arange(per_circle) + 0.25) / per_circle
    return np.concatenate([center + r * np.exp(1j * (t + k * 0.5)) for k, r in enumerate(radii)])


def _sample_pair(G, z):
    if callable(G):
        return np.asarray(G(z))
    return np.stack([np.broadcast_to(np.asarray(g(z) if callable(g) else g, dtype=complex), z.shape) for g in G])


def _completion(u, group):
    """2x2 matrix with first column ``u / |u|`` completed to the group."""
    if group == "U(2)":
        n = np.sqrt(np.sum(np.abs(u) ** 2))
        v = np.array([-np.conj(u[1]), np.conj(u[0])])
    else:
        n = np.sqrt(np.abs(u[0]) ** 2 - np.abs(u[1]) ** 2)
        v = np.array([np.conj(u[1]), np.conj(u[0])])
    return np.column_stack([u / n, v / n])


def unitary_relation(G, H, group: str = "U(2)", points=None, rtol: float = 1e-9) -> RelationMatrix:
    """Constant ``A`` in U(2) or U(1,1) with ``H = A G``.

    ``G`` and ``H`` are pairs of holomorphic callables (or callables
    returning a ``(2, N)`` array). ``A`` is the least-squares solution over
    points on two circles; when the samples of ``G`` span a line the relation
    is not unique and a representative group element is returned.
    """
    z = _two_circle_points() if points is None else np.asarray(points, dtype=complex)
    Gs, Hs = _sample_pair(G, z), _sample_pair(H, z)
    sgn = 1.0 if group == "U(2)" else -1.0
    if group not in ("U(2)", "U(1,1)"):
        raise ValueError(f"unknown group {group!r}")
    nG = np.abs(Gs[0]) ** 2 + sgn * np.abs(Gs[1]) ** 2
    nH = np.abs(Hs[0]) ** 2 + sgn * np.abs(Hs[1]) ** 2
    scale = np.max(np.abs(Gs[0]) ** 2 + np.abs(Gs[1]) ** 2)
    gap = float(np.max(np.abs(nG - nH)) / scale)
    if gap > rtol:
        raise PreconditionError(f"norms differ by {gap:.2e} (relative)", norm_gap=gap)
    sv = np.linalg.svd(Gs, compute_uv=False)
    unique = bool(sv[-1] > 1e-10 * sv[0])
    if unique:
        At, *_ = np.linalg.lstsq(Gs.T, Hs.T, rcond=None)
        A = At.T
    else:
        k = int(np.argmax(np.abs(Gs[0]) ** 2 + np.abs(Gs[1]) ** 2))
        A = _completion(Hs[:, k], group) @ np.linalg.inv(_completion(Gs[:, k], group))
    residual = float(np.max(np.abs(Hs - A @ Gs)) / np.sqrt(scale))
    cls = classify_u11(A) if group == "U(1,1)" else _classify_u2(A)
    return RelationMatrix(A, group, residual, group_defect(A, group), unique, cls)


def _classify_u2(A, tol: float = 1e-8) -> U11Class:
    theta = (np.angle(np.linalg.det(A)) / (4 * np.pi)) % 0.5
    B = np.exp(-2j * np.pi * theta) * A
    tr = np.trace(B).real
    if np.max(np.abs(B - np.eye(2))) < tol or np.max(np.abs(B + np.eye(2))) < tol:
        return U11Class("scalar", float(theta), 0.0, float(tr))
    return U11Class("elliptic", float(theta), float(np.arccos(np.clip(tr / 2, -1, 1)) / (2 * np.pi)), float(tr))


def phase_relation(h1, h2, rtol: float = 1e-9) -> float:
    """``theta`` in ``[0, 2 pi)`` with ``h1 = exp(i theta) h2`` on the samples."""
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    scale = np.max(np.abs(h2))
    if np.min(np.abs(h2)) <= 1e-14 * scale or np.min(np.abs(h1)) <= 1e-14 * scale:
        raise PreconditionError("samples must be nonvanishing")
    gap = float(np.max(np.abs(np.abs(h1) - np.abs(h2))) / scale)
    if gap > rtol:
        raise PreconditionError(f"moduli differ by {gap:.2e} (relative)", modulus_gap=gap)
    theta = float(np.angle(np.sum(h1 * np.conj(h2))))
    # roundoff-level angles near the 0 = 2 pi cut collapse to 0
    theta = 0.0 if abs(theta) < 1e-13 else theta % (2 * np.pi)
    resid = float(np.max(np.abs(h1 - np.exp(1j * theta) * h2)) / scale)
    if resid > 1e3 * rtol:
        raise PreconditionError(f"no constant phase fits (residual {resid:.2e})", residual=resid)
    return theta
