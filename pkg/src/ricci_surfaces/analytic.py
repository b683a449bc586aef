"""Complex series arithmetic and grid calculus.

Conventions used throughout the package:

* Grids are indexed ``values[i, j]`` at ``(x[i], y[j])``.
* ``laplacian_flat`` is the geometer's Laplacian ``-(d_xx + d_yy)``; it is
  positive on ``-(x**2 + y**2)`` and returns ``-4`` on ``x**2 + y**2``.
* Finite-difference results are NaN on the boundary ring of the stencil
  radius; no one-sided stencils are used.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import DomainError, NotHarmonicError

Rect = tuple[float, float, float, float]


# --------------------------------------------------------------------------
# Laurent series
# --------------------------------------------------------------------------


def _normalize(items) -> tuple[tuple[int, complex], ...]:
    acc: dict[int, complex] = {}
    for k, c in items:
        acc[int(k)] = acc.get(int(k), 0j) + complex(c)
    return tuple(sorted((k, c) for k, c in acc.items() if c != 0))


@dataclass(frozen=True)
class LaurentSeries:
    """Finite Laurent series ``sum c_k (z - center)**k`` on an annulus.

    ``coeffs`` may be given as a mapping ``{k: c_k}`` or as ``(k, c_k)`` pairs.
    Exponents with zero coefficient are dropped.
    """

    coeffs: tuple = ()
    center: complex = 0j
    r_inner: float = 0.0
    r_outer: float = math.inf

    def __post_init__(self):
        items = self.coeffs.items() if isinstance(self.coeffs, dict) else self.coeffs
        object.__setattr__(self, "coeffs", _normalize(items))
        object.__setattr__(self, "center", complex(self.center))
        if not (0 <= self.r_inner < self.r_outer):
            raise DomainError(f"empty annulus ({self.r_inner}, {self.r_outer})")

    # constructors -----------------------------------------------------
    @classmethod
    def polynomial(cls, coefficients, center=0j, **kw) -> "LaurentSeries":
        """Series from ascending coefficients ``[c0, c1, ...]``."""
        return cls(tuple(enumerate(coefficients)), center, **kw)

    @classmethod
    def constant(cls, c, center=0j, **kw) -> "LaurentSeries":
        return cls(((0, c),), center, **kw)

    @classmethod
    def monomial(cls, k: int, c=1.0, center=0j, **kw) -> "LaurentSeries":
        return cls(((k, c),), center, **kw)

    @classmethod
    def from_roots(cls, roots, leading=1.0, center=0j) -> "LaurentSeries":
        """Polynomial ``leading * prod (z - r)`` expanded about ``center``."""
        out = cls.constant(leading, center)
        for r in roots:
            out = out * cls(((0, center - r), (1, 1.0)), center)
        return out

    # structure --------------------------------------------------------
    def as_dict(self) -> dict[int, complex]:
        return dict(self.coeffs)

    def __getitem__(self, k: int) -> complex:
        return self.as_dict().get(k, 0j)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_exponent(self) -> int:
        return self.coeffs[0][0] if self.coeffs else 0

    @property
    def max_exponent(self) -> int:
        return self.coeffs[-1][0] if self.coeffs else 0

    @property
    def is_holomorphic(self) -> bool:
        return self.min_exponent >= 0 and self.r_inner == 0

    def with_domain(self, r_inner=None, r_outer=None) -> "LaurentSeries":
        return LaurentSeries(
            self.coeffs,
            self.center,
            self.r_inner if r_inner is None else r_inner,
            self.r_outer if r_outer is None else r_outer,
        )

    # evaluation -------------------------------------------------------
    def _check_domain(self, w):
        rho = np.abs(w)
        lower_ok = rho > self.r_inner if (self.r_inner > 0 or self.min_exponent < 0) else True
        bad = ~(lower_ok & (rho < self.r_outer))
        if np.any(bad):
            raise DomainError(
                f"{int(np.count_nonzero(bad))} point(s) outside annulus "
                f"({self.r_inner}, {self.r_outer}) about {self.center}"
            )

    def __call__(self, z):
        w = np.asarray(z, dtype=complex) - self.center
        self._check_domain(w)
        d = self.as_dict()
        pos = np.zeros_like(w)
        for k in range(self.max_exponent, -1, -1):
            pos = pos * w + d.get(k, 0j)
        if self.min_exponent >= 0:
            return pos
        u = 1.0 / w
        neg = np.zeros_like(w)
        for j in range(-self.min_exponent, 0, -1):
            neg = neg * u + d.get(-j, 0j)
        return pos + neg * u

    # calculus ---------------------------------------------------------
    def derivative(self) -> "LaurentSeries":
        return LaurentSeries(
            tuple((k - 1, k * c) for k, c in self.coeffs if k != 0),
            self.center, self.r_inner, self.r_outer,
        )

    def antiderivative(self) -> "LaurentSeries":
        """Term-wise antiderivative with zero constant term.

        Raises ValueError when the ``(z - center)**-1`` coefficient is nonzero.
        """
        if self[-1] != 0:
            raise ValueError(f"residue {self[-1]} obstructs a single-valued antiderivative")
        return LaurentSeries(
            tuple((k + 1, c / (k + 1)) for k, c in self.coeffs),
            self.center, self.r_inner, self.r_outer,
        )

    def roots(self) -> np.ndarray:
        """Zeros of the series (absolute coordinates), excluding ``center`` for Laurent parts."""
        if self.is_zero:
            raise ValueError("zero series has no isolated roots")
        lo = self.min_exponent
        dense = np.zeros(self.max_exponent - lo + 1, dtype=complex)
        for k, c in self.coeffs:
            dense[k - lo] = c
        # strip factors of w that come from a positive lowest exponent
        r = np.roots(dense[::-1])
        if lo > 0:
            r = np.concatenate([r, np.zeros(lo)])
        return r + self.center

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.center != self.center:
                raise ValueError(f"mismatched centers {self.center} and {other.center}")
            return other
        if np.isscalar(other):
            return LaurentSeries.constant(other, self.center)
        return NotImplemented

    def _domain_with(self, other):
        return max(self.r_inner, other.r_inner), min(self.r_outer, other.r_outer)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        lo, hi = self._domain_with(other)
        return LaurentSeries(self.coeffs + other.coeffs, self.center, lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(tuple((k, -c) for k, c in self.coeffs), self.center, self.r_inner, self.r_outer)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        lo, hi = self._domain_with(other)
        prod = [(k1 + k2, c1 * c2) for k1, c1 in self.coeffs for k2, c2 in other.coeffs]
        return LaurentSeries(tuple(prod), self.center, lo, hi)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = LaurentSeries.constant(1.0, self.center, r_inner=self.r_inner, r_outer=self.r_outer)
        for _ in range(int(n)):
            out = out * self
        return out

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / complex(other))
        return self.exact_divide(other)

    def exact_divide(self, other: "LaurentSeries", rtol: float = 1e-12) -> "LaurentSeries":
        """Quotient ``self / other`` when it is again a finite series.

        Division by a monomial is always exact (Laurent). Otherwise both must
        be polynomials and the remainder must vanish.
        """
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero series")
        lo, hi = self._domain_with(other)
        if len(other.coeffs) == 1:
            (m, c), = other.coeffs
            return LaurentSeries(tuple((k - m, v / c) for k, v in self.coeffs), self.center, lo, hi)
        if self.min_exponent < 0 or other.min_exponent < 0:
            raise ValueError("exact division of Laurent parts needs a monomial divisor")
        num = self.as_dict()
        den = other.as_dict()
        dmax = other.max_exponent
        lead = den[dmax]
        scale = max(abs(c) for _, c in self.coeffs) if self.coeffs else 1.0
        quot: dict[int, complex] = {}
        for k in range(self.max_exponent, dmax - 1, -1):
            c = num.get(k, 0j)
            if c == 0:
                continue
            q = c / lead
            quot[k - dmax] = q
            for j, d in den.items():
                num[k - dmax + j] = num.get(k - dmax + j, 0j) - q * d
        rem = max((abs(c) for c in num.values()), default=0.0)
        if rem > rtol * scale:
            raise ValueError(f"division leaves remainder of size {rem:.3e}; quotient is not a finite series")
        return LaurentSeries(quot, self.center, lo, hi)

    # serialization ----------------------------------------------------
    def to_json(self) -> list:
        return [[k, c.real, c.imag] for k, c in self.coeffs]

    @classmethod
    def from_json(cls, data, center=0j, **kw) -> "LaurentSeries":
        return cls(tuple((int(k), complex(re, im)) for k, re, im in data), center, **kw)

    def __repr__(self):
        terms = " + ".join(f"({c:.6g})w^{k}" for k, c in self.coeffs) or "0"
        return f"LaurentSeries[{terms}; w = z - {self.center}]"


# --------------------------------------------------------------------------
# Composite holomorphic functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HolomorphicFunction:
    """Vectorized holomorphic function with an optional derivative.

    Used where a construction leaves the class of finite series (square
    roots, quotients); the arithmetic propagates first derivatives.
    """

    value: Callable
    deriv: Callable | None = None
    label: str = ""

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=complex))

    def derivative(self) -> "HolomorphicFunction":
        if self.deriv is None:
            raise ValueError(f"no derivative available for {self.label or 'function'}")
        return HolomorphicFunction(self.deriv, None, f"({self.label})'")

    def __add__(self, other):
        o = as_holomorphic(other)
        return HolomorphicFunction(
            lambda z: self(z) + o(z),
            _combine(self, o, lambda z: self.deriv(z) + o.deriv(z)),
        )

    __radd__ = __add__

    def __neg__(self):
        return HolomorphicFunction(lambda z: -self(z), _combine(self, self, lambda z: -self.deriv(z)))

    def __sub__(self, other):
        return self + (-as_holomorphic(other))

    def __mul__(self, other):
        o = as_holomorphic(other)
        return HolomorphicFunction(
            lambda z: self(z) * o(z),
            _combine(self, o, lambda z: self.deriv(z) * o(z) + self(z) * o.deriv(z)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_holomorphic(other)
        return HolomorphicFunction(
            lambda z: self(z) / o(z),
            _combine(self, o, lambda z: (self.deriv(z) * o(z) - self(z) * o.deriv(z)) / o(z) ** 2),
        )


def _combine(f, g, rule):
    return rule if (f.deriv is not None and g.deriv is not None) else None


def as_holomorphic(obj) -> HolomorphicFunction:
    if isinstance(obj, HolomorphicFunction):
        return obj
    if isinstance(obj, LaurentSeries):
        d = obj.derivative()
        return HolomorphicFunction(obj, d, repr(obj))
    if isinstance(obj, numbers.Number):
        c = complex(obj)
        return HolomorphicFunction(
            lambda z: np.full(np.shape(z), c, dtype=complex),
            lambda z: np.zeros(np.shape(z), dtype=complex),
            str(c),
        )
    raise TypeError(f"cannot treat {type(obj).__name__} as holomorphic")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def holomorphic_log_ratio(s, center: complex, z):
    """``log(s(z) / s(center))`` continued along the segment from ``center``.

    Valid when ``s`` has no zero on the segment (a convex, zero-free chart).
    """
    s = as_holomorphic(s)
    ds = s.derivative()
    z = np.asarray(z, dtype=complex)
    t = 0.5 * (_GL_NODES + 1.0)
    w = 0.5 * _GL_WEIGHTS
    dz = z - center
    pts = center + dz[..., None] * t
    integrand = ds(pts) / s(pts)
    return (integrand * w).sum(axis=-1) * dz


def holomorphic_sqrt(s, center: complex) -> HolomorphicFunction:
    """Square root of a zero-free holomorphic ``s`` on a convex chart.

    The branch is the principal root at ``center``, continued along segments.
    """
    s = as_holomorphic(s)
    root0 = np.sqrt(complex(s(np.array(center))))

    def value(z):
        return root0 * np.exp(0.5 * holomorphic_log_ratio(s, center, z))

    def deriv(z):
        return value(z) * s.derivative()(z) / (2.0 * s(z))

    return HolomorphicFunction(value, deriv, "sqrt")


# --------------------------------------------------------------------------
# Grids
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridField:
    """Scalar field sampled on a uniform grid over ``rect = (x0, x1, y0, y1)``."""

    rect: Rect
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values)
        if v.ndim != 2 or min(v.shape) < 8:
            raise ValueError(f"grid needs at least 8x8 samples, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rect", tuple(float(r) for r in self.rect))

    @classmethod
    def sample(cls, fn, rect: Rect, nx: int, ny: int | None = None) -> "GridField":
        ny = nx if ny is None else ny
        x = np.linspace(rect[0], rect[1], nx)
        y = np.linspace(rect[2], rect[3], ny)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return cls(rect, fn(X + 1j * Y))

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def hx(self) -> float:
        return (self.rect[1] - self.rect[0]) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.rect[3] - self.rect[2]) / (self.ny - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.rect[0], self.rect[1], self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.rect[2], self.rect[3], self.ny)

    @property
    def z(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return X + 1j * Y

    def with_values(self, values) -> "GridField":
        return GridField(self.rect, values)

    def coarsened(self) -> "GridField":
        """Every other node; both counts must be odd so the rectangle is kept."""
        if self.nx % 2 == 0 or self.ny % 2 == 0:
            raise ValueError("coarsening needs odd sample counts")
        return GridField(self.rect, self.values[::2, ::2])

    def nearest(self, z0: complex) -> tuple[int, int]:
        i = int(round((z0.real - self.rect[0]) / self.hx))
        j = int(round((z0.imag - self.rect[2]) / self.hy))
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def at(self, z0: complex):
        return self.values[self.nearest(z0)]

    def sup(self, mask=None) -> float:
        v = np.abs(self.values)
        if mask is not None:
            v = np.where(mask, v, np.nan)
        return float(np.nanmax(v))


@dataclass(frozen=True)
class Chart:
    """Rectangle with ``res`` intervals per side (``res + 1`` samples)."""

    rect: Rect = (-1.0, 1.0, -1.0, 1.0)
    res: int = 128

    @property
    def n(self) -> int:
        return self.res + 1

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.rect[0] + self.rect[1]), 0.5 * (self.rect[2] + self.rect[3]))

    def sample(self, fn) -> GridField:
        return GridField.sample(fn, self.rect, self.n)

    def refined(self, res: int) -> "Chart":
        return Chart(self.rect, res)

    def contains(self, z, pad: float = 0.0) -> np.ndarray:
        z = np.asarray(z)
        return (
            (z.real >= self.rect[0] - pad) & (z.real <= self.rect[1] + pad)
            & (z.imag >= self.rect[2] - pad) & (z.imag <= self.rect[3] + pad)
        )

    def to_json(self) -> dict:
        return {"rect": list(self.rect), "res": self.res}

    @classmethod
    def from_json(cls, data) -> "Chart":
        return cls(tuple(float(r) for r in data["rect"]), int(data.get("res", 128)))


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------

_FIRST = {2: (np.array([-1.0, 0.0, 1.0]), 2.0), 4: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]), 12.0)}
_SECOND = {2: (np.array([1.0, -2.0, 1.0]), 1.0), 4: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]), 12.0)}


def _apply(values: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    r = len(weights) // 2
    n = values.shape[axis]
    if n <= 2 * r + 2:
        raise ValueError(f"grid too small for a stencil of radius {r}")
    out = np.full(values.shape, np.nan, dtype=np.result_type(values.dtype, float))
    acc = 0
    for offset, w in zip(range(-r, r + 1), weights):
        if w == 0:
            continue
        sl = [slice(None)] * values.ndim
        sl[axis] = slice(r + offset, n - r + offset)
        acc = acc + w * values[tuple(sl)]
    sl = [slice(None)] * values.ndim
    sl[axis] = slice(r, n - r)
    out[tuple(sl)] = acc
    return out


def _check_order(order):
    if order not in _FIRST:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")


def d_dx(values: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    _check_order(order)
    w, den = _FIRST[order]
    return _apply(values, w, axis) / (den * h)


def d2_dx2(values: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    _check_order(order)
    w, den = _SECOND[order]
    return _apply(values, w, axis) / (den * h * h)


def gradient(field: GridField, order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference ``(d_x, d_y)`` arrays, NaN on the boundary ring."""
    v = field.values
    return d_dx(v, field.hx, 0, order), d_dx(v, field.hy, 1, order)


def hessian(field: GridField, order: int = 4):
    """``(f_xx, f_xy, f_yy)`` arrays."""
    v = field.values
    fxx = d2_dx2(v, field.hx, 0, order)
    fyy = d2_dx2(v, field.hy, 1, order)
    fxy = d_dx(d_dx(v, field.hx, 0, order), field.hy, 1, order)
    return fxx, fxy, fyy


def wirtinger(field: GridField, which: str = "dz", order: int = 4) -> GridField:
    """Wirtinger derivative ``d/dz = (d_x - i d_y)/2`` or ``d/dzbar = (d_x + i d_y)/2``."""
    fx, fy = gradient(field, order)
    if which == "dz":
        return field.with_values(0.5 * (fx - 1j * fy))
    if which == "dzbar":
        return field.with_values(0.5 * (fx + 1j * fy))
    raise ValueError(f"which must be 'dz' or 'dzbar', got {which!r}")


def laplacian_flat(field: GridField, order: int = 4) -> GridField:
    """Positive flat Laplacian ``-(f_xx + f_yy)`` (5-point or wide 9-point stencil)."""
    v = field.values
    return field.with_values(-(d2_dx2(v, field.hx, 0, order) + d2_dx2(v, field.hy, 1, order)))


# --------------------------------------------------------------------------
# Functions on the plane and circle quadrature
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneFunction:
    """Real function of ``z`` with an optional exact gradient ``(f_x, f_y)``."""

    value: Callable
    grad: Callable | None = None

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=complex))

    def gradient(self, z, step: float = 1e-4):
        z = np.asarray(z, dtype=complex)
        if self.grad is not None:
            return self.grad(z)
        return numerical_gradient(self.value, z, step)

    def __add__(self, other):
        if np.isscalar(other):
            return PlaneFunction(lambda z: self(z) + other, self.grad)
        g = None
        if self.grad is not None and other.grad is not None:
            def g(z):
                a, b = self.grad(z), other.grad(z)
                return a[0] + b[0], a[1] + b[1]
        return PlaneFunction(lambda z: self(z) + other(z), g)

    __radd__ = __add__

    def __mul__(self, c):
        c = float(c)
        g = None if self.grad is None else (lambda z: tuple(c * d for d in self.grad(z)))
        return PlaneFunction(lambda z: c * self(z), g)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)


def numerical_gradient(fn, z, step: float):
    """Fourth-order central differences of a real function of ``z``."""
    z = np.asarray(z, dtype=complex)

    def d(e):
        return (-fn(z + 2 * step * e) + 8 * fn(z + step * e) - 8 * fn(z - step * e) + fn(z - 2 * step * e)) / (12 * step)

    return d(1.0), d(1j)


def log_modulus(h, weight: float = 1.0) -> PlaneFunction:
    """``weight * log|h|`` with exact gradient from ``h'/h``."""
    h = as_holomorphic(h)
    dh = h.derivative()

    def grad(z):
        q = dh(z) / h(z)
        return weight * q.real, -weight * q.imag

    return PlaneFunction(lambda z: weight * np.log(np.abs(h(z))), grad)


def real_part(g, weight: float = 1.0) -> PlaneFunction:
    """``weight * Re g`` for holomorphic ``g``; harmonic on the domain of ``g``."""
    g = as_holomorphic(g)
    dg = g.derivative()

    def grad(z):
        q = dg(z)
        return weight * q.real, -weight * q.imag

    return PlaneFunction(lambda z: weight * g(z).real, grad)


def interpolate(field: GridField, degree: int = 5) -> PlaneFunction:
    """Spline interpolant of a real grid field with spline gradient."""
    spl = RectBivariateSpline(field.x, field.y, np.asarray(field.values, dtype=float), kx=degree, ky=degree)

    def value(z):
        return spl.ev(z.real, z.imag)

    def grad(z):
        return spl.ev(z.real, z.imag, dx=1), spl.ev(z.real, z.imag, dy=1)

    return PlaneFunction(value, grad)


@dataclass(frozen=True)
class CirclePath:
    center: complex = 0j
    radius: float = 1.0
    m: int = 256

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.m < 16:
            raise ValueError("circle quadrature needs at least 16 samples")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.m) / self.m

    def points(self) -> np.ndarray:
        return self.center + self.radius * np.exp(1j * self.angles)


def circle_integral(f, path: CirclePath, weight: str = "dl", grad=None) -> float:
    """Uniform-angle trapezoid integral over a circle.

    ``weight`` is ``"dl"`` (arc length), ``"dtheta"`` (angle) or ``"flux"``,
    the latter returning ``int f_x dy - f_y dx``. For ``"flux"`` the gradient
    comes from ``grad``, from ``f.gradient`` or from finite differences.
    """
    z = path.points()
    dtheta = 2 * np.pi / path.m
    if weight == "dl":
        return float(np.sum(f(z)) * path.radius * dtheta)
    if weight == "dtheta":
        return float(np.sum(f(z)) * dtheta)
    if weight == "flux":
        if grad is not None:
            fx, fy = grad(z)
        elif hasattr(f, "gradient"):
            fx, fy = f.gradient(z, step=1e-3 * path.radius)
        else:
            fx, fy = numerical_gradient(f, z, 1e-3 * path.radius)
        t = path.angles
        return float(np.sum(fx * np.cos(t) + fy * np.sin(t)) * path.radius * dtheta)
    raise ValueError(f"unknown weight {weight!r}")


# --------------------------------------------------------------------------
# Harmonic conjugate
# --------------------------------------------------------------------------


def _cumulative(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral with endpoint-corrected trapezoid (fourth order)."""
    out = np.zeros_like(f)
    out[1:] = np.cumsum(0.5 * h * (f[1:] + f[:-1]))
    df = np.gradient(f, h, edge_order=2)
    return out - h * h / 12.0 * (df - df[0])


def harmonic_conjugate(u: GridField, order: int = 4, tol: float = 1e-4):
    """Harmonic conjugate ``v`` with ``dv = -u_y dx + u_x dy``.

    ``v`` vanishes at the lower-left corner of the stencil interior and is
    integrated first along the bottom interior row, then up each column.
    Returns ``(v, path_error)`` where ``path_error`` compares against the
    column-then-row path.
    """
    resid = laplacian_flat(u, order).values
    rnorm = float(np.nanmax(np.abs(resid)))
    if rnorm > tol:
        raise NotHarmonicError(f"Laplacian residual {rnorm:.3e} exceeds {tol:.1e}", residual=rnorm)
    ux, uy = gradient(u, order)
    r = order // 2
    sl = (slice(r, u.nx - r), slice(r, u.ny - r))
    ux, uy = ux[sl], uy[sl]
    hx, hy = u.hx, u.hy

    row = _cumulative(-uy[:, 0], hx)
    cols = np.stack([_cumulative(ux[i, :], hy) for i in range(ux.shape[0])])
    v1 = row[:, None] + cols

    col = _cumulative(ux[0, :], hy)
    rows = np.stack([_cumulative(-uy[:, j], hx) for j in range(uy.shape[1])], axis=1)
    v2 = col[None, :] + rows

    out = np.full(u.values.shape, np.nan)
    out[sl] = v1
    return u.with_values(out), float(np.max(np.abs(v1 - v2)))
