import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_surfaces.analytic import (
    Chart,
    CirclePath,
    GridField,
    LaurentSeries,
    as_holomorphic,
    circle_integral,
    harmonic_conjugate,
    holomorphic_sqrt,
    laplacian_flat,
    log_modulus,
    wirtinger,
)
from ricci_surfaces.errors import DomainError, NotHarmonicError

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)
coeff_lists = st.lists(cplx, min_size=1, max_size=5)
points = st.builds(complex, st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))


def series(cs, lo=0):
    return LaurentSeries({lo + k: c for k, c in enumerate(cs)})


def test_laplacian_sign_convention():
    F = Chart((-1, 1, -1, 1), 32).sample(lambda z: np.abs(z) ** 2)
    vals = laplacian_flat(F).values
    assert np.allclose(vals[np.isfinite(vals)], -4.0)


def test_boundary_ring_is_nan():
    F = Chart((-1, 1, -1, 1), 32).sample(lambda z: z.real)
    L = laplacian_flat(F, 4).values
    assert np.all(np.isnan(L[:2])) and np.all(np.isfinite(L[2:-2, 2:-2]))


def test_series_evaluation_and_roots():
    p = LaurentSeries.from_roots([1.0, -2.0, 0.5j], 3.0)
    assert np.allclose(p(np.array([1.0, -2.0, 0.5j])), 0)
    assert sorted(np.round(p.roots(), 10), key=lambda r: (r.real, r.imag)) == sorted(
        [1.0, -2.0, 0.5j], key=lambda r: (complex(r).real, complex(r).imag)
    )


def test_exact_divide():
    a = LaurentSeries.from_roots([1.0, 2.0])
    b = LaurentSeries.from_roots([1.0])
    q = a.exact_divide(b)
    assert np.allclose(q(np.array([0.3 + 0.1j])), 0.3 + 0.1j - 2.0)
    with pytest.raises(ValueError):
        b.exact_divide(a + 1)


def test_laurent_domain_errors():
    s = LaurentSeries.monomial(-1, 1.0, r_inner=0.5)
    with pytest.raises(DomainError):
        s(np.array([0.1]))
    with pytest.raises(ValueError):
        s.antiderivative()


def test_json_roundtrip():
    s = series([1, 2j, -0.5], lo=-1)
    assert LaurentSeries.from_json(s.to_json()).coeffs == s.coeffs


@given(coeff_lists, coeff_lists, points)
def test_arithmetic_matches_evaluation(c1, c2, z):
    a, b = series(c1), series(c2)
    z = np.array([z])
    assert np.allclose((a * b)(z), a(z) * b(z), rtol=1e-9, atol=1e-9)
    assert np.allclose((a + b)(z), a(z) + b(z), rtol=1e-12, atol=1e-12)
    ab, ba = (a * b).as_dict(), (b * a).as_dict()
    assert ab.keys() == ba.keys() and all(abs(ab[k] - ba[k]) <= 1e-12 * (1 + abs(ab[k])) for k in ab)


@given(coeff_lists, coeff_lists)
def test_product_rule(c1, c2):
    a, b = series(c1), series(c2)
    lhs = (a * b).derivative()
    rhs = a.derivative() * b + a * b.derivative()
    d = (lhs - rhs).as_dict()
    assert max((abs(v) for v in d.values()), default=0) < 1e-9


@given(coeff_lists)
def test_antiderivative_inverts_derivative(cs):
    s = series(cs)
    back = s.antiderivative().derivative()
    d = (back - s).as_dict()
    assert max((abs(v) for v in d.values()), default=0) < 1e-12


def _lap_error(s, res):
    F = Chart((-1, 1, -1, 1), res).sample(lambda z: s(z).real)
    return float(np.nanmax(np.abs(laplacian_flat(F).values)))


@pytest.mark.parametrize("cs", [[0, 0, 0, 1], [1, -2, 0.5, 0, 0.25j], [0, 0, 0, 0, 0, 1]])
def test_laplacian_of_holomorphic_real_part_converges(cs):
    s = series(cs)
    e1, e2 = _lap_error(s, 32), _lap_error(s, 64)
    assert e2 < 1e-6 or math.log2(e1 / e2) >= 2


@given(st.lists(cplx, min_size=1, max_size=6))
@settings(max_examples=25, deadline=None)
def test_dzbar_of_holomorphic_vanishes(cs):
    s = series(cs)
    F = Chart((-1, 1, -1, 1), 64).sample(s)
    h = 2 / 64
    scale = max(1.0, float(np.max(np.abs(F.values))))
    # fourth-order stencil error bound for degree <= 5 polynomials
    assert np.nanmax(np.abs(wirtinger(F, "dzbar").values)) < 50 * scale * h**4 * 120


@given(st.lists(cplx, min_size=1, max_size=4), st.builds(complex, st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)))
def test_mean_value_property(cs, c):
    s = series(cs)
    f = lambda z: s(z).real
    mean = circle_integral(f, CirclePath(c, 0.5, 256), "dtheta")
    assert abs(mean - 2 * np.pi * s(np.array(c)).real) < 1e-9 * max(1.0, sum(abs(x) for x in cs))


def test_flux_of_log_modulus():
    f = log_modulus(LaurentSeries.monomial(1, 1.0))
    assert abs(circle_integral(f, CirclePath(0j, 0.7), "flux") - 2 * np.pi) < 1e-12


def test_harmonic_conjugate_assembles_holomorphic():
    s = LaurentSeries.polynomial([0.2, 1.0, 0.3j, -0.1])
    u = Chart((-1, 1, -1, 1), 64).sample(lambda z: s(z).real)
    v, path_err = harmonic_conjugate(u)
    h = u.with_values(np.exp(u.values + 1j * v.values))
    r = np.nanmax(np.abs(wirtinger(h, "dzbar").values[4:-4, 4:-4]))
    assert path_err < 1e-8 and r < 1e-5


def test_harmonic_conjugate_rejects_nonharmonic():
    u = Chart((-1, 1, -1, 1), 32).sample(lambda z: np.abs(z) ** 2)
    with pytest.raises(NotHarmonicError):
        harmonic_conjugate(u)


def test_holomorphic_sqrt_squares_back():
    s = LaurentSeries.polynomial([2.0, 0.5, 0.25j])
    r = holomorphic_sqrt(s, 0j)
    z = np.array([0.3 + 0.4j, -0.5, 0.6j])
    assert np.allclose(r(z) ** 2, s(z))
    assert np.allclose(r.derivative()(z), s.derivative()(z) / (2 * r(z)))


def test_grid_field_validation():
    with pytest.raises(ValueError):
        GridField((0, 1, 0, 1), np.zeros((4, 4)))
    with pytest.raises(TypeError):
        as_holomorphic("z")
