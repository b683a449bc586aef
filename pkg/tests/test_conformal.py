import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_surfaces.analytic import Chart, LaurentSeries
from ricci_surfaces.conformal import (
    ConformalMetric,
    conformal_power,
    gaussian_curvature,
    log_ricci_residual,
    predicted_power_curvature,
    ricci_from_flat_spherical,
    ricci_residual,
    sign_analysis,
)
from ricci_surfaces.errors import PreconditionError
from ricci_surfaces.spinor import SpinorPair, metric_from_spinor

UNIT = (-1.0, 1.0, -1.0, 1.0)


def round_sphere(c=1.0, res=64):
    # 4|dz|^2 / (c (1+|z|^2)^2) has curvature c
    return ConformalMetric.from_log_factor(lambda z: np.log(np.sqrt(c) * (1 + np.abs(z) ** 2) / 2), Chart(UNIT, res))


def enneper(res=128):
    return metric_from_spinor(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), 1), Chart(UNIT, res))


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_constant_curvature_residual_is_4c3(c):
    rep = ricci_residual(round_sphere(c, 128))
    assert np.allclose(rep.K.values[np.isfinite(rep.K.values)], c, atol=1e-5)
    res = rep.ricci_residual.values
    assert np.allclose(res[np.isfinite(res)], 4 * c**3, rtol=1e-4)


def test_flat_metric_has_zero_curvature():
    g = ConformalMetric.from_log_factor(lambda z: np.log(np.abs(z - 3)), Chart(UNIT, 64))
    assert np.nanmax(np.abs(gaussian_curvature(g).values)) < 1e-6


def test_enneper_curvature_and_residual():
    rep = ricci_residual(enneper(256))
    assert abs(rep.K.at(0j) + 4) < 1e-6
    assert rep.normalized_residual < 1e-3
    assert rep.sign_class == "nonpositive"


def test_ricci_residual_refines():
    r = [ricci_residual(enneper(n)).normalized_residual for n in (64, 128)]
    assert np.log2(r[0] / r[1]) >= 2


def test_log_form_cross_check():
    L = log_ricci_residual(enneper(128))
    assert np.nanmax(np.abs(L.values)) < 1e-3


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
def test_conformal_power_law(r):
    g = enneper(128)
    K = gaussian_curvature(g).values
    Kr = gaussian_curvature(conformal_power(g, r)).values
    assert np.nanmax(np.abs(Kr - predicted_power_curvature(K, r))) < 1e-3


def test_conformal_power_rejects_wrong_sign():
    with pytest.raises(PreconditionError):
        conformal_power(round_sphere(), 0.5)


def test_conformal_power_positive_variant():
    # K(g) >= 0 for the Lorentz family; K g then has curvature -1
    from ricci_surfaces.conical import conical_spinor_pair

    g = metric_from_spinor(conical_spinor_pair(1, "hyperbolic"), Chart((-0.5, 0.5, -0.5, 0.5), 128))
    K1 = gaussian_curvature(conformal_power(g, 1.0, "positive")).values
    assert np.nanmax(np.abs(K1 + 1)) < 1e-3


def test_sign_analysis_cases():
    assert sign_analysis(np.array([1.0, 2.0, -1e-12])) == "nonnegative"
    assert sign_analysis(np.array([-1.0, 0.0])) == "nonpositive"
    assert sign_analysis(np.array([-1.0, 1.0])) == "mixed"
    assert sign_analysis(np.zeros(4)) == "zero"
    assert sign_analysis(np.array([-1.0, 1e-3]), tau=1e-2) == "nonpositive"


@given(
    st.floats(-2, 2),
    st.lists(st.builds(complex, st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=3),
)
@settings(max_examples=20, deadline=None)
def test_harmonic_shift_rescales_curvature(shift, cs):
    """f -> f + u with u harmonic multiplies K by exp(2u)."""
    s = LaurentSeries.polynomial(cs)
    base = lambda z: np.log((1 + np.abs(z) ** 2) / 2)
    u = lambda z: 0.2 * np.real(s(z)) + shift
    chart = Chart(UNIT, 64)
    K0 = gaussian_curvature(ConformalMetric.from_log_factor(base, chart)).values
    K1 = gaussian_curvature(ConformalMetric.from_log_factor(lambda z: base(z) + u(z), chart)).values
    expect = K0 * np.exp(2 * chart.sample(u).values)
    assert np.nanmax(np.abs(K1 - expect) / np.abs(expect)) < 1e-4


@given(st.floats(-5, 5))
@settings(max_examples=20, deadline=None)
def test_log_offset_is_a_constant_shift(c):
    chart = Chart(UNIT, 64)
    f = lambda z: np.log((1 + np.abs(z) ** 2) / 2)
    a = ConformalMetric.from_log_factor(lambda z: f(z) + c, chart)
    b = ConformalMetric.from_log_factor(f, chart, log_offset=c)
    Ka, Kb = gaussian_curvature(a).values, gaussian_curvature(b).values
    assert np.nanmax(np.abs(Ka - Kb) / np.abs(Kb)) < 1e-9
    z = np.array([0.3 + 0.1j])
    assert np.allclose(a.conformal_factor(z), b.conformal_factor(z))


def test_from_factor_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        ConformalMetric.from_factor(lambda z: z.real, Chart(UNIT, 32))


def test_ricci_from_flat_spherical_model():
    chart = Chart((-0.7, 0.7, -0.7, 0.7), 128)
    g_half = ConformalMetric.from_log_factor(lambda z: np.zeros(np.shape(z)), chart)
    V = lambda z: 4 / (1 + np.abs(z) ** 2) ** 2
    g, rep = ricci_from_flat_spherical(V, g_half)
    assert rep["flat_residual"] == 0.0 and rep["model_residual"] < 1e-6
    assert ricci_residual(g).normalized_residual < 1e-4
