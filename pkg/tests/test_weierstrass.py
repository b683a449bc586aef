import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_surfaces.analytic import Chart, LaurentSeries, d2_dx2
from ricci_surfaces.conformal import gaussian_curvature
from ricci_surfaces.errors import PreconditionError
from ricci_surfaces.gallery import catenoid_data
from ricci_surfaces.spinor import SpinorPair, curvature_closed_form, metric_from_spinor
from ricci_surfaces.weierstrass import (
    WEData,
    c_vector,
    curvature_via_detW,
    export_mesh,
    fundamental_forms,
    hopf_h,
    hopf_h_grid,
    immerse,
    isothermal_residual,
    isotropy,
    lorentz_immerse,
    mean_curvature_residual,
    obj_text,
    orthogonality_residuals,
    periods,
)

UNIT = Chart((-1.0, 1.0, -1.0, 1.0), 64)
cplx = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def enneper():
    return WEData(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0))


def interior(a, k=4):
    return a[k:-k, k:-k]


def test_c_vector_examples():
    C = c_vector(enneper())
    assert C[0].as_dict() == {0: 1, 2: 1}
    assert C[1].as_dict() == {0: 1j, 2: -1j}
    assert C[2].as_dict() == {1: 2j}
    plane = c_vector(WEData(LaurentSeries.constant(1.0), LaurentSeries.constant(0.0)))
    assert [c[0] for c in plane] == [1, 1j, 0]


@given(st.lists(cplx, min_size=1, max_size=4), st.lists(cplx, min_size=1, max_size=4))
@settings(max_examples=100, deadline=None)
def test_isotropy_is_exact(ca, cb):
    a = LaurentSeries.polynomial(ca)
    if a.is_zero:
        a = LaurentSeries.constant(1.0)
    iso = isotropy(c_vector(WEData(a, LaurentSeries.polynomial(cb))))
    scale = 1 + max(abs(c) for c in ca + cb) ** 6
    assert max((abs(v) for v in iso.as_dict().values()), default=0) < 1e-12 * scale


@given(st.lists(cplx, min_size=1, max_size=3), st.lists(cplx, min_size=1, max_size=3))
@settings(max_examples=30, deadline=None)
def test_pairing_with_conjugate_is_twice_the_factor(ca, cb):
    a = LaurentSeries.polynomial(ca)
    if a.is_zero:
        a = LaurentSeries.constant(1.0)
    we = WEData(a, LaurentSeries.polynomial(cb))
    z = np.array([0.3 + 0.2j, -0.7j, 0.5])
    Cz = np.stack([s(z) for s in c_vector(we)])
    assert np.allclose(np.sum(Cz * np.conj(Cz), axis=0), 2 * we.factor(z) ** 2)


@pytest.mark.parametrize(
    "alpha,beta,h",
    [
        ([1.0], [0, 1.0], {0: -2j}),
        ([1.0], [0.0], {}),
        ([0, 1.0], [0, 0, 1.0], {2: -4j}),
    ],
)
def test_hopf_differential_examples(alpha, beta, h):
    got = hopf_h(WEData(LaurentSeries.polynomial(alpha), LaurentSeries.polynomial(beta))).as_dict()
    assert {k: v for k, v in got.items() if v != 0} == h


def test_enneper_three_way_curvature():
    chart = Chart((-1.0, 1.0, -1.0, 1.0), 128)
    forms = fundamental_forms(immerse(enneper(), chart))
    Kw = curvature_via_detW(forms)
    Kc = gaussian_curvature(metric_from_spinor(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), 1), chart))
    Ks = chart.sample(curvature_closed_form(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), 1)))
    assert abs(Kw.at(0j) + 4) < 1e-5
    assert abs(Kw.at(0.5 + 0j) + 4 / 1.25**4) < 1e-4
    assert np.nanmax(np.abs(Kw.values - Ks.values)) < 1e-3
    assert np.nanmax(np.abs(Kc.values - Ks.values)) < 1e-3
    assert abs(forms.factor_sq[64, 64] - 1) < 1e-10


def test_enneper_is_minimal_and_isothermal():
    forms = fundamental_forms(immerse(enneper(), Chart((-1.0, 1.0, -1.0, 1.0), 128)))
    H = mean_curvature_residual(forms).values
    assert np.nanmax(np.abs(H)) < 1e-3
    assert isothermal_residual(forms) < 1e-6
    h = hopf_h_grid(forms).values
    assert np.nanmax(np.abs(interior(h) + 2j)) < 1e-3


def test_plane_has_zero_curvature():
    we = WEData(LaurentSeries.constant(1.0), LaurentSeries.constant(0.0))
    K = curvature_via_detW(fundamental_forms(immerse(we, UNIT))).values
    assert np.nanmax(np.abs(K)) < 1e-10


def test_harmonic_coordinates_converge():
    errs = []
    for n in (32, 64):
        imm = immerse(enneper(), Chart((-1.0, 1.0, -1.0, 1.0), n))
        h = 2 / n
        lap = d2_dx2(imm.points, h, 0, 2) + d2_dx2(imm.points, h, 1, 2)
        errs.append(np.nanmax(np.abs(lap)))
    assert errs[1] < 1e-10 or errs[0] / errs[1] > 3


def test_orthogonality_relations():
    for we in (enneper(), WEData(LaurentSeries.polynomial([1.0, 0.2]), LaurentSeries.polynomial([0.1, 0.5, 0.3j]))):
        r = orthogonality_residuals(we, Chart((-0.8, 0.8, -0.8, 0.8), 128))
        assert r["isotropy"] < 1e-12 and r["C_dot_Cprime"] < 1e-12
        assert r["conjugate_relation"] < 1e-5


def test_catenoid_periods_and_immersion():
    we = catenoid_data()
    C = c_vector(we)
    assert np.max(np.abs(periods(C, 0j, 1.0))) < 1e-12
    imm = immerse(we, Chart((0.5, 1.5, -0.5, 0.5), 64))
    K = curvature_via_detW(fundamental_forms(imm)).values
    assert np.nanmax(K) <= 1e-8


def test_imaginary_residue_is_rejected():
    we = WEData(LaurentSeries.monomial(-2, 0.5), LaurentSeries.monomial(1, 1.0))
    with pytest.raises(PreconditionError, match="third component"):
        immerse(we, Chart((0.5, 1.5, -0.5, 0.5), 32))


def test_lorentz_induced_metric():
    p = SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), -1)
    chart = Chart((-0.53, 0.53, -0.53, 0.53), 128)  # inside |z| <= 3/4
    imm = lorentz_immerse(p, chart)
    assert imm.is_lorentz
    forms = fundamental_forms(imm)
    z = chart.sample(lambda w: w).values
    expected = (1 - np.abs(z) ** 2) ** 2
    assert np.nanmax(np.abs(forms.factor_sq - expected)) < 1e-6
    ok = np.isfinite(forms.factor_sq)
    assert np.allclose(forms.factor_sq[ok], 1 / metric_from_spinor(p, chart).e2f()[ok], atol=1e-6)
    assert np.nanmax(np.abs(mean_curvature_residual(forms).values)) < 1e-3
    assert isothermal_residual(forms) < 1e-6


def test_lorentz_plane_and_errors():
    imm = lorentz_immerse(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.constant(0.0), -1), UNIT)
    assert np.allclose(imm.points[..., 2], 0)
    with pytest.raises(PreconditionError):
        lorentz_immerse(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), -1), UNIT)
    with pytest.raises(ValueError):
        lorentz_immerse(SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), 1), UNIT)


def _counts(text):
    lines = text.splitlines()
    return sum(l.startswith("v ") for l in lines), sum(l.startswith("f ") for l in lines)


def test_obj_counts(tmp_path):
    assert _counts(obj_text(np.zeros((2, 2, 3)))) == (4, 2)
    imm = immerse(enneper(), UNIT)
    path = export_mesh(imm, tmp_path / "enneper.obj")
    text = path.read_text()
    assert _counts(text) == (4225, 8192)
    faces = [tuple(map(int, l.split()[1:])) for l in text.splitlines() if l.startswith("f ")]
    assert min(min(f) for f in faces) == 1 and max(max(f) for f in faces) == 4225


def test_we_json_roundtrip():
    we = catenoid_data()
    back = WEData.from_json(we.to_json())
    assert back.alpha.coeffs == we.alpha.coeffs and back.beta.coeffs == we.beta.coeffs
