import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_surfaces.analytic import Chart, LaurentSeries
from ricci_surfaces.conformal import gaussian_curvature
from ricci_surfaces.conical import (
    Cone,
    ConeSpec,
    cone_angle_measure,
    conical_spinor_pair,
    critical_points,
    equilateral_side,
    equilateral_side_bruteforce,
    flat_conical_torus,
    polygon_gluing,
    pullback_spherical,
    ricci_from_conical_local,
    riemann_hurwitz_audit,
    smooth_step,
    spherical_cone_local,
    vanishing_order_claim_check,
)
from ricci_surfaces.errors import PreconditionError
from ricci_surfaces.logharmonic import vanishing_order
from ricci_surfaces.spinor import curvature_closed_form

TWO_PI = 2 * np.pi


def two_cones():
    return ConeSpec((Cone(0j, 3 * np.pi), Cone(0.5 + 0.5j, np.pi)))


def test_cone_spec_validation():
    with pytest.raises(ValueError):
        ConeSpec((Cone(0j, -1.0),))
    with pytest.raises(ValueError):
        ConeSpec(background="sphere")
    spec = two_cones()
    assert ConeSpec.from_json(spec.to_json()) == spec
    assert abs(spec.angle_excess) < 1e-15


def test_smooth_step_is_monotone_and_flat_at_ends():
    t = np.linspace(-0.5, 1.5, 401)
    s = smooth_step(t)
    s = s[0] if isinstance(s, tuple) else s
    assert np.all(np.diff(s) >= 0)
    assert np.all(s[t <= 0] == 0) and np.all(s[t >= 1] == 1)


def test_empty_torus_is_flat():
    sol = flat_conical_torus(ConeSpec(), 64)
    assert np.max(np.abs(sol.v)) == 0.0
    assert sol.curvature_residual < 1e-12


def test_two_cone_torus():
    sol = flat_conical_torus(two_cones(), 128)
    assert sol.solver_residual < 1e-10
    assert sol.curvature_residual < 1e-6
    assert all(e < 0.02 for e in sol.cone_angle_errors)
    assert abs(np.mean(sol.v)) < 1e-12


def test_single_cone_torus_is_rejected():
    with pytest.raises(PreconditionError):
        flat_conical_torus(ConeSpec((Cone(0j, 3 * np.pi),)), 64)


def test_cones_too_close_are_rejected():
    spec = ConeSpec((Cone(0j, 3 * np.pi), Cone(0.01 + 0j, np.pi)))
    with pytest.raises(PreconditionError):
        flat_conical_torus(spec, 64)


@pytest.mark.parametrize("n", [0.5, 1, 2, 3, 5])
def test_spherical_cone_angle(n):
    g = spherical_cone_local(n)
    ca = cone_angle_measure(g, 0j)
    # the |z|^(2n) correction biases the fitted slope by O(rmax^(2n))
    assert abs(ca.angle - TWO_PI * n) < 1e-3 * TWO_PI * n


def test_cone_angle_length_convention():
    # |z|^2 |dz|^2 has length factor |z|, circumference 2 pi r^2, angle 4 pi
    ca = cone_angle_measure(lambda z: np.abs(z), 0j)
    assert abs(ca.angle - 4 * np.pi) < 1e-9
    assert abs(cone_angle_measure(lambda z: np.ones(np.shape(z)), 0.3j).angle - TWO_PI) < 1e-9


def test_cone_angle_rejects_non_power_law():
    with pytest.raises(PreconditionError):
        cone_angle_measure(lambda z: np.exp(-1 / np.abs(z)), 0j)


def test_spherical_cone_curvature():
    g = spherical_cone_local(2, Chart((-1.0, 1.0, -1.0, 1.0), 256))
    K = gaussian_curvature(g)
    r = np.abs(K.z)
    band = (r >= 0.25) & (r <= 1) & np.isfinite(K.values)
    assert np.max(np.abs(K.values[band] - 1)) < 1e-4
    n1 = spherical_cone_local(1, Chart((-1.0, 1.0, -1.0, 1.0), 32))
    z = n1.log_factor.z
    assert np.allclose(n1.log_factor.values, np.log((1 + np.abs(z) ** 2) / 2))


@pytest.mark.parametrize("n,model", [(1, "spherical"), (2, "spherical"), (3, "spherical"), (2, "hyperbolic"), (3, "hyperbolic")])
def test_local_ricci_pipeline(n, model):
    g, rep = ricci_from_conical_local(n, model)
    assert rep["spinor_identity"] < 1e-12
    assert rep["flat_residual"] < 1e-6 and rep["model_residual"] < 1e-3
    assert rep["curvature_vs_V2"] < 1e-3
    assert rep["log_singularity_coefficient"] == 0
    if n <= 2:
        assert rep["normalized_ricci_residual"] < 1e-2
    assert np.all(np.isfinite(g.log_factor.values))
    assert rep["sign_class"] in (("nonpositive", "zero") if model == "spherical" else ("nonnegative", "zero"))


@pytest.mark.parametrize("model,half", [("spherical", 0.7), ("hyperbolic", 0.5)])
def test_local_ricci_residual_converges(model, half):
    r = [
        ricci_from_conical_local(3, model, Chart((-half, half, -half, half), res))[1]["normalized_ricci_residual"]
        for res in (128, 256)
    ]
    assert r[1] < 3e-3 and np.log2(r[0] / r[1]) > 3.5


def test_local_n1_curvature_at_center():
    g, rep = ricci_from_conical_local(1, "spherical")
    K0 = gaussian_curvature(g).at(0j)
    # g = (1 + |z|^2)^2 |dz|^2 / 4, K = -V^2 with V(0) = 4
    assert abs(K0 + 16) < 1e-6
    assert "note" in rep


def test_local_n2_vanishing_order():
    K = curvature_closed_form(conical_spinor_pair(2, "spherical"))
    assert vanishing_order(lambda z: -K(z), 0j, 0.25).n == 2


def test_local_pipeline_rejects_bad_n():
    for n in (0, -1, 1.5):
        with pytest.raises(ValueError):
            ricci_from_conical_local(n)


@pytest.mark.parametrize("genus,order", [(1, 0), (2, 8), (3, 16)])
def test_vanishing_order_claim(genus, order):
    rep = vanishing_order_claim_check(genus)
    assert rep["n"] == 4 * genus - 3
    assert rep["measured_order"] == order and rep["agrees"]
    assert rep["integrality_defect"] < 1e-3


def test_pullback_examples():
    chart = Chart((-1.0, 1.0, -1.0, 1.0), 128)
    round_ = pullback_spherical(LaurentSeries.monomial(1, 1.0), chart)
    assert np.allclose(round_.log_factor.values, np.log((1 + np.abs(round_.log_factor.z) ** 2) / 2))
    sq = pullback_spherical(LaurentSeries.monomial(2, 1.0), chart)
    assert abs(cone_angle_measure(sq, 0j).angle - 4 * np.pi) < 1e-6
    K = gaussian_curvature(sq)
    far = (np.abs(K.z) > 0.2) & np.isfinite(K.values)
    assert np.max(np.abs(K.values[far] - 1)) < 1e-3
    with pytest.raises(PreconditionError):
        pullback_spherical(LaurentSeries.constant(2.0), chart)


def test_pullback_cubic_critical_points():
    phi = LaurentSeries.polynomial([0, 1, 0, 1])
    crit = critical_points(phi, Chart((-1.0, 1.0, -1.0, 1.0), 32))
    pts = sorted((c for c, _ in crit), key=lambda c: c.imag)
    assert np.allclose(pts, [-1j / np.sqrt(3), 1j / np.sqrt(3)])
    g = pullback_spherical(phi)
    for c, degree in crit:
        assert degree == 2
        assert abs(cone_angle_measure(g, c).angle - 4 * np.pi) < 1e-5


def test_riemann_hurwitz_examples():
    hyper = riemann_hurwitz_audit([2] * 8, 2, 3)
    assert hyper["riemann_hurwitz_holds"] and hyper["angle_constraint_holds"] and hyper["holds"]
    assert hyper["degree_is_genus_minus_one"]
    torus = riemann_hurwitz_audit([], 1, 1)
    # no branching: the angle constraint 0 = 0 holds, the displayed identity reads 2 = 0
    assert torus["angle_constraint_holds"] and not torus["riemann_hurwitz_holds"]
    bad = riemann_hurwitz_audit([2] * 10, 3, 2)
    assert not bad["degree_is_genus_minus_one"] and not bad["holds"]


@given(st.integers(1, 6), st.integers(1, 6))
def test_riemann_hurwitz_angle_link(genus, degree):
    # the branching that makes the identity hold meets the angle constraint iff degree = genus - 1
    total = 2 * degree + 2 * genus - 2
    rep = riemann_hurwitz_audit([2] * total, degree, genus)
    assert rep["riemann_hurwitz_holds"]
    assert rep["angle_constraint_holds"] == (degree == genus - 1)


@given(st.floats(np.pi / 3 + 1e-3, 5 * np.pi / 3 - 1e-3))
@settings(max_examples=50, deadline=None)
def test_equilateral_side_matches_bruteforce(alpha):
    assert abs(equilateral_side(alpha) - equilateral_side_bruteforce(alpha)) < 1e-9


def test_polygon_examples():
    pg = polygon_gluing(2)
    assert np.isclose(pg.alpha, 5 * np.pi / 9) and np.isclose(pg.cone_angle, 10 * np.pi) and pg.special
    assert pg.vertex_classes == 1 and pg.euler_characteristic == -2
    pg = polygon_gluing(2, np.pi / 2)
    assert np.isclose(pg.cone_angle, 9 * np.pi) and np.isclose(pg.area, 3 * np.pi) and not pg.special
    assert abs(pg.gauss_bonnet_defect) < 1e-12
    for bad in (np.pi / 3, 5 * np.pi / 3):
        with pytest.raises(ValueError):
            polygon_gluing(2, bad)
    with pytest.raises(ValueError):
        polygon_gluing(1)


@given(st.integers(2, 8), st.floats(np.pi / 3 + 1e-6, 5 * np.pi / 3 - 1e-6))
@settings(max_examples=60, deadline=None)
def test_polygon_gauss_bonnet_identity(genus, alpha):
    pg = polygon_gluing(genus, alpha)
    assert abs(pg.gauss_bonnet_defect) < 1e-12 * max(1.0, pg.cone_angle)
    assert pg.euler_characteristic == 2 - 2 * genus
    assert len(pg.triangles) == 4 * genus - 2
    assert math.isclose(pg.cone_angle, 3 * alpha * (4 * genus - 2))
