"""Named example metrics with their verification checks.

Every entry returns a :class:`GalleryResult` holding the metric (as a spec
document that ``check-ricci`` can read back), a JSON report, a CSV body and,
when an immersion exists, the OBJ mesh text.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .analytic import Chart, LaurentSeries
from .conformal import ConformalMetric, ricci_residual
from .conical import ConeSpec, conical_spinor_pair, flat_conical_torus, ricci_from_conical_local
from .io import SpecError, curvature_csv, grid_csv, metric_spec
from .logharmonic import vanishing_order
from .spinor import SpinorPair, curvature_closed_form, metric_from_spinor, we_from_spinor
from .weierstrass import (
    WEData,
    c_vector,
    fundamental_forms,
    immerse,
    lorentz_immerse,
    mean_curvature_residual,
    obj_text,
    periods,
)

NAMES = ("enneper", "plane", "catenoid", "zn-family", "lorentz-family", "spherical-cone", "conical-torus-demo")
PARAMETRIZED = {"zn-family", "lorentz-family", "spherical-cone"}


@lru_cache(maxsize=1)
def defaults() -> dict:
    return json.loads(resources.files("ricci_surfaces").joinpath("defaults.json").read_text(encoding="utf-8"))


@dataclass
class GalleryResult:
    slug: str
    metric_doc: dict
    report: dict
    checks: dict = field(default_factory=dict)
    csv: str = ""
    obj: str | None = None

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def check(self, name: str, value, threshold, ok: bool) -> None:
        self.checks[name] = {"value": value, "threshold": threshold, "pass": bool(ok)}

    def full_report(self) -> dict:
        return {"name": self.slug, **self.report, "checks": self.checks, "passed": self.passed}


def parse_name(name: str, param: str | None = None) -> tuple[str, int | None]:
    """Split ``zn-family(3)`` or ``("zn-family", "3")`` into name and integer parameter."""
    m = re.fullmatch(r"([a-z-]+)\((\d+)\)", name)
    if m:
        if param is not None:
            raise SpecError("parameter given twice")
        name, param = m.group(1), m.group(2)
    if name not in NAMES:
        raise SpecError(f"unknown gallery name {name!r}; choose from {', '.join(NAMES)}")
    if name in PARAMETRIZED:
        if param is None:
            raise SpecError(f"{name} needs an integer parameter n")
        try:
            n = int(param)
        except ValueError as exc:
            raise SpecError(f"parameter must be an integer, got {param!r}") from exc
        if n < 1:
            raise SpecError("parameter n must be >= 1")
        return name, n
    if param is not None:
        raise SpecError(f"{name} takes no parameter")
    return name, None


def _chart(key: str, res: int) -> Chart:
    return Chart(tuple(defaults()["charts"][key]), res)


def _ricci_checks(out: GalleryResult, g: ConformalMetric, order: int, tol: float, expected_sign: str):
    rep = ricci_residual(g, order)
    out.report["curvature"] = rep.summary()
    out.csv = curvature_csv(rep)
    out.check("normalized_ricci_residual", rep.normalized_residual, tol, rep.normalized_residual < tol)
    out.check("sign_class", rep.sign_class, expected_sign, rep.sign_class in (expected_sign, "zero"))
    return rep


def _mesh_checks(out: GalleryResult, imm, order: int):
    forms = fundamental_forms(imm, order)
    tr = float(np.nanmax(np.abs(mean_curvature_residual(forms).values)))
    tol = defaults()["mean_curvature_tol"]
    out.check("trace_W", tr, tol, tr < tol)
    out.obj = obj_text(imm.points)


def _spinor_entry(slug, p: SpinorPair, chart: Chart, order, tol, sign, mesh: str | None):
    g = metric_from_spinor(p, chart)
    out = GalleryResult(slug, metric_spec("spinor", chart, p.to_json(), slug), {"chart": chart.to_json()})
    rep = _ricci_checks(out, g, order, tol, sign)
    Kc = curvature_closed_form(p)
    K0 = float(Kc(chart.center))
    Kg = float(rep.K.at(chart.center))
    out.report["K_center_closed_form"] = K0
    out.report["K_center_grid"] = Kg
    err = abs(Kg - K0)
    out.check("K_center_grid_vs_closed_form", err, max(rep.tau_sign / 2, 1e-10), err <= max(rep.tau_sign / 2, 1e-10))
    if mesh == "euclidean":
        _mesh_checks(out, immerse(we_from_spinor(p, chart), chart, slug), order)
    elif mesh == "lorentz":
        _mesh_checks(out, lorentz_immerse(p, chart, slug), order)
    return out, Kc


def enneper(res: int, order: int, tol: float) -> GalleryResult:
    p = SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(1, 1.0), 1)
    out, _ = _spinor_entry("enneper", p, _chart("enneper", res), order, tol, "nonpositive", "euclidean")
    return out


def plane(res: int, order: int, tol: float) -> GalleryResult:
    chart = _chart("plane", res)
    p = SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.polynomial([0.0]), 1)
    g = metric_from_spinor(p, chart)
    out = GalleryResult("plane", metric_spec("spinor", chart, p.to_json(), "plane"), {"chart": chart.to_json()})
    rep = _ricci_checks(out, g, order, tol, "zero")
    kmax = float(np.nanmax(np.abs(rep.K.values)))
    out.check("K_identically_zero", kmax, 0.0, kmax == 0.0)
    _mesh_checks(out, immerse(WEData(LaurentSeries.constant(1.0), LaurentSeries.polynomial([0.0])), chart, "plane"), order)
    return out


def catenoid_data() -> WEData:
    """``alpha = i / (2 z^2)``, ``beta = z``: the third component ``-1/z`` has a real residue."""
    return WEData(LaurentSeries.monomial(-2, 0.5j), LaurentSeries.monomial(1, 1.0))


def catenoid(res: int, order: int, tol: float) -> GalleryResult:
    chart = _chart("catenoid", res)
    we = catenoid_data()
    g = ConformalMetric.from_factor(we.factor, chart, "catenoid")
    out = GalleryResult("catenoid", metric_spec("we", chart, we.to_json(), "catenoid"), {"chart": chart.to_json()})
    per = periods(c_vector(we), 0j, 1.0, defaults()["quadrature_m"])
    out.report["periods"] = per.tolist()
    pmax = float(np.max(np.abs(per)))
    out.check("periods_vanish", pmax, defaults()["period_tol"], pmax < defaults()["period_tol"])
    _ricci_checks(out, g, order, tol, "nonpositive")
    _mesh_checks(out, immerse(we, chart, "catenoid"), order)
    return out


def zn_family(n: int, res: int, order: int, tol: float) -> GalleryResult:
    p = SpinorPair(LaurentSeries.constant(1.0), LaurentSeries.monomial(n, 1.0), 1)
    chart = _chart("zn-family", res)
    out, Kc = _spinor_entry(f"zn-family-{n}", p, chart, order, tol, "nonpositive", "euclidean")
    vo = vanishing_order(lambda z: -Kc(z), 0j, defaults()["vanishing_order_radius"])
    out.report["vanishing_order"] = {"measured": vo.n, "expected": 2 * n - 2, "integrality_defect": vo.defect}
    out.check("vanishing_order", vo.n, 2 * n - 2, vo.n == 2 * n - 2)
    return out


def lorentz_family(n: int, res: int, order: int, tol: float) -> GalleryResult:
    p = conical_spinor_pair(n, "hyperbolic")
    out, _ = _spinor_entry(f"lorentz-family-{n}", p, _chart("lorentz-family", res), order, tol, "nonnegative", "lorentz")
    return out


def spherical_cone(n: int, res: int, order: int, tol: float) -> GalleryResult:
    chart = _chart("spherical-cone", res)
    g, rep = ricci_from_conical_local(n, "spherical", chart, order, defaults()["spherical_cone_exclusion"], tol)
    payload = {"log_factor": f"-log(1 + (x**2 + y**2)**{n})", "log_offset": float(np.log(2 * n))}
    slug = f"spherical-cone-{n}"
    out = GalleryResult(slug, metric_spec("closed-form", chart, payload, slug), {"chart": chart.to_json(), "construction": rep})
    out.check("spinor_identity", rep["spinor_identity"], 1e-12, rep["spinor_identity"] < 1e-12)
    _ricci_checks(out, g, order, tol, "nonpositive")
    return out


def conical_torus_demo(res: int | None = None) -> GalleryResult:
    cfg = defaults()["torus"]
    spec = ConeSpec.from_json(cfg["demo"])
    sol = flat_conical_torus(spec, res or cfg["res"])
    lf = sol.log_factor_grid()
    doc = {
        "type": "grid",
        "chart": {"rect": list(lf.rect), "res": lf.nx - 1},
        "payload": {"log_factor": lf.values},
        "name": "conical-torus-demo",
        "cone_spec": spec.to_json(),
    }
    out = GalleryResult("conical-torus-demo", doc, {"solution": sol.report()})
    out.csv = grid_csv(lf, "log_factor")
    out.check("solver_residual", sol.solver_residual, cfg["solver_tol"], sol.solver_residual < cfg["solver_tol"])
    out.check("curvature_residual", sol.curvature_residual, cfg["curvature_tol"], sol.curvature_residual < cfg["curvature_tol"])
    worst = float(max(sol.cone_angle_errors))
    out.check("cone_angles", worst, cfg["cone_angle_rtol"], worst < cfg["cone_angle_rtol"])
    return out


def build(name: str, param=None, res: int | None = None, order: int | None = None, tol: float | None = None) -> GalleryResult:
    d = defaults()
    name, n = parse_name(name, None if param is None else str(param))
    res = d["res"] if res is None else res
    order = d["order"] if order is None else order
    tol = d["tol"] if tol is None else tol
    if name == "enneper":
        return enneper(res, order, tol)
    if name == "plane":
        return plane(res, order, tol)
    if name == "catenoid":
        return catenoid(res, order, tol)
    if name == "zn-family":
        return zn_family(n, res, order, tol)
    if name == "lorentz-family":
        return lorentz_family(n, res, order, tol)
    if name == "spherical-cone":
        return spherical_cone(n, res, order, tol)
    return conical_torus_demo(res if res != d["res"] else None)
