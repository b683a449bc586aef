"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
input errors (unknown names, malformed files, violated input constraints).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gallery
from .conformal import ricci_residual
from .conical import ConeSpec, flat_conical_torus, polygon_gluing
from .errors import PreconditionError
from .io import SpecError, curvature_csv, dumps, function_from_spec, grid_csv, metric_from_spec, read_json, rows_csv
from .logharmonic import virtual_measure

FORMATS = ("json", "csv", "obj")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    res: int | None = None
    order: int = 4
    tol: float = 1e-3
    out: Path | None = None
    formats: tuple = FORMATS

    def __post_init__(self):
        if self.res is not None:
            r = self.res
            if r < 32 or r > 4096 or r & (r - 1):
                raise SpecError(f"--res must be a power of two between 32 and 4096, got {r}")
        if self.order not in (2, 4):
            raise SpecError("--order must be 2 or 4")
        if not self.tol > 0:
            raise SpecError("--tol must be positive")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise SpecError(f"unknown format(s) {sorted(bad)}")


def _formats(values) -> tuple:
    if not values:
        return FORMATS
    out = []
    for v in values:
        out += [s.strip() for s in v.split(",") if s.strip()]
    return tuple(dict.fromkeys(out))


def _emit(cfg: RunConfig, stem: str, report: dict, csv_text: str = "", obj_text: str | None = None, extra: dict | None = None):
    """Write files under ``--out`` (if given) and print the report to stdout."""
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        if "json" in cfg.formats:
            (cfg.out / f"{stem}.report.json").write_text(dumps(report), encoding="utf-8", newline="\n")
            for suffix, doc in (extra or {}).items():
                (cfg.out / f"{stem}.{suffix}.json").write_text(dumps(doc), encoding="utf-8", newline="\n")
        if "csv" in cfg.formats and csv_text:
            (cfg.out / f"{stem}.csv").write_text(csv_text, encoding="utf-8", newline="\n")
        if "obj" in cfg.formats and obj_text is not None:
            (cfg.out / f"{stem}.obj").write_text(obj_text, encoding="utf-8", newline="\n")
    sys.stdout.write(dumps(report))


def cmd_gallery(cfg: RunConfig, name: str, param: str | None) -> int:
    res = gallery.build(name, param, cfg.res, cfg.order, cfg.tol)
    _emit(cfg, res.slug, res.full_report(), res.csv, res.obj, {"metric": res.metric_doc})
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_check_ricci(cfg: RunConfig, path: str) -> int:
    doc = read_json(path)
    g = metric_from_spec(doc, cfg.res)
    rep = ricci_residual(g, cfg.order)
    ok = rep.normalized_residual < cfg.tol and rep.sign_class != "mixed"
    report = {"input": Path(path).name, **rep.summary(), "tol": cfg.tol, "passed": ok}
    _emit(cfg, Path(path).stem, report, curvature_csv(rep))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_virtual_measure(cfg: RunConfig, path: str) -> int:
    doc = read_json(path)
    f = function_from_spec(doc)
    center = complex(*doc.get("center", (0.0, 0.0)))
    radii = tuple(doc.get("radii", (0.5, 0.625, 0.75, 0.875, 1.0)))
    try:
        vm = virtual_measure(f, radii, center, gallery.defaults()["quadrature_m"], tol=cfg.tol)
    except PreconditionError as exc:
        _emit(cfg, Path(path).stem, {"input": Path(path).name, "error": str(exc), "passed": False})
        return EXIT_FAIL
    report = {
        "input": Path(path).name,
        "mu": vm.mu,
        "mu_over_2pi": vm.mu / (2 * np.pi),
        "nu": vm.nu,
        "radii": list(vm.radii),
        "fluxes": list(vm.fluxes),
        "flux_spread": vm.flux_spread,
        "fit_mu": vm.fit_mu,
        "fit_residual": vm.fit_residual,
        "passed": True,
    }
    rows = [{"radius": r, "flux": fl} for r, fl in zip(vm.radii, vm.fluxes)]
    _emit(cfg, Path(path).stem, report, rows_csv(rows))
    return EXIT_OK


def cmd_conical_torus(cfg: RunConfig, path: str) -> int:
    spec = ConeSpec.from_json(read_json(path))
    tcfg = gallery.defaults()["torus"]
    sol = flat_conical_torus(spec, cfg.res or tcfg["res"])
    checks = {
        "solver_residual": sol.solver_residual < tcfg["solver_tol"],
        "curvature_residual": sol.curvature_residual < tcfg["curvature_tol"],
        "cone_angles": all(e < tcfg["cone_angle_rtol"] for e in sol.cone_angle_errors),
    }
    ok = all(checks.values())
    report = {"input": Path(path).name, **sol.report(), "checks": checks, "passed": ok}
    try:
        csv_text = grid_csv(sol.log_factor_grid(), "log_factor")
    except ValueError:
        csv_text = ""
    _emit(cfg, Path(path).stem, report, csv_text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_polygon(cfg: RunConfig, genus: int, alpha: float | None) -> int:
    pg = polygon_gluing(genus, alpha)
    gb_ok = abs(pg.gauss_bonnet_defect) < 1e-12 * max(1.0, pg.cone_angle)
    report = {**pg.report(), "gauss_bonnet_holds": gb_ok, "passed": gb_ok}
    _emit(cfg, f"polygon-g{genus}", report, rows_csv([pg.report()]))
    return EXIT_OK if gb_ok else EXIT_FAIL


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--res", type=int, default=None, help="grid intervals per side (power of two, 32..4096)")
    common.add_argument("--order", type=int, choices=(2, 4), default=None, help="finite-difference stencil order")
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--out", type=Path, default=None, help="output directory for report/CSV/OBJ files")
    common.add_argument("--format", action="append", default=None, help="json, csv, obj (repeatable or comma separated)")

    p = argparse.ArgumentParser(prog="ricci-surfaces", description="Ricci metrics: generation and verification")
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gallery", parents=[common], help="build a named example")
    g.add_argument("name", help=", ".join(gallery.NAMES) + "; parametrized names take n")
    g.add_argument("param", nargs="?", default=None)
    c = sub.add_parser("check-ricci", parents=[common], help="verify the Ricci condition for a metric spec")
    c.add_argument("input")
    v = sub.add_parser("virtual-measure", parents=[common], help="virtual measure of a harmonic function spec")
    v.add_argument("input")
    t = sub.add_parser("conical-torus", parents=[common], help="flat torus with prescribed cone angles")
    t.add_argument("input")
    q = sub.add_parser("polygon", parents=[common], help="equilateral polygon gluing audit")
    q.add_argument("genus", type=int)
    q.add_argument("--alpha", type=float, default=None)
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    d = gallery.defaults()
    default_tol = 1e-6 if args.command == "virtual-measure" else d["tol"]
    try:
        cfg = RunConfig(
            args.command,
            [getattr(args, "input", None)],
            args.res,
            args.order if args.order is not None else d["order"],
            args.tol if args.tol is not None else default_tol,
            args.out,
            _formats(args.format),
        )
        if args.command == "gallery":
            return cmd_gallery(cfg, args.name, args.param)
        if args.command == "check-ricci":
            return cmd_check_ricci(cfg, args.input)
        if args.command == "virtual-measure":
            return cmd_virtual_measure(cfg, args.input)
        if args.command == "conical-torus":
            return cmd_conical_torus(cfg, args.input)
        return cmd_polygon(cfg, args.genus, args.alpha)
    except (SpecError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
