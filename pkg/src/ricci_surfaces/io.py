"""JSON metric/function specs and deterministic report writers.

Metric spec::

    {"type": "grid" | "closed-form" | "spinor" | "we",
     "chart": {"rect": [x0, x1, y0, y1], "res": N},
     "payload": {...}}

* ``grid``: ``{"log_factor": [[...], ...]}`` with ``f`` sampled on the chart
  (``values[i][j]`` at ``(x_i, y_j)``), optional ``"log_offset"``.
* ``closed-form``: ``{"log_factor": "<expr in x, y>"}`` or
  ``{"factor": "<expr>"}`` for the length factor ``exp(-f)``.
* ``spinor``: a SpinorPair document, ``we``: a WEData document.

Function spec (virtual measure)::

    {"type": "log-modulus", "h": [[k, re, im], ...], "weight": w}
    {"type": "real-part", "g": [[k, re, im], ...]}
    {"type": "closed-form", "expr": "<expr in x, y>"}

plus optional ``"center": [x, y]`` and ``"radii": [...]``.
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np
import sympy as sp

from .analytic import Chart, GridField, LaurentSeries, PlaneFunction, log_modulus, real_part
from .conformal import ConformalMetric, CurvatureReport
from .spinor import SpinorPair, metric_from_spinor
from .weierstrass import WEData


class SpecError(ValueError):
    """Malformed or inconsistent input document."""


_X, _Y = sp.symbols("x y", real=True)
_LOCALS = {"x": _X, "y": _Y, "pi": sp.pi, "E": sp.E}


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from exc


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, NaN/inf as null."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8", newline="\n")
    return path


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


def parse_expression(text: str):
    """Real expression in ``x, y`` as a vectorized callable of ``z`` with its gradient."""
    if not isinstance(text, str):
        raise SpecError("expression must be a string")
    try:
        expr = sp.sympify(text, locals=_LOCALS)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise SpecError(f"cannot parse expression {text!r}") from exc
    extra = expr.free_symbols - {_X, _Y}
    if extra:
        raise SpecError(f"unknown symbols {sorted(map(str, extra))} in {text!r}")
    fn = sp.lambdify((_X, _Y), expr, "numpy")
    fx = sp.lambdify((_X, _Y), sp.diff(expr, _X), "numpy")
    fy = sp.lambdify((_X, _Y), sp.diff(expr, _Y), "numpy")

    def bcast(f):
        def call(z):
            z = np.asarray(z, dtype=complex)
            with np.errstate(all="ignore"):
                return np.broadcast_to(np.asarray(f(z.real, z.imag), dtype=float), z.shape).copy()
        return call

    return bcast(fn), bcast(fx), bcast(fy)


# --------------------------------------------------------------------------
# Metric specs
# --------------------------------------------------------------------------


def _chart(doc) -> Chart:
    try:
        return Chart.from_json(doc["chart"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError("missing or malformed 'chart'") from exc


def metric_from_spec(doc: dict, res: int | None = None) -> ConformalMetric:
    """Build a metric from a spec document; ``res`` overrides the chart resolution."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError("metric spec needs a 'type'")
    chart = _chart(doc)
    if res is not None:
        chart = chart.refined(res)
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise SpecError("metric spec needs a 'payload' object")
    kind = doc["type"]
    name = doc.get("name", kind)
    try:
        if kind == "grid":
            vals = np.asarray(payload["log_factor"], dtype=float)
            if vals.shape != (chart.n, chart.n):
                raise SpecError(f"grid payload has shape {vals.shape}, chart needs {(chart.n, chart.n)}")
            return ConformalMetric(GridField(chart.rect, vals), None, name, float(payload.get("log_offset", 0.0)))
        if kind == "closed-form":
            if "log_factor" in payload:
                fn, _, _ = parse_expression(payload["log_factor"])
                return ConformalMetric.from_log_factor(fn, chart, name, float(payload.get("log_offset", 0.0)))
            if "factor" in payload:
                fn, _, _ = parse_expression(payload["factor"])
                return ConformalMetric.from_factor(fn, chart, name)
            raise SpecError("closed-form payload needs 'log_factor' or 'factor'")
        if kind == "spinor":
            g = metric_from_spinor(SpinorPair.from_json(payload), chart)
            return ConformalMetric(g.log_factor, g.closed_form, name, g.log_offset)
        if kind == "we":
            we = WEData.from_json(payload)
            return ConformalMetric.from_factor(we.factor, chart, name)
    except (KeyError, TypeError, IndexError) as exc:
        raise SpecError(f"malformed {kind} payload: {exc}") from exc
    raise SpecError(f"unknown metric type {kind!r}")


def metric_spec(kind: str, chart: Chart, payload: dict, name: str = "") -> dict:
    doc = {"type": kind, "chart": chart.to_json(), "payload": payload}
    if name:
        doc["name"] = name
    return doc


# --------------------------------------------------------------------------
# Function specs
# --------------------------------------------------------------------------


def function_from_spec(doc: dict) -> PlaneFunction:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError("function spec needs a 'type'")
    kind = doc["type"]
    try:
        if kind == "log-modulus":
            return log_modulus(LaurentSeries.from_json(doc["h"]), float(doc.get("weight", 1.0)))
        if kind == "real-part":
            return real_part(LaurentSeries.from_json(doc["g"]), float(doc.get("weight", 1.0)))
        if kind == "closed-form":
            fn, fx, fy = parse_expression(doc["expr"])
            return PlaneFunction(fn, lambda z: (fx(z), fy(z)))
    except (KeyError, TypeError, IndexError) as exc:
        raise SpecError(f"malformed {kind} function spec: {exc}") from exc
    raise SpecError(f"unknown function type {kind!r}")


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else repr(float(v))


def curvature_csv(report: CurvatureReport) -> str:
    """Rows ``x, y, K, residual`` over the stencil interior, row-major."""
    K = report.K
    res = report.ricci_residual.values
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "K", "residual"])
    for i, x in enumerate(K.x):
        for j, y in enumerate(K.y):
            k = K.values[i, j]
            if np.isfinite(k) and np.isfinite(res[i, j]):
                w.writerow([_fmt(x), _fmt(y), _fmt(k), _fmt(res[i, j])])
    return buf.getvalue()


def grid_csv(field: GridField, name: str = "value") -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", name])
    for i, x in enumerate(field.x):
        for j, y in enumerate(field.y):
            w.writerow([_fmt(x), _fmt(y), _fmt(field.values[i, j])])
    return buf.getvalue()


def rows_csv(rows: list[dict]) -> str:
    """Flat CSV of a list of dicts with a shared key set (sorted header)."""
    if not rows:
        return ""
    keys = sorted(rows[0])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([_fmt(r[k]) if isinstance(r[k], float) else r[k] for k in keys])
    return buf.getvalue()
