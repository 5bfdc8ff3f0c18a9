"""JSON documents for models and results, CSV for per-trial records.

Model schema::

    {
      "interval": [a, b],               # may be infinite (null or +-Infinity)
      "truncation": [lo, hi],           # finite working interval; required if (a, b) is not
      "base_potential": {"kind": "zero" | "constant" | "piecewise_linear" | "tabulated", ...},
      "bumps": [{"n": 0, "support": [c, d], "shape": "indicator", "amplitude": 1.0}, ...],
      "distributions": [{"n": 0, "kind": "uniform", "params": {"lo": 0, "hi": 1}}, ...],
      "boundary": {"left_angle": 0.0, "right_angle": 0.0}
    }

Infinite floats are written as ``null`` so every document is strict JSON.
"""

from __future__ import annotations

import csv
import json
import math
from numbers import Real

import numpy as np

from .coupling import CouplingSetResult
from .distributions import KINDS, DistributionSpec
from .errors import ModelSchemaError
from .experiments import QUANTILE_LEVELS, ExperimentReport, TrialRecord
from .model import (SHAPES, BasePotential, BoundaryAngle, BumpFunction, Interval, OmegaSample,
                    RandomPotentialModel)
from .prufer import Eigenpair, SpectrumWindow


def _num(value, where, allow_inf=False):
    if value is None and allow_inf:
        return None
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ModelSchemaError(where, f"expected a number, got {value!r}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ModelSchemaError(where, f"expected a finite number, got {value!r}")
    return value


def _pair(value, where, allow_inf=False):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ModelSchemaError(where, f"expected a two-element list, got {value!r}")
    return (_num(value[0], f"{where}[0]", allow_inf), _num(value[1], f"{where}[1]", allow_inf))


def _obj(value, where):
    if not isinstance(value, dict):
        raise ModelSchemaError(where, f"expected an object, got {type(value).__name__}")
    return value


def _get(d, key, where):
    if key not in d:
        raise ModelSchemaError(f"{where}.{key}" if where else key, "missing required field")
    return d[key]


def finite_or_none(x):
    return None if x is None or math.isinf(x) else float(x)


def none_to_inf(x, sign=1.0):
    return sign * math.inf if x is None else float(x)


# -- model --------------------------------------------------------------------

def _base_from(d):
    d = _obj(d, "base_potential")
    kind = _get(d, "kind", "base_potential")
    try:
        if kind == "zero":
            return BasePotential.zero()
        if kind == "constant":
            return BasePotential.constant(_num(_get(d, "value", "base_potential"),
                                               "base_potential.value"))
        if kind == "piecewise_linear":
            pts = _get(d, "breakpoints", "base_potential")
            if not isinstance(pts, list):
                raise ModelSchemaError("base_potential.breakpoints", "expected a list")
            return BasePotential.piecewise_linear(
                [_pair(p, f"base_potential.breakpoints[{i}]") for i, p in enumerate(pts)])
        if kind == "tabulated":
            grid = _get(d, "grid", "base_potential")
            vals = _get(d, "values", "base_potential")
            if not isinstance(grid, list) or not isinstance(vals, list):
                raise ModelSchemaError("base_potential.grid", "grid and values must be lists")
            return BasePotential.tabulated(
                [_num(g, f"base_potential.grid[{i}]") for i, g in enumerate(grid)],
                [_num(v, f"base_potential.values[{i}]") for i, v in enumerate(vals)])
    except ValueError as exc:
        if isinstance(exc, ModelSchemaError):
            raise
        raise ModelSchemaError("base_potential", str(exc)) from exc
    raise ModelSchemaError("base_potential.kind", f"unknown kind {kind!r}")


def _base_to(base: BasePotential):
    if base.kind == "zero":
        return {"kind": "zero"}
    if base.kind == "constant":
        return {"kind": "constant", "value": base.value}
    if base.kind == "piecewise_linear":
        return {"kind": "piecewise_linear", "breakpoints": [list(p) for p in base.points]}
    return {"kind": "tabulated", "grid": [x for x, _ in base.points],
            "values": [v for _, v in base.points]}


def _dist_from(d, where):
    d = _obj(d, where)
    kind = _get(d, "kind", where)
    if kind not in KINDS:
        raise ModelSchemaError(f"{where}.kind", f"unknown distribution kind {kind!r}")
    params = _obj(d.get("params", {}), f"{where}.params")
    try:
        if kind in ("uniform", "cantor"):
            return DistributionSpec(kind, {
                "lo": _num(_get(params, "lo", f"{where}.params"), f"{where}.params.lo"),
                "hi": _num(_get(params, "hi", f"{where}.params"), f"{where}.params.hi")})
        if kind == "gaussian":
            return DistributionSpec.gaussian(
                _num(_get(params, "mean", f"{where}.params"), f"{where}.params.mean"),
                _num(_get(params, "sd", f"{where}.params"), f"{where}.params.sd"))
        pts = _get(params, "points", f"{where}.params")
        if not isinstance(pts, list):
            raise ModelSchemaError(f"{where}.params.points", "expected a list")
        return DistributionSpec.atomic(
            [_pair(p, f"{where}.params.points[{i}]") for i, p in enumerate(pts)])
    except ValueError as exc:
        if isinstance(exc, ModelSchemaError):
            raise
        raise ModelSchemaError(f"{where}.params", str(exc)) from exc


def _dist_to(spec: DistributionSpec):
    params = dict(spec.params)
    if spec.kind == "atomic":
        params["points"] = [list(p) for p in params["points"]]
    return {"kind": spec.kind, "params": params}


def _index(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelSchemaError(where, f"expected an integer, got {value!r}")
    return value


def model_from_dict(doc) -> RandomPotentialModel:
    """Validate and build a model; errors name the offending field."""
    doc = _obj(doc, "model")
    a, b = _pair(_get(doc, "interval", ""), "interval", allow_inf=True)
    a = -math.inf if a is None else a
    b = math.inf if b is None else b
    if not a < b:
        raise ModelSchemaError("interval", f"needs a < b, got ({a}, {b})")
    if "truncation" in doc:
        lo, hi = _pair(doc["truncation"], "truncation")
        if not (a <= lo < hi <= b):
            raise ModelSchemaError("truncation", f"({lo}, {hi}) must be an increasing "
                                                 f"subinterval of ({a}, {b})")
    elif math.isinf(a) or math.isinf(b):
        raise ModelSchemaError("truncation", "required when the interval is unbounded")
    else:
        lo, hi = a, b
    base = _base_from(doc.get("base_potential", {"kind": "zero"}))

    bumps_doc = _get(doc, "bumps", "")
    if not isinstance(bumps_doc, list):
        raise ModelSchemaError("bumps", "expected a list")
    bumps = {}
    for i, bd in enumerate(bumps_doc):
        where = f"bumps[{i}]"
        bd = _obj(bd, where)
        n = _index(_get(bd, "n", where), f"{where}.n")
        if n in bumps:
            raise ModelSchemaError(f"{where}.n", f"duplicate index {n}")
        c, d = _pair(_get(bd, "support", where), f"{where}.support")
        shape = bd.get("shape", "indicator")
        if shape not in SHAPES:
            raise ModelSchemaError(f"{where}.shape", f"unknown shape {shape!r}")
        amp = _num(bd.get("amplitude", 1.0), f"{where}.amplitude")
        try:
            bumps[n] = BumpFunction(Interval(c, d), shape, amp)
        except ValueError as exc:
            raise ModelSchemaError(where, str(exc)) from exc

    dists_doc = _get(doc, "distributions", "")
    if not isinstance(dists_doc, list):
        raise ModelSchemaError("distributions", "expected a list")
    dists = {}
    for i, dd in enumerate(dists_doc):
        where = f"distributions[{i}]"
        n = _index(_get(_obj(dd, where), "n", where), f"{where}.n")
        if n in dists:
            raise ModelSchemaError(f"{where}.n", f"duplicate index {n}")
        dists[n] = _dist_from(dd, where)

    bnd = _obj(doc.get("boundary", {}), "boundary")
    left = _num(bnd.get("left_angle", 0.0), "boundary.left_angle")
    right = _num(bnd.get("right_angle", 0.0), "boundary.right_angle")
    try:
        return RandomPotentialModel(Interval(lo, hi), bumps, dists, base,
                                    BoundaryAngle(left), BoundaryAngle(right), (a, b))
    except ValueError as exc:
        field = "bumps" if "bump" in str(exc) or "index" in str(exc) else "model"
        raise ModelSchemaError(field, str(exc)) from exc


def model_to_dict(model: RandomPotentialModel) -> dict:
    a, b = model.domain
    return {
        "interval": [finite_or_none(a), finite_or_none(b)],
        "truncation": [model.interval.lo, model.interval.hi],
        "base_potential": _base_to(model.base),
        "bumps": [{"n": n, "support": [f.support.lo, f.support.hi], "shape": f.shape,
                   "amplitude": f.amplitude} for n, f in model.bumps.items()],
        "distributions": [{"n": n, **_dist_to(d)} for n, d in model.distributions.items()],
        "boundary": {"left_angle": model.left_bc.angle, "right_angle": model.right_bc.angle},
    }


def load_model(path) -> RandomPotentialModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelSchemaError("model", f"invalid JSON: {exc}") from exc
    return model_from_dict(doc)


# -- results ------------------------------------------------------------------

def omega_to_dict(omega: OmegaSample) -> dict:
    return {"seed": omega.seed, "values": {str(n): v for n, v in omega.values.items()}}


def omega_from_dict(d) -> OmegaSample:
    return OmegaSample({int(n): float(v) for n, v in d["values"].items()}, d.get("seed"))


def spectrum_to_dict(sw: SpectrumWindow) -> dict:
    pairs = []
    for p in sw.pairs:
        entry = {"index": p.index, "value": p.value}
        if p.x is not None:
            entry.update(x=p.x.tolist(), u=p.u.tolist(), du=p.du.tolist())
        pairs.append(entry)
    return {"window": list(sw.window), "values": [p.value for p in sw.pairs], "eigenpairs": pairs}


def spectrum_from_dict(d) -> SpectrumWindow:
    pairs = []
    for e in d["eigenpairs"]:
        arrays = [np.array(e[k]) for k in ("x", "u", "du")] if "x" in e else [None] * 3
        pairs.append(Eigenpair(int(e["index"]), float(e["value"]), *arrays))
    return SpectrumWindow(tuple(pairs), tuple(d["window"]))


def coupling_to_dict(r: CouplingSetResult) -> dict:
    return {"energy": r.energy, "window": list(r.window), "roots": list(r.roots),
            "brackets": [list(b) for b in r.brackets], "min_gap": finite_or_none(r.min_gap),
            "tol": r.tol}


def coupling_from_dict(d) -> CouplingSetResult:
    return CouplingSetResult(float(d["energy"]), tuple(d["window"]), tuple(d["roots"]),
                             tuple(tuple(b) for b in d["brackets"]), none_to_inf(d["min_gap"]),
                             float(d.get("tol", 1e-10)))


def report_to_dict(r: ExperimentReport) -> dict:
    return {
        "spec": r.spec,
        "trials": r.trials,
        "master_seed": r.master_seed,
        "epsilon_grid": list(r.epsilon_grid),
        "coincidence_rate": list(r.coincidence_rate),
        "quantile_levels": list(QUANTILE_LEVELS),
        "gap_quantiles": [finite_or_none(q) for q in r.gap_quantiles],
        "failures": [{"trial": t, "seed": s, "error": e} for t, s, e in r.failures],
    }


def report_from_dict(d) -> ExperimentReport:
    return ExperimentReport(d["spec"], int(d["trials"]), tuple(d["epsilon_grid"]),
                            tuple(d["coincidence_rate"]),
                            tuple(none_to_inf(q) for q in d["gap_quantiles"]),
                            int(d["master_seed"]),
                            tuple((f["trial"], f["seed"], f["error"]) for f in d["failures"]))


def eps_label(eps: float) -> str:
    """``1e-2`` style label used in CSV column names."""
    mant, exp = f"{eps:e}".split("e")
    mant = mant.rstrip("0").rstrip(".")
    return f"{mant}e{int(exp)}"


def write_records_csv(records, epsilon_grid, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["trial", "seed", "min_gap"] + [f"coinc_{eps_label(e)}" for e in epsilon_grid])
    for r in records:
        w.writerow([r.trial, r.seed, repr(r.min_gap)]
                   + [int(r.coincidence(e)) for e in epsilon_grid])


def read_records_csv(fh):
    rows = list(csv.DictReader(fh))
    return [TrialRecord(int(r["trial"]), int(r["seed"]), float(r["min_gap"])) for r in rows]


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False)
