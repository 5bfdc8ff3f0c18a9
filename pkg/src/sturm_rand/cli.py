"""Command-line front end: ``sturm-rand {solve,sample,coupling,experiment}``.

Every command reads a model JSON document and writes one JSON document that
embeds the fully resolved configuration, so rerunning with the same values
reproduces it (apart from ``generated_at``).

Exit status: 0 success, 1 usage or schema error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import sys

from . import __version__
from .coupling import coupling_roots
from .errors import ModelSchemaError, SturmRandError
from .experiments import DEFAULT_EPSILONS, ComparisonSpec, run_experiment
from .model import BumpFunction, build_regular_problem
from .prufer import DEFAULT_GRID, DEFAULT_TOL, eigenvalues_in_window
from .sampling import sample_omega
from .serialize import (coupling_to_dict, dumps, load_model, model_to_dict, omega_to_dict,
                        report_to_dict, spectrum_to_dict, write_records_csv)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, count=None):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} numbers, got {text!r}")
    return vals


def _window(text):
    lo, hi = _floats(text, 2)
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"window needs lo < hi, got {text!r}")
    return lo, hi


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def parse_comparison(text: str) -> ComparisonSpec:
    """``self`` | ``energy:E`` | ``coord:N[:SCALE[:OFFSET]]`` | ``sub:LO,HI[:LEFT,RIGHT]``."""
    head, _, rest = text.partition(":")
    try:
        if head == "self":
            return ComparisonSpec.self_control()
        if head == "energy":
            return ComparisonSpec.fixed_energy(float(rest))
        if head == "coord":
            parts = rest.split(":")
            n = int(parts[0])
            scale = float(parts[1]) if len(parts) > 1 else 1.0
            offset = float(parts[2]) if len(parts) > 2 else 0.0
            return ComparisonSpec.h_of_coordinate(n, scale, offset)
        if head == "sub":
            span, _, angles = rest.partition(":")
            lo, hi = _floats(span, 2)
            left, right = _floats(angles, 2) if angles else (0.0, 0.0)
            return ComparisonSpec.subinterval(lo, hi, left, right)
    except (ValueError, IndexError, argparse.ArgumentTypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad comparison {text!r}: {exc}")
    raise argparse.ArgumentTypeError(f"unknown comparison {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sturm-rand", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, window_default, window_help):
        sp.add_argument("--model", required=True, help="model JSON document")
        sp.add_argument("--out", default="-", help="output path (default: stdout)")
        sp.add_argument("--seed", type=_u64, default=0, help="seed (unsigned 64-bit)")
        sp.add_argument("--tol", type=_positive, default=None)
        sp.add_argument("--window", type=_window, default=window_default, help=window_help)

    s = sub.add_parser("solve", help="eigenpairs of one realization in an energy window")
    common(s, (0.0, 25.0), "energy window lo,hi (write --window=-1,5 for negative lo)")
    s.add_argument("--grid", type=int, default=DEFAULT_GRID,
                   help="eigenfunction samples per eigenpair (0: values only)")

    s = sub.add_parser("sample", help="draw omega from the product measure")
    common(s, None, "unused")

    s = sub.add_parser("coupling", help="coupling set A(E) of one bump")
    common(s, (-50.0, 50.0), "coupling window lo,hi")
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--bump", type=int, default=None,
                   help="index of the coupled bump (default: lowest index)")
    s.add_argument("--angles", type=lambda t: _floats(t, 2), default=None,
                   help="boundary angles theta0,gamma0 on the bump support "
                        "(default: the model's boundary angles)")

    s = sub.add_parser("experiment", help="Monte Carlo coincidence experiment")
    common(s, (0.0, 25.0), "energy window lo,hi")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--eps", type=_floats, default=list(DEFAULT_EPSILONS),
                   help="comma-separated coincidence thresholds")
    s.add_argument("--compare", type=parse_comparison, required=True,
                   help="self | energy:E | coord:N[:SCALE[:OFFSET]] | sub:LO,HI[:LEFT,RIGHT]")
    s.add_argument("--csv", default=None, help="write per-trial records here")
    return p


def _solve(args, model):
    tol = args.tol or DEFAULT_TOL
    omega = sample_omega(model, args.seed)
    H = build_regular_problem(model, omega)
    sw = eigenvalues_in_window(H, *args.window, tol=tol, grid=args.grid or None)
    config = {"seed": args.seed, "tol": tol, "window": list(args.window), "grid": args.grid}
    return config, {"omega": omega_to_dict(omega), "spectrum": spectrum_to_dict(sw)}


def _sample(args, model):
    omega = sample_omega(model, args.seed)
    return {"seed": args.seed}, omega_to_dict(omega)


def _coupling(args, model):
    tol = args.tol or 1e-10
    if not model.bumps:
        raise UsageError("model has no bumps to couple")
    n0 = min(model.index_set) if args.bump is None else args.bump
    if n0 not in model.bumps:
        raise UsageError(f"no bump with index {n0}")
    omega = sample_omega(model, args.seed).replace(n0, 0.0)
    bump: BumpFunction = model.bumps[n0]
    theta0, gamma0 = args.angles if args.angles else (model.left_bc.angle, model.right_bc.angle)
    template = build_regular_problem(model, omega, bump.support, theta0, gamma0,
                                     coupling=(0.0, bump))
    result = coupling_roots(args.energy, args.window, template, tol=tol)
    config = {"seed": args.seed, "tol": tol, "window": list(args.window), "energy": args.energy,
              "bump": n0, "angles": [float(theta0), float(gamma0)],
              "background_omega": omega_to_dict(omega)}
    return config, coupling_to_dict(result)


def _experiment(args, model):
    tol = args.tol or DEFAULT_TOL
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    comparison = args.compare
    try:
        comparison.validate(model)
    except ValueError as exc:
        raise UsageError(str(exc))
    report = run_experiment(model, comparison, args.trials, args.seed, args.eps,
                            args.window, tol)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_records_csv(report.records, report.epsilon_grid, fh)
    config = {"seed": args.seed, "tol": tol, "window": list(args.window),
              "trials": args.trials, "eps": list(report.epsilon_grid),
              "compare": comparison.summary()}
    return config, report_to_dict(report)


_COMMANDS = {"solve": _solve, "sample": _sample, "coupling": _coupling,
             "experiment": _experiment}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        model = load_model(args.model)
        config, result = _COMMANDS[args.command](args, model)
    except (UsageError, ModelSchemaError, OSError) as exc:
        print(f"sturm-rand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SturmRandError as exc:
        print(f"sturm-rand: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    config = {"command": args.command, "model": model_to_dict(model), **config}
    doc = {"command": args.command, "config": config, "result": result,
           "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    text = dumps(doc) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK
