"""Command-line entry point: ``csci ci | simulate | plan-m | rerun``.

Every output file gets a ``<output>.manifest.json`` next to it recording the
resolved configuration, input digest and versions; ``csci rerun`` replays a
manifest. Errors go to stderr as one ``error: <kind>: <message>`` line.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from ._accel import backend
from .data_model import DataError, read_sample
from .length_planner import PlannerInput, m_min_search, planner_grid
from .monotone_adjust import AdjustmentPlan, check_combination
from .npmle import npmle_fit
from .pipeline import MethodSpec, method_curve, parse_method
from .sim_harness import SimConfig, run_coverage
from .valid_ci import default_m

CI_COLUMNS = ("t", "npmle", "lower", "upper", "method")
PLAN_COLUMNS = ("n", "F", "r", "level", "m_min", "e_ratio", "ceil_n23")

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4


class CliError(Exception):
    def __init__(self, kind, message, code=EXIT_USAGE):
        super().__init__(message)
        self.kind = kind
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return str(x)


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _emit(text, output, manifest):
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(output + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise CliError("io", f"cannot write {output}: {exc.strerror}", EXIT_IO) from None


def _manifest(command, config, input_path=None, seed=None, extra=None):
    out = {
        "subcommand": command,
        "config": config,
        "input": os.path.abspath(input_path) if input_path else None,
        "input_sha256": _sha256(input_path) if input_path else None,
        "seed": seed,
        "version": __version__,
        "backend": backend(),
        "numpy": np.__version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        out.update(extra)
    return out


def _int_or_auto(text):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {text!r}") from None


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# --------------------------------------------------------------------------
# ci


def _read_grid(path, s):
    if path == "support":
        return s.support()
    vals = []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header] != ["time"]:
                raise CliError("data", f"{path}: line 1: grid file header must be 'time'", EXIT_DATA)
            for lineno, row in enumerate(reader, start=2):
                if not row or not row[0].strip():
                    continue
                try:
                    vals.append(float(row[0]))
                except ValueError:
                    raise CliError("data", f"{path}: line {lineno}: time is not a number", EXIT_DATA) from None
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    grid = np.unique(np.asarray(vals, dtype=np.float64))
    if grid.size == 0:
        raise CliError("data", f"{path}: grid file has no times", EXIT_DATA)
    if not np.all(np.isfinite(grid)) or grid[0] < 0:
        raise CliError("data", f"{path}: grid times must be finite and nonnegative", EXIT_DATA)
    return grid


def _ci_methods(args):
    variant = {"cp": "clopper_pearson", "midp": "mid_p"}[args.variant]
    specs = []
    for name in args.method or ["valid", "abf-cp-lu", "abf-midp-mv"]:
        if name == "abf":
            plan = AdjustmentPlan.parse(args.adjust)
            check_combination(variant, plan, args.override)
            label = "abf-" + args.variant + "-" + ("+".join(plan.steps) or "raw")
            specs.append(MethodSpec(label, "abf", variant, plan))
        else:
            specs.append(parse_method(name, args.override))
    if any(s.kind == "lrt" for s in specs) and args.lrt_critical is None:
        raise CliError("usage", "method lrt requires --lrt-critical")
    return specs


def cmd_ci(args):
    specs = _ci_methods(args)
    try:
        s = read_sample(args.input, args.format)
    except OSError as exc:
        raise CliError("io", f"cannot read {args.input}: {exc.strerror}", EXIT_IO) from None
    grid = _read_grid(args.grid, s)
    F_step = npmle_fit(s)
    est = np.asarray(F_step(grid), dtype=np.float64).reshape(grid.shape)
    rows = []
    meta = {}
    for spec in specs:
        cur = method_curve(s, spec, grid, args.level, args.m, args.m_dagger, args.lrt_critical,
                           args.override, F_step)
        for t, f, lo, hi in zip(grid.tolist(), est.tolist(), cur.lower.tolist(), cur.upper.tolist()):
            rows.append((t, f, lo, hi, spec.name))
        meta[spec.name] = {k: v for k, v in cur.meta.items() if not isinstance(v, np.ndarray)}
    manifest = _manifest(
        "ci", _config(args), args.input,
        extra={"n": s.n, "resolved_m": default_m(s.n) if args.m == "auto" else args.m,
               "lrt_critical": args.lrt_critical, "method_meta": meta},
    )
    _emit(_csv_text(CI_COLUMNS, rows), args.output, manifest)


# --------------------------------------------------------------------------
# simulate / plan-m


def cmd_simulate(args):
    cfg = SimConfig(
        scenario=args.scenario, n=args.n, reps=args.reps, level=args.level,
        methods=tuple(args.method or ["valid"]), eval_q=args.eval_q, seed=args.seed,
        m=args.m, m_dagger=args.m_dagger, lrt_critical=args.lrt_critical, override=args.override,
    )
    res = run_coverage(cfg, threads=args.threads)
    buf = io.StringIO()
    res.write_csv(buf)
    manifest = _manifest("simulate", _config(args), seed=args.seed, extra={"notes": res.meta})
    _emit(buf.getvalue(), args.output, manifest)


def cmd_plan_m(args):
    if args.grid_all:
        rows = [(n, F, r, args.level, m, ratio, c) for n, F, r, m, ratio, c in
                planner_grid(args.level, m_max=args.m_max)]
    else:
        if args.n is None or args.F is None or args.r is None:
            raise CliError("usage", "plan-m needs --n, --F and --r (or --grid-all)")
        inp = PlannerInput(args.n, args.F, args.r, args.level)
        m, ratio = m_min_search(inp, args.m_max)
        rows = [(args.n, args.F, args.r, args.level, m, ratio, default_m(args.n))]
    _emit(_csv_text(PLAN_COLUMNS, rows), args.output, _manifest("plan-m", _config(args)))


# --------------------------------------------------------------------------
# rerun


def cmd_rerun(args):
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("io", f"cannot load manifest {args.manifest}: {exc}", EXIT_IO) from None
    if manifest.get("input") and manifest.get("input_sha256") != _sha256(manifest["input"]):
        raise CliError("data", f"input {manifest['input']} changed since the manifest was written", EXIT_DATA)
    cfg = dict(manifest["config"])
    if args.output is not None:
        cfg["output"] = args.output
    replay = argparse.Namespace(**cfg)
    if manifest.get("input"):
        replay.input = manifest["input"]
    replay.threads = args.threads
    COMMANDS[manifest["subcommand"]](replay)


COMMANDS = {"ci": cmd_ci, "simulate": cmd_simulate, "plan-m": cmd_plan_m, "rerun": cmd_rerun}

_NOT_CONFIG = {"func", "threads"}


def _config(args):
    return {k: (list(v) if isinstance(v, tuple) else v)
            for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def build_parser():
    p = _Parser(prog="csci", description="Pointwise confidence intervals for current status data.")
    p.add_argument("--version", action="version", version=f"csci {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ci = sub.add_parser("ci", help="confidence curves for one data file")
    ci.add_argument("--input", required=True)
    ci.add_argument("--format", choices=("individual", "grouped"), default="individual")
    ci.add_argument("--level", type=float, default=0.95)
    ci.add_argument("--method", action="append",
                    help="valid, lrt, abf, or abf-<cp|midp>-<lu|mv|edge|raw>; repeatable")
    ci.add_argument("--m", type=_int_or_auto, default="auto", help="valid-CI window size")
    ci.add_argument("--m-dagger", type=_int_or_auto, default="auto", help="ABF window size (even)")
    ci.add_argument("--grid", default="support", help="'support' or a CSV file with a 'time' column")
    ci.add_argument("--adjust", default="edge,lower-upper", help="adjustments for --method abf")
    ci.add_argument("--variant", choices=("cp", "midp"), default="cp", help="binomial limits for --method abf")
    ci.add_argument("--lrt-critical", type=float, default=None)
    ci.add_argument("--override", action="store_true", help="allow mid-P with lower-upper")
    ci.add_argument("--seed", type=int, default=0, help="recorded only; ci is deterministic")
    ci.add_argument("--output")
    ci.set_defaults(func=cmd_ci)

    sim = sub.add_parser("simulate", help="Monte Carlo coverage study")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--reps", type=int, default=1000)
    sim.add_argument("--level", type=float, default=0.95)
    sim.add_argument("--method", action="append")
    sim.add_argument("--eval-q", type=_float_list, default=None)
    sim.add_argument("--m", type=_int_or_auto, default="auto")
    sim.add_argument("--m-dagger", type=_int_or_auto, default="auto")
    sim.add_argument("--lrt-critical", type=float, default=None)
    sim.add_argument("--override", action="store_true")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--threads", type=int, default=None, help="worker threads (default CSCI_THREADS)")
    sim.add_argument("--output")
    sim.set_defaults(func=cmd_simulate)

    plan = sub.add_parser("plan-m", help="expected-length optimal window size")
    plan.add_argument("--n", type=int)
    plan.add_argument("--F", type=float)
    plan.add_argument("--r", type=float)
    plan.add_argument("--level", type=float, default=0.95)
    plan.add_argument("--m-max", default=None, help="'n' (default), 'n34' or an integer")
    plan.add_argument("--grid-all", action="store_true", help="all 42 standard (n, F, r) cells, scanning m up to n^(3/4)")
    plan.add_argument("--output")
    plan.set_defaults(func=cmd_plan_m)

    rr = sub.add_parser("rerun", help="replay a run manifest")
    rr.add_argument("--manifest", required=True)
    rr.add_argument("--output", default=None)
    rr.add_argument("--threads", type=int, default=None)
    rr.set_defaults(func=cmd_rerun)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "plan-m" and args.grid_all and args.m_max is None:
            args.m_max = "n34"
        args.func(args)
    except CliError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return exc.code
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
