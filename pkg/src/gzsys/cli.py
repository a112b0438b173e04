"""Command-line interface: ``gzsys <command> [options]``.

Reports go to stdout as JSON (sorted keys), diagnostics to stderr.  Exit
status is 0 on success, 1 when a check fails (interlacing violations, a
bracket above tolerance, an inconsistent fiber under ``--strict``, invalid
matrix or pattern data), and 2 on argument or I/O errors.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .chamber import sweep
from .contraction import chain_report
from .exceptions import FiberInconsistencyError, GZError, ValidationError
from .fiber import classify_fiber, classify_matrix, survey_polytope, survey_summary
from .matrices import as_spectrum, matrix_from_json, matrix_to_json, sample_orbit_point
from .patterns import (
    GZPattern,
    check_interlacing,
    gz_map,
    polytope_spec,
    random_phases,
    reconstruct,
)
from .poisson import (
    eigenvalue_field,
    entry_field,
    involution_defect,
    lax_flow,
    trace_power_field,
)
from .seeding import derive_seeds

COMMANDS = (
    "eval",
    "interlace",
    "bracket-check",
    "flow",
    "polytope",
    "reconstruct",
    "chain",
    "fiber",
    "survey",
)

DEFAULTS = {
    "group": None,
    "lambda": None,
    "n": None,
    "tol": 1e-9,
    "rank_tol": 1e-8,
    "fd_step": 1e-5,
    "seed": 0,
    "samples": 1,
    "strict": False,
    "input": None,
    "output": None,
    "pattern": None,
    "fd_only": False,
    "hamiltonian": "eig:1,1",
    "t_end": 2 * math.pi,
    "dt": 1e-3,
    "record_every": 1,
    "format": "json",
    "snap_prob": 0.5,
}

BRACKET_TOL = {"analytic": 1e-6, "fd": 1e-4}

SEED_HELP = """\
seeding:
  --seed is a 64-bit master seed.  Randomized commands expand it with a
  splitmix64 stream (state += 0x9E3779B97F4A7C15, then the standard
  xor-shift-multiply finalizer); sample i uses the i-th output for both
  its pattern and its representative.  Output is sorted by sample index,
  so GZ_THREADS never changes the bytes written.

environment:
  GZ_THREADS  upper bound on worker threads for survey and bracket-check
"""


class UsageError(Exception):
    """Argument or I/O problem: exit status 2."""


class CheckFailed(Exception):
    """A check ran and failed: exit status 1, the report still goes to stdout."""

    def __init__(self, report, message, raw=False):
        super().__init__(message)
        self.report = report
        self.raw = raw


def _floats(text):
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # defaults stay None so that a config file can fill what the command line omits
    common.add_argument("--group", choices=("U", "SO"), default=None)
    common.add_argument("--lambda", dest="lambda", type=_floats, default=None,
                        help="spectrum (U) or moduli (SO), comma separated")
    common.add_argument("--n", type=_positive(int), default=None, help="matrix size for SO")
    common.add_argument("--tol", type=_positive(float), default=None, help="multiplicity tolerance (1e-9)")
    common.add_argument("--rank-tol", dest="rank_tol", type=_positive(float), default=None,
                        help="relative numerical-rank threshold (1e-8)")
    common.add_argument("--fd-step", dest="fd_step", type=_positive(float), default=None,
                        help="finite-difference step (1e-5)")
    common.add_argument("--seed", type=int, default=None, help="64-bit master seed (0)")
    common.add_argument("--samples", type=_positive(int), default=None)
    common.add_argument("--strict", action="store_const", const=True, default=None)
    common.add_argument("--input", default=None, help="JSON input file ('-' for stdin)")
    common.add_argument("--output", default=None, help="secondary output file")
    common.add_argument("--config", default=None, help="JSON file supplying any option")
    common.add_argument("--pattern", default=None, help="pattern rows as JSON, e.g. '[[1],[1,1],[2,1,0]]'")

    p = argparse.ArgumentParser(
        prog="gzsys",
        description="Gelfand-Zeitlin systems on U(n) and SO(n) coadjoint orbits.",
        epilog=SEED_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "eval": "GZ pattern and chamber point of a matrix",
        "interlace": "check a pattern against the interlacing inequalities",
        "bracket-check": "max |{F_i, F_j}| over sampled orbit points",
        "flow": "integrate the Lax flow of a collective Hamiltonian",
        "polytope": "inequalities of the GZ polytope",
        "reconstruct": "matrix with a prescribed U pattern",
        "chain": "per-level strata and leaf dimensions",
        "fiber": "iterated-bundle report of a GZ fiber",
        "survey": "classify random patterns of a GZ polytope",
    }
    subs = {}
    for name in COMMANDS:
        subs[name] = sub.add_parser(
            name, parents=[common], help=helps[name], epilog=SEED_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
    subs["bracket-check"].add_argument("--fd-only", dest="fd_only", action="store_const",
                                       const=True, default=None,
                                       help="finite-difference gradients only (tolerance 1e-4)")
    f = subs["flow"]
    f.add_argument("--hamiltonian", default=None,
                   help="eig:K,I | entry:I,J[,re|im] | trace:P (default eig:1,1)")
    f.add_argument("--t-end", dest="t_end", type=float, default=None, help="(2 pi)")
    f.add_argument("--dt", type=_positive(float), default=None, help="(1e-3)")
    f.add_argument("--record-every", dest="record_every", type=_positive(int), default=None)
    f.add_argument("--format", choices=("json", "csv"), default=None,
                   help="format written to --output (stdout is always JSON)")
    subs["survey"].add_argument("--snap-prob", dest="snap_prob", type=float, default=None)
    return p


def resolve(args):
    """Merge defaults < config file < command line into one dict."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in data.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {key!r}")
            if key == "lambda" and isinstance(val, str):
                val = _floats(val)
            cfg[key] = val
    for key, val in vars(args).items():
        if val is not None and key in DEFAULTS:
            cfg[key] = val
    cfg["command"] = args.command
    for key in ("tol", "rank_tol", "fd_step"):
        if not float(cfg[key]) > 0:
            raise UsageError(f"{key} must be positive")
    if int(cfg["samples"]) < 1:
        raise UsageError("samples must be >= 1")
    return cfg


def threads():
    bound = os.environ.get("GZ_THREADS")
    cpus = os.cpu_count() or 1
    if bound is None:
        return cpus
    try:
        return max(1, min(cpus, int(bound)))
    except ValueError as exc:
        raise UsageError(f"GZ_THREADS must be an integer, got {bound!r}") from exc


# --------------------------------------------------------------------------
# Input helpers


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _need_lambda(cfg):
    if not cfg["lambda"]:
        raise UsageError("--lambda is required")
    return as_spectrum(cfg["lambda"])


def _group(cfg, default="U"):
    return cfg["group"] or default


def _matrix(cfg):
    """Matrix from --input, or a seeded orbit point of --lambda."""
    if cfg["input"]:
        a, group = matrix_from_json(_read_json(cfg["input"]))
        if cfg["group"] and cfg["group"] != group:
            raise ValidationError(f"input is {group} but --group is {cfg['group']}")
        return a, group
    if cfg["lambda"]:
        group = _group(cfg)
        seed = derive_seeds(cfg["seed"], 1)[0]
        return sample_orbit_point(cfg["lambda"], group, seed, cfg["n"]), group
    raise UsageError("need --input MATRIX.json or --lambda")


def _pattern(cfg):
    if cfg["pattern"] is not None:
        src = cfg["pattern"]
        try:
            obj = json.loads(src) if isinstance(src, str) else src
        except json.JSONDecodeError as exc:
            raise UsageError(f"--pattern is not JSON: {exc}") from exc
    elif cfg["input"]:
        obj = _read_json(cfg["input"])
    else:
        raise UsageError("need --pattern ROWS or --input PATTERN.json")
    if isinstance(obj, list):
        try:
            return GZPattern.from_rows(obj, _group(cfg))
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
    return GZPattern.from_json(obj)


def _hamiltonian(spec, n, group):
    kind, _, rest = spec.partition(":")
    parts = [x.strip() for x in rest.split(",") if x.strip()]
    try:
        if kind == "eig":
            k, i = int(parts[0]), int(parts[1])
            return eigenvalue_field(k, i, group, n)
        if kind == "entry":
            if group != "U":
                raise UsageError("entry Hamiltonians are defined on u(n)")
            part = parts[2] if len(parts) > 2 else "re"
            return entry_field(int(parts[0]) - 1, int(parts[1]) - 1, part)
        if kind == "trace":
            return trace_power_field(int(parts[0]))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad --hamiltonian {spec!r}: {exc}") from exc
    raise UsageError(f"unknown Hamiltonian kind {kind!r}")


def _write_output(path, writer):
    try:
        with open(path, "w", newline="") as fh:
            writer(fh)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# Commands


def cmd_eval(cfg):
    a, group = _matrix(cfg)
    cp = sweep(a, group, cfg["tol"])
    return {
        "group": group,
        "pattern": gz_map(a, group).to_json(),
        "spectrum": list(cp.spectrum.values),
        "stratum": cp.stratum.to_json(),
    }


def cmd_interlace(cfg):
    p = _pattern(cfg)
    bad = check_interlacing(p, cfg["tol"])
    report = {"valid": not bad, "violations": [v.to_json() for v in bad], "pattern": p.to_json()}
    if bad:
        raise CheckFailed(report, f"{len(bad)} interlacing violation(s)")
    return report


def cmd_bracket_check(cfg):
    lam = _need_lambda(cfg)
    group = _group(cfg)
    samples = int(cfg["samples"])
    mode = "fd" if cfg["fd_only"] else "analytic"
    seeds = derive_seeds(cfg["seed"], samples)

    def one(s):
        a = sample_orbit_point(lam, group, s, cfg["n"])
        return involution_defect(a, group, cfg["fd_step"], analytic=mode == "analytic")

    with ThreadPoolExecutor(max_workers=min(threads(), samples)) as ex:
        results = list(ex.map(one, seeds))
    worst = max(r[0] for r in results)
    report = {
        "group": group,
        "lambda": list(lam.values),
        "samples": samples,
        "gradients": mode,
        "pairs": sum(r[1] for r in results),
        "skipped_components": sum(len(r[2]) for r in results),
        "max_abs_bracket": worst,
        "tolerance": BRACKET_TOL[mode],
        "ok": worst <= BRACKET_TOL[mode],
    }
    if not report["ok"]:
        raise CheckFailed(report, f"bracket {worst:.3e} above {BRACKET_TOL[mode]:g}")
    return report


def cmd_flow(cfg):
    a, group = _matrix(cfg)
    f = _hamiltonian(cfg["hamiltonian"], a.shape[0], group)
    trace = lax_flow(f, a, float(cfg["t_end"]), float(cfg["dt"]), cfg["fd_step"], group,
                     int(cfg["record_every"]))
    if cfg["output"]:
        if cfg["format"] == "csv":
            _write_output(cfg["output"], lambda fh: csv.writer(fh).writerows(trace.csv_rows()))
        else:
            _write_output(cfg["output"], lambda fh: fh.write(_dumps(trace.to_json())))
    out = trace.to_json()
    out["closure"] = float(np.linalg.norm(trace.states[-1] - trace.states[0]))
    return out


def cmd_polytope(cfg):
    lam = _need_lambda(cfg)
    return polytope_spec(lam, _group(cfg), cfg["n"]).to_json()


def cmd_reconstruct(cfg):
    p = _pattern(cfg)
    seed = derive_seeds(cfg["seed"], 1)[0]
    a = reconstruct(p, random_phases(p.n, np.random.default_rng(seed)), cfg["tol"])
    err = float(np.max(np.abs(gz_map(a, "U").flat() - p.flat())))
    return {"matrix": matrix_to_json(a, "U"), "roundtrip_error": err}


def cmd_chain(cfg):
    a, group = _matrix(cfg)
    return chain_report(a, cfg["tol"], cfg["rank_tol"], group).to_json()


def cmd_fiber(cfg):
    if cfg["pattern"] is None and cfg["input"]:
        obj = _read_json(cfg["input"])
        if isinstance(obj, dict) and "kind" in obj:
            a, group = matrix_from_json(obj)
            report = classify_matrix(a, cfg["tol"], cfg["rank_tol"], group)
            return _fiber_result(report, cfg)
        cfg = dict(cfg, pattern=obj, input=None)
    p = _pattern(cfg)
    lam = as_spectrum(cfg["lambda"]) if cfg["lambda"] else p.top
    try:
        report = classify_fiber(lam, p, cfg["seed"], cfg["tol"], cfg["rank_tol"], cfg["strict"])
    except FiberInconsistencyError as exc:
        raise CheckFailed(exc.report.to_json(), str(exc)) from exc
    return _fiber_result(report, cfg)


def _fiber_result(report, cfg):
    out = report.to_json()
    if cfg["strict"] and not report.consistent:
        raise CheckFailed(out, report.diagnostic or "inconsistent fiber report")
    return out


def cmd_survey(cfg):
    lam = _need_lambda(cfg)
    if _group(cfg) != "U":
        raise UsageError("survey samples U patterns only")
    records = survey_polytope(
        lam, int(cfg["samples"]), cfg["seed"], cfg["tol"], cfg["rank_tol"],
        threads=threads(), snap_prob=float(cfg["snap_prob"]),
    )
    lines = [_dumps(r.to_json(), indent=None) for r in records]
    if cfg["output"]:
        def write(fh):
            w = csv.writer(fh)
            w.writerow(["index", "pattern_digest", "total_dim", "oracle_dim", "consistent"])
            for r in records:
                w.writerow([r.index, r.digest, r.report.total_dim, r.report.oracle_dim,
                            str(r.report.consistent).lower()])
        _write_output(cfg["output"], write)
    summary = survey_summary(records)
    print(f"survey: {summary['consistent']}/{summary['samples']} consistent", file=sys.stderr)
    bad = summary["consistent"] != summary["samples"]
    if cfg["strict"] and bad:
        raise CheckFailed("".join(lines), "inconsistent reports in survey", raw=True)
    return "".join(lines), True


HANDLERS = {
    "eval": cmd_eval,
    "interlace": cmd_interlace,
    "bracket-check": cmd_bracket_check,
    "flow": cmd_flow,
    "polytope": cmd_polytope,
    "reconstruct": cmd_reconstruct,
    "chain": cmd_chain,
    "fiber": cmd_fiber,
    "survey": cmd_survey,
}


def _dumps(obj, indent=2):
    return json.dumps(obj, sort_keys=True, indent=indent) + "\n"


def run(argv=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        result = HANDLERS[cfg["command"]](cfg)
    except CheckFailed as exc:
        stdout.write(exc.report if exc.raw else _dumps(exc.report))
        print(f"gzsys {args.command}: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"gzsys {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, GZError) as exc:
        print(f"gzsys {args.command}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"gzsys {args.command}: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, tuple):
        stdout.write(result[0])
    else:
        stdout.write(_dumps(result))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
