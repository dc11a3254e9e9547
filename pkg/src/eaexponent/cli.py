"""Command-line entry point ``eaexponent``.

Exit codes: 0 success, 2 invalid input or failed invariant, 3 solver failure.
Tolerances come from ``--tolerance`` or, failing that, the environment
variables ``EAEXPONENT_TOL``, ``EAEXPONENT_INNER_TOL`` and
``EAEXPONENT_LAMBDA_TOL``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import checks, coding
from . import divergence as dv
from . import optimize as opt
from .errors import ConvergenceError
from .specs import SpecError, load_channel, load_matrix

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3

EXPONENT_COLUMNS = ["R", "sc", "lambda_star", "alpha_star", "truncation_bound",
                    "inner_iterations", "status", "tolerance", "lambda_window"]

ENV_TOL = "EAEXPONENT_TOL"
ENV_INNER_TOL = "EAEXPONENT_INNER_TOL"
ENV_LAMBDA_TOL = "EAEXPONENT_LAMBDA_TOL"


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    """``"1,2.5,3"`` or a range ``"start:stop:count"``."""
    try:
        if text.count(":") == 2:
            a, b, n = text.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _ints(text: str) -> list[int]:
    """``"1,2,5"`` or an inclusive range ``"1-5"``."""
    try:
        if "-" in text and "," not in text:
            a, b = text.split("-")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse integer list {text!r}") from exc


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = float(raw)
    except ValueError as exc:
        raise UsageError(f"{name}={raw!r} is not a number") from exc
    return value


def tolerances(args) -> dict:
    tol = args.tolerance if args.tolerance is not None else _env_float(ENV_TOL, 1e-7)
    inner = _env_float(ENV_INNER_TOL, 1e-8)
    lam = _env_float(ENV_LAMBDA_TOL, 1e-5)
    for name, v in (("tolerance", tol), ("inner tolerance", inner), ("lambda tolerance", lam)):
        if not (v > 0 and math.isfinite(v)):
            raise UsageError(f"{name} must be positive, got {v!r}")
    return {"tol": tol, "inner_tol": inner, "lambda_tol": lam}


def _num(x):
    """JSON-safe number: infinities become strings, floats keep full precision."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def _csv_cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def emit(records: list[dict], fmt: str, columns: Sequence[str] | None = None) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps({k: _num(v) for k, v in r.items()}) + "\n" for r in records)
    buf = io.StringIO()
    cols = list(columns) if columns else (list(records[0]) if records else [])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_csv_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def _map(fn: Callable, items: list, workers: int) -> list:
    """Ordered map, optionally over a process pool; results follow ``items``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- commands ---------------------------------------------------------------------------

def cmd_divergence(rho, sigma, alphas: Sequence[float], kind: str = "both") -> list[dict]:
    if isinstance(rho, str):
        rho = load_matrix(rho)
    if isinstance(sigma, str):
        sigma = load_matrix(sigma)
    fns = {"sandwiched": dv.sandwiched_divergence, "log_euclidean": dv.log_euclidean_divergence}
    kinds = list(fns) if kind == "both" else [kind]
    out = []
    for a in alphas:
        for k in kinds:
            val = fns[k](rho, sigma, a)
            out.append({"alpha": a, "kind": k, "value": float(val), "support": val.support})
    return out


def _channel_info_point(job):
    spec, a, tol, inner_tol = job
    ch = load_channel(spec).channel()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", opt.MultimodalityWarning)
        o = opt.channel_renyi_info(ch, a, tol=tol, inner_tol=inner_tol)
    return {"alpha": a, "value": o.value, "iterations": o.info.get("iterations", 0),
            "inner_iterations": o.info.get("inner_iterations", 0),
            "restart_spread": o.info.get("restart_spread", 0.0),
            "multimodal": bool(caught), "tolerance": tol, "inner_tolerance": inner_tol}


def cmd_channel_info(spec: str, alphas: Sequence[float], tol=1e-7, inner_tol=1e-8,
                     workers: int = 1) -> list[dict]:
    load_channel(spec).channel()
    jobs = [(spec, a, tol, inner_tol) for a in alphas]
    return _map(_channel_info_point, jobs, workers)


def _exponent_point(job):
    spec, R, kind, delta, tols, capacity = job
    ch = load_channel(spec).channel()
    q = opt.ExponentQuery(R, delta=delta, lambda_tol=tols["lambda_tol"], tol=tols["tol"],
                          inner_tol=tols["inner_tol"])
    fn = opt.quantum_exponent if kind == "quantum" else opt.strong_converse_exponent
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", opt.MultimodalityWarning)
        r = fn(ch, q, capacity)
    return {"R": R, "sc": r.value, "lambda_star": r.lambda_star, "alpha_star": r.alpha_star,
            "truncation_bound": r.truncation_bound, "inner_iterations": r.inner_iterations,
            "status": r.status, "tolerance": tols["tol"], "lambda_window": delta}


def cmd_exponent_curve(spec: str, rates: Sequence[float], kind: str = "sc",
                       delta: float = opt.DEFAULT_DELTA, tols: dict | None = None,
                       workers: int = 1) -> list[dict]:
    tols = tols or {"tol": 1e-7, "inner_tol": 1e-8, "lambda_tol": 1e-5}
    ch = load_channel(spec).channel()
    capacity = opt.ea_capacity(ch).value
    jobs = [(spec, float(R), kind, delta, tols, capacity) for R in rates]
    return _map(_exponent_point, jobs, workers)


def _simulate_point(job):
    spec, R, n, seed = job
    ch = load_channel(spec).channel()
    code = coding.build_ea_code(ch, n, None, R, seed=seed)
    ps = coding.success_probability(ch, code)
    return {"n": n, "seed": seed, "rate": R, "M": code.M, "success": ps,
            "exponent_estimate": (-math.log2(ps) / n) if ps > 0 else math.inf}


def cmd_simulate(spec: str, rate: float, blocklengths: Sequence[int], seed: int = 0,
                 repeats: int = 1, workers: int = 1) -> list[dict]:
    load_channel(spec).channel()
    jobs = [(spec, float(rate), int(n), seed + 1000 * r + int(n))
            for r in range(repeats) for n in blocklengths]
    records = _map(_simulate_point, jobs, workers)
    for r in range(repeats):
        rows = records[r * len(blocklengths):(r + 1) * len(blocklengths)]
        res = coding.SimulationResult(float(rate), [x["n"] for x in rows],
                                      [x["success"] for x in rows], [x["M"] for x in rows], seed)
        if sum(x["success"] > 0 for x in rows) >= 3:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                slope, resid = coding.empirical_exponent(res)
            records.append({"n": "fit", "seed": seed + 1000 * r, "rate": rate, "M": "",
                            "success": "", "exponent_estimate": slope, "residual": resid})
    return records


def cmd_verify(suite: str) -> tuple[bool, list[dict]]:
    names = sorted(checks.SUITES) if suite == "all" else [checks.ALIASES.get(suite, suite)]
    ok, out = True, []
    for name in names:
        rep = checks.run_suite(name)
        ok &= rep.passed
        for r in rep.results:
            out.append({"suite": name, "check": r.name, "passed": r.passed, "count": r.count,
                        "violations": r.violations, "margin": r.margin})
    return ok, out


# -- argument parsing -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eaexponent",
                                description="Rényi divergences, channel Rényi information "
                                            "and strong converse exponents.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "jsonl"])
    common.add_argument("--tolerance", type=float, help=f"solver tolerance (env {ENV_TOL})")
    common.add_argument("--workers", type=int, default=1, help="process pool size")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("divergence", parents=[common], help="divergences of a state pair")
    d.add_argument("--rho", required=True, help="diag:p1,p2,... or JSON matrix file")
    d.add_argument("--sigma", required=True, help="diag:q1,q2,... or JSON matrix file")
    d.add_argument("--alpha", required=True, help="comma list of orders")
    d.add_argument("--kind", choices=["sandwiched", "log_euclidean", "both"], default="both")

    c = sub.add_parser("channel-info", parents=[common], help="channel Rényi information")
    c.add_argument("--channel", required=True, help="preset:name:param or JSON file")
    c.add_argument("--alpha", required=True, help="comma list of orders")

    e = sub.add_parser("exponent-curve", parents=[common], help="strong converse exponent curve")
    e.add_argument("--channel", required=True)
    e.add_argument("--rates", required=True, help="comma list or start:stop:count")
    e.add_argument("--lambda-window", type=float, default=opt.DEFAULT_DELTA,
                   help="search lambda over [w, 1-w]")
    e.add_argument("--kind", choices=["sc", "quantum"], default="sc")

    s = sub.add_parser("simulate", parents=[common], help="random entanglement-assisted codes")
    s.add_argument("--channel", required=True)
    s.add_argument("--rates", required=True, type=float, help="code rate R")
    s.add_argument("--blocklengths", required=True, help="e.g. 1-5 or 1,2,4")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--repeats", type=int, default=1)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("suite", choices=sorted(checks.SUITES) + sorted(checks.ALIASES) + ["all"])
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, str, str | None]:
    args = build_parser().parse_args(argv)
    fmt = args.format
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    tols = tolerances(args)
    status = EXIT_OK
    columns = None
    if args.command == "divergence":
        records = cmd_divergence(args.rho, args.sigma, _floats(args.alpha), args.kind)
    elif args.command == "channel-info":
        records = cmd_channel_info(args.channel, _floats(args.alpha), tols["tol"],
                                   tols["inner_tol"], args.workers)
    elif args.command == "exponent-curve":
        rates = _floats(args.rates)
        if not rates:
            raise UsageError("rate grid is empty")
        records = cmd_exponent_curve(args.channel, rates, args.kind, args.lambda_window, tols,
                                     args.workers)
        columns = EXPONENT_COLUMNS
        fmt = fmt or "csv"
    elif args.command == "simulate":
        ns = _ints(args.blocklengths)
        if not ns or min(ns) < 1:
            raise UsageError("blocklengths must be positive")
        records = cmd_simulate(args.channel, args.rates, ns, args.seed, args.repeats,
                               args.workers)
    else:
        ok, records = cmd_verify(args.suite)
        status = EXIT_OK if ok else EXIT_INVALID
    return status, emit(records, fmt or "jsonl", columns), args.out


def main(argv: Sequence[str] | None = None) -> int:
    try:
        status, text, out = run(argv)
    except (SpecError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        record = {"error": "solver_failure", "message": str(exc),
                  "details": {k: _num(v) for k, v in (exc.details or {}).items()
                              if isinstance(v, (int, float, str, bool))}}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_SOLVER
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
