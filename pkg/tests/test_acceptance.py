"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line and stores it in ``SUMMARY``; the
``conftest`` hook repeats those lines at the end of the pytest run.
"""

import math
import os
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from eaexponent import checks
from eaexponent import operators as ops
from eaexponent import optimize as opt

SUMMARY: list[str] = []

pytestmark = pytest.mark.filterwarnings("ignore::eaexponent.optimize.MultimodalityWarning")


def report(number, title, ok, seconds, limit, detail=""):
    within = seconds < limit
    status = "PASS" if ok and within else "FAIL"
    line = (f"criterion {number} [{title}]: {status} ({seconds:.1f} s, limit {limit:.0f} s)"
            + (f" {detail}" if detail else ""))
    SUMMARY.append(line)
    print(line)
    return ok, within


def suite_detail(rep):
    return "; ".join(f"{r.name}: {r.violations}/{r.count} violations, margin {r.margin:.3g}"
                     for r in rep.results)


def test_criterion_1_identity_channel():
    t = time.perf_counter()
    ch = ops.QuantumChannel.identity(2)
    infos = {a: opt.channel_renyi_info(ch, a).value for a in (1.5, 2.0, 5.0)}
    cap = opt.ea_capacity(ch).value
    scs = {R: opt.strong_converse_exponent(ch, R, cap) for R in (1.0, 2.5, 3.0)}
    seconds = time.perf_counter() - t
    info_err = max(abs(v - 2.0) for v in infos.values())
    sc_err = max(abs(r.value - max(0.0, R - 2.0)) for R, r in scs.items())
    trunc = max(r.truncation_bound for r in scs.values())
    ok = info_err <= 1e-4 and sc_err <= 2e-4
    ok_all, within = report(1, "identity channel", ok, seconds, 10,
                            f"info error {info_err:.2e}, sc error {sc_err:.2e}, "
                            f"truncation bound {trunc:.2e}")
    assert info_err <= 1e-4
    assert sc_err <= 2e-4
    assert within


def run_suite_criterion(number, title, suite, limit, **kwargs):
    t = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", opt.MultimodalityWarning)
        rep = checks.SUITES[suite](**kwargs)
    seconds = time.perf_counter() - t
    ok, within = report(number, title, rep.passed, seconds, limit, suite_detail(rep))
    return rep, ok, within


def test_criterion_2_commuting_collapse():
    rep, ok, within = run_suite_criterion(2, "commuting collapse", "commuting", 5)
    assert rep.results[0].count == 50 * 3
    assert ok and within


def test_criterion_3_divergence_properties():
    rep, ok, within = run_suite_criterion(3, "divergence properties", "divergence", 120)
    var = next(r for r in rep.results if r.name == "variational_form")
    assert var.count == 20 * 3
    assert ok and within


def test_criterion_4_symmetric_dominance():
    rep, ok, within = run_suite_criterion(4, "universal symmetric state", "symmetric", 60)
    dom = next(r for r in rep.results if r.name == "dominance")
    assert dom.count == 3 * 200
    for n in (2, 3, 4):
        assert dom.detail[f"v[n={n}]"] <= (n + 1) ** 2
    assert ok and within


def test_criterion_5_exponent_forms():
    rep, ok, within = run_suite_criterion(5, "sup form vs variational form vs split",
                                          "exponent_forms", 300)
    assert all(r.count == 10 * 2 * 2 for r in rep.results)
    assert ok and within


def test_criterion_6_capacity_threshold():
    rep, ok, within = run_suite_criterion(6, "capacity threshold", "capacity", 60)
    assert ok and within


def test_criterion_7_simulator():
    rep, ok, within = run_suite_criterion(7, "coding simulator", "simulator", 300)
    assert ok and within


def test_criterion_8_pinching():
    rep, ok, within = run_suite_criterion(8, "pinching inequalities", "pinching", 30)
    assert all(r.count >= 100 for r in rep.results)
    assert ok and within


CLI_COMMANDS = [
    ["divergence", "--rho", "diag:0.7,0.2,0.1", "--sigma", "diag:0.2,0.3,0.5",
     "--alpha", "0.5,2,3"],
    ["channel-info", "--channel", "preset:amplitude-damping:0.3", "--alpha", "1.5,2"],
    ["exponent-curve", "--channel", "preset:depolarizing:0.1", "--rates", "1.5,1.9,2.1"],
    ["exponent-curve", "--channel", "preset:depolarizing:0.1", "--rates", "1.5,1.9,2.1",
     "--workers", "2", "--format", "jsonl"],
    ["simulate", "--channel", "preset:depolarizing:0.1", "--rates", "1.9",
     "--blocklengths", "1-4", "--seed", "17", "--repeats", "2"],
    ["simulate", "--channel", "preset:amplitude-damping:0.2", "--rates", "1.2",
     "--blocklengths", "1-3", "--seed", "5"],
    ["verify", "pinching"],
]


def test_criterion_9_cli_determinism(tmp_path):
    t = time.perf_counter()
    mismatched = []
    for i, cmd in enumerate(CLI_COMMANDS):
        outputs = []
        for rep in range(2):
            path = tmp_path / f"out{i}_{rep}"
            res = subprocess.run([sys.executable, "-m", "eaexponent.cli", *cmd, "--out", str(path)],
                                 capture_output=True, env=dict(os.environ))
            assert res.returncode == 0, res.stderr
            outputs.append(path.read_bytes())
        if outputs[0] != outputs[1] or not outputs[0]:
            mismatched.append(" ".join(cmd[:1]))
    seconds = time.perf_counter() - t
    ok, _ = report(9, "CLI determinism", not mismatched, seconds, math.inf,
                   f"{len(CLI_COMMANDS)} commands run twice"
                   + (f", differing: {mismatched}" if mismatched else ""))
    assert not mismatched
