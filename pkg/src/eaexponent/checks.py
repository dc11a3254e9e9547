"""Seeded property suites.

Each suite returns a :class:`SuiteReport`; ``margin`` is the smallest slack
observed (negative means a violation beyond the allowed tolerance).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import coding
from . import divergence as dv
from . import operators as ops
from . import optimize as opt
from . import symmetry as sym


@dataclass
class CheckResult:
    name: str
    count: int = 0
    violations: int = 0
    margin: float = math.inf
    detail: dict = field(default_factory=dict)

    def record(self, slack: float, tol: float = 0.0, witness=None):
        """Record one instance whose inequality holds iff ``slack >= -tol``."""
        self.count += 1
        if slack < self.margin:
            self.margin = float(slack)
            if witness is not None:
                self.detail["worst"] = witness
        if slack < -tol or math.isnan(slack):
            self.violations += 1

    @property
    def passed(self) -> bool:
        return self.count > 0 and self.violations == 0


@dataclass
class SuiteReport:
    suite: str
    results: list
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{self.suite}.{r.name}: {status} count={r.count} "
                       f"violations={r.violations} margin={r.margin!r}")
        return out


def _degenerate_psd(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random PSD matrix whose spectrum has repeated values."""
    k = int(rng.integers(1, d + 1))
    levels = rng.uniform(0.2, 2.0, size=k)
    w = levels[rng.integers(0, k, size=d)]
    U = ops.random_unitary(d, rng)
    return ops.herm(U @ np.diag(w) @ U.conj().T)


DIVERGENCES = {"sandwiched": dv.sandwiched_divergence, "log_euclidean": dv.log_euclidean_divergence}


# -- property suites ---------------------------------------------------------------------

def suite_divergence(instances: int = 100, variational: int = 20, seed: int = 1) -> SuiteReport:
    """Order monotonicity, monotonicity and convexity in sigma, additivity of the
    sandwiched mutual information, pinching approximation and the variational
    form of the log-Euclidean divergence."""
    rng = np.random.default_rng(seed)
    mono_a = CheckResult("order_monotonicity")
    mono_s = CheckResult("sigma_monotonicity")
    convex = CheckResult("sigma_convexity")
    additive = CheckResult("mutual_information_additivity")
    pinch = CheckResult("pinching_approximation")
    var = CheckResult("variational_form")
    orders = [0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0]
    for i in range(instances):
        d = int(rng.integers(2, 5))
        rank = None if i % 3 else int(rng.integers(1, d + 1))
        rho = ops.random_density(d, rng, rank)
        sigma = ops.random_psd(d, rng)
        for name, D in DIVERGENCES.items():
            vals = [float(D(rho, sigma, a)) for a in orders]
            for lo, hi in zip(vals, vals[1:]):
                mono_a.record(hi - lo, 1e-9, (name, i))
            bigger = sigma + ops.random_psd(d, rng, scale=float(rng.uniform(0.01, 1.0)))
            s1, s2 = ops.random_psd(d, rng), ops.random_psd(d, rng)
            t = float(rng.uniform())
            for a in (0.5, 0.8, 1.5, 2.0, 4.0):
                mono_s.record(float(D(rho, sigma, a)) - float(D(rho, bigger, a)), 1e-9, (name, i, a))
                mix = float(D(rho, t * s1 + (1 - t) * s2, a))
                convex.record(t * float(D(rho, s1, a)) + (1 - t) * float(D(rho, s2, a)) - mix,
                              1e-9, (name, i, a))
        sig = _degenerate_psd(d, rng) if i % 2 else sigma
        v = ops.distinct_eigenvalue_count(sig)
        pr = ops.pinching(sig, rho)
        for a in (0.5, 0.8, 1.5, 2.0, 5.0):
            full = float(dv.sandwiched_divergence(rho, sig, a))
            pinched = float(dv.sandwiched_divergence(pr, sig, a))
            pinch.record(min(full - pinched, pinched + 2 * math.log2(v) - full), 1e-9, (i, a))
        r1, r2 = ops.random_density(4, rng), ops.random_density(4, rng)
        a = float(rng.choice([0.7, 1.5, 2.0, 4.0]))
        joint = ops.permute_systems(np.kron(r1, r2), [2, 2, 2, 2], [0, 2, 1, 3])
        lhs = opt.sandwiched_mutual_info(joint, [4, 4], a).value
        rhs = (opt.sandwiched_mutual_info(r1, [2, 2], a).value
               + opt.sandwiched_mutual_info(r2, [2, 2], a).value)
        additive.record(-abs(lhs - rhs), 1e-7, (i, a))
    for i in range(variational):
        d = int(rng.integers(2, 5))
        rho, sigma = ops.random_density(d, rng), ops.random_density(d, rng)
        for a in (0.5, 2.0, 3.0):
            gap = abs(float(dv.log_euclidean_variational(rho, sigma, a))
                      - float(dv.log_euclidean_divergence(rho, sigma, a)))
            var.record(-gap, 1e-5, (i, a))
    return SuiteReport("divergence", [mono_a, mono_s, convex, additive, pinch, var])


def classical_renyi(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    mask = p > 0
    return float(np.log2(np.sum(p[mask] ** alpha * q[mask] ** (1 - alpha))) / (alpha - 1))


def suite_commuting(instances: int = 50, seed: int = 2) -> SuiteReport:
    """Both divergences reduce to the classical Rényi divergence on diagonal pairs."""
    rng = np.random.default_rng(seed)
    res = CheckResult("classical_collapse")
    for i in range(instances):
        d = int(rng.integers(2, 9))
        p = rng.dirichlet(np.ones(d))
        if i % 4 == 0:
            p[rng.integers(0, d)] = 0.0
            p /= p.sum()
        q = rng.dirichlet(np.ones(d))
        for a in (0.6, 2.0, 3.0):
            c = classical_renyi(p, q, a)
            s = float(dv.sandwiched_divergence(np.diag(p), np.diag(q), a))
            e = float(dv.log_euclidean_divergence(np.diag(p), np.diag(q), a))
            res.record(-max(abs(s - c), abs(e - c)), 1e-8, (i, a))
    return SuiteReport("commuting", [res])


def suite_pinching(instances: int = 100, seed: int = 3) -> SuiteReport:
    """``X <= v(sigma) P_sigma(X)`` and the projection-set pinching bound."""
    rng = np.random.default_rng(seed)
    ineq = CheckResult("pinching_inequality")
    bound = CheckResult("projection_pinching_bound")
    for i in range(instances):
        d = int(rng.integers(2, 9))
        sigma = _degenerate_psd(d, rng)
        X = ops.random_psd(d, rng)
        v = ops.distinct_eigenvalue_count(sigma)
        gap = np.linalg.eigvalsh(v * ops.pinching(sigma, X) - X)[0]
        ineq.record(float(gap), 1e-9, i)
        # refine each eigenspace of sigma into random orthogonal pieces
        projections = []
        for P in ops.spectral_projections(sigma):
            w, V = np.linalg.eigh(P)
            basis = V[:, w > 0.5]
            basis = basis @ ops.random_unitary(basis.shape[1], rng)
            cuts = np.sort(rng.choice(np.arange(1, basis.shape[1] + 1), size=1))
            for part in np.split(basis, cuts[cuts < basis.shape[1]], axis=1):
                projections.append(part @ part.conj().T)
        M = len(projections)
        rho = ops.random_density(d, rng, int(rng.integers(1, d + 1)))
        pr = ops.herm(ops.pinch(projections, rho))
        for a in (0.5, 1.5, 2.0, 3.0, 5.0):
            f = math.log2(M) if a <= 2 else 2 * math.log2(M)
            full = float(dv.sandwiched_divergence(rho, sigma, a))
            pinched = float(dv.sandwiched_divergence(pr, sigma, a))
            bound.record(pinched + f - full, 1e-9, (i, a))
    return SuiteReport("pinching", [ineq, bound])


def suite_symmetric(ns=(2, 3, 4), d: int = 2, states: int = 200, seed: int = 4) -> SuiteReport:
    """The universal symmetric state dominates random and extremal symmetric states."""
    rng = np.random.default_rng(seed)
    dom = CheckResult("dominance")
    within = CheckResult("v_within_bound")
    count = CheckResult("distinct_eigenvalues_le_v")
    invariance = CheckResult("permutation_invariance")
    for n in ns:
        u = sym.universal_symmetric_state(n, d)
        within.record(u.bound - u.v, 0.0, n)
        count.record(u.v - ops.distinct_eigenvalue_count(u.state), 0.0, n)
        for k in range(n - 1):
            perm = list(range(n))
            perm[k], perm[k + 1] = k + 1, k
            W = sym.permutation_unitary(perm, d)
            invariance.record(-np.max(np.abs(W @ u.state @ W.T - u.state)), 1e-10, (n, k))
        for j in range(states):
            if j % 4 == 3:
                omega = sym.symmetrized_product_state([ops.random_pure(d, rng) for _ in range(n)])
            elif j % 4 == 2:
                p = ops.projector(ops.random_pure(d, rng))
                omega = p
                for _ in range(n - 1):
                    omega = np.kron(omega, p)
            else:
                omega = sym.random_symmetric_state(d, n, rng, rank=int(rng.integers(1, d ** n + 1)))
            dom.record(u.margin(omega), 1e-9, (n, j))
        dom.detail[f"v[n={n}]"] = u.v
    return SuiteReport("symmetric", [dom, within, count, invariance])


# -- channel suites --------------------------------------------------------------------

def suite_identity() -> SuiteReport:
    """Identity qubit channel: ``I*_alpha = 2`` and ``sc(R) = (R - 2)_+``."""
    ch = ops.QuantumChannel.identity(2)
    info = CheckResult("renyi_information")
    for a in (1.5, 2.0, 5.0):
        info.record(-abs(opt.channel_renyi_info(ch, a).value - 2.0), 1e-4, a)
    sc = CheckResult("strong_converse_exponent")
    for R in (1.0, 2.5, 3.0):
        r = opt.strong_converse_exponent(ch, R)
        sc.record(-abs(r.value - max(0.0, R - 2.0)), 2e-4, R)
    return SuiteReport("identity", [info, sc])


def suite_capacity(p: float = 0.1) -> SuiteReport:
    """Depolarizing capacity threshold: zero exponent below, positive above."""
    ch = ops.QuantumChannel.depolarizing(p)
    cap = opt.ea_capacity(ch)
    oracle = opt.output_mutual_information(ch, np.eye(2) / 2)
    agree = CheckResult("capacity_symmetry_oracle")
    agree.record(-abs(cap.value - oracle), 1e-4)
    below = CheckResult("zero_below_capacity")
    below.record(-opt.strong_converse_exponent(ch, cap.value - 0.05, cap.value).value, 0.0)
    above = CheckResult("positive_above_capacity")
    above.record(opt.strong_converse_exponent(ch, cap.value + 0.1, cap.value).value - 1e-3, 0.0)
    return SuiteReport("capacity", [agree, below, above])


def exponent_form_ensembles():
    """Single-state and two-state ensembles used by the cross-check."""
    return {"one": opt.block_ensemble([[0, 1]], [1.0], 2),
            "two": opt.block_ensemble([[0, 1], [0]], [0.6, 0.4], 2)}


def suite_exponent_forms(channels: int = 10, rates=(0.5, 1.5), seed: int = 100) -> SuiteReport:
    """Sup form against variational form of ``F``, and ``F`` against ``min(F1, F2)``."""
    forms = CheckResult("sup_vs_variational")
    split = CheckResult("split_minimum")
    for c in range(channels):
        ch = ops.QuantumChannel.random(2, 2, 4, np.random.default_rng(seed + c))
        for name, ens in exponent_form_ensembles().items():
            for R in rates:
                a = opt.exponent_candidate_F(ch, R, ens).value
                b, _ = opt.variational_F(ch, R, ens)
                s = opt.f1_f2_split(ch, R, ens)
                forms.record(-abs(a - b), 1e-4, (c, name, R))
                split.record(-abs(b - s.F), 1e-4, (c, name, R))
    return SuiteReport("exponent_forms", [forms, split])


def suite_simulator(p: float = 0.1, blocklengths=(1, 2, 3, 4, 5), seed: int = 7,
                    slack: float = 0.05) -> SuiteReport:
    """Dense coding, the converse inequality for random codes, and padding."""
    ident = ops.QuantumChannel.identity(2)
    dense = CheckResult("dense_coding")
    code = coding.build_ea_code(ident, 1, None, 2.0, seed=seed)
    dense.record(coding.success_probability(ident, code) - 1.0, 1e-12)
    ch = ops.QuantumChannel.depolarizing(p)
    cap = opt.ea_capacity(ch).value
    R = cap + 0.2
    sc = opt.strong_converse_exponent(ch, R, cap).value
    conv = CheckResult("converse_inequality")
    pad = CheckResult("padding_identity")
    for n in blocklengths:
        code = coding.build_ea_code(ch, n, None, R, seed=seed + n)
        ps = coding.success_probability(ch, code)
        conv.record(-math.log2(ps) / n - (sc - slack), 0.0, n)
        padded = coding.pad_code(code, 3 * code.M + 1)
        ratio = coding.success_probability(ch, padded) * padded.M / (ps * code.M)
        pad.record(-abs(ratio - 1.0), 1e-12, n)
    conv.detail["sc"] = sc
    return SuiteReport("simulator", [dense, conv, pad])


SUITES: dict[str, Callable[[], SuiteReport]] = {
    "divergence": suite_divergence,
    "commuting": suite_commuting,
    "pinching": suite_pinching,
    "symmetric": suite_symmetric,
    "identity": suite_identity,
    "capacity": suite_capacity,
    "exponent_forms": suite_exponent_forms,
    "simulator": suite_simulator,
}


ALIASES = {"prop1": "divergence"}


def run_suite(name: str) -> SuiteReport:
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    t = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", opt.MultimodalityWarning)
        report = SUITES[name]()
    report.seconds = time.perf_counter() - t
    return report
