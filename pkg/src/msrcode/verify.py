"""Desk-scale verification of a code instance.

Every check is exhaustive when the number of cases fits the budget and
falls back to seeded uniform sampling otherwise; the report records which.
"""

import random
import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

import numpy as np

from .codec import ErasureState, decode, encode, repair, repair_planes
from .cube import parity_check_matrix
from .errors import MSRError
from .gf2m import cosets
from .solver import determinant, rank

DEFAULT_BUDGET = 100_000


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    params: object
    checks: list = dc_field(default_factory=list)
    elapsed: float = 0.0
    sampled: bool = False
    seed: int = 0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def merge(self, other):
        self.checks.extend(other.checks)
        self.elapsed += other.elapsed
        self.sampled = self.sampled or other.sampled
        return self

    def lines(self):
        """One tab-separated ``name, status, detail`` line per check."""
        return [f"{c.name}\t{'PASS' if c.passed else 'FAIL'}\t{c.detail}" for c in self.checks]

    def render(self):
        p = self.params
        head = f"verification of (n={p.n}, k={p.k}, d={p.d})"
        if self.sampled:
            head += f" [sampled, seed={self.seed}]"
        out = [head]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            status = "ok  " if c.passed else "FAIL"
            out.append(f"  {status} {c.name.ljust(width)}  {c.detail}")
        out.append(f"{'all checks passed' if self.passed else f'{len(self.failures())} check(s) failed'}"
                   f" in {self.elapsed:.2f}s")
        return "\n".join(out)


def _cases(total, make_all, sample_one, budget, seed):
    """All cases if ``total <= budget``, else ``budget`` seeded samples."""
    if total <= budget:
        return list(make_all()), False
    rng = random.Random(seed)
    return [sample_one(rng) for _ in range(budget)], True


# θ table

def verify_thetas(table):
    started = time.perf_counter()
    p, f, gamma = table.params, table.field, table.gamma
    q, t, w = p.q, p.t, p.w
    report = VerificationReport(p)

    bad = [(x, y) for y in range(t) for x in range(q) if table.theta(x, y, x) != table.base[(0, y)]]
    report.add("theta.diagonal", not bad, f"violations at (x, y) = {bad}" if bad else "θ_{x,y;x} = θ_{0,y}")

    bad = [(x, y, z) for y in range(t) for x in range(q) for z in range(x)
           if table.theta(x, y, z) != f.mul(gamma, table.theta(z, y, x))]
    report.add("theta.reciprocity", not bad,
               f"violations at (x, y, z) = {bad}" if bad else "θ_{x,y;z} = γ θ_{z,y;x} for x > z")

    bad = []
    for y in range(t):
        for x in range(q):
            coll = [table.theta(x, y, x)]
            for i in range(q):
                if i != x:
                    coll += [table.theta(x, y, i), table.theta(i, y, x)]
            if len(set(coll)) != len(coll):
                bad.append((x, y))
    report.add("theta.per_node_distinct", not bad,
               f"repeated values at (x, y) = {bad}" if bad else f"{q * t} collections")

    coll = []
    for y in range(t):
        coll.append(table.base[(0, y)])
        for i in range(1, w + 1):
            coll += [table.base[(i, y)], f.mul(gamma, table.base[(i, y)])]
    dup = sorted({v for v in coll if coll.count(v) > 1})
    ok = not dup and 0 not in coll
    report.add("theta.global_distinct", ok,
               f"repeated values {dup}" if dup else f"{len(coll)} distinct nonzero values")

    cos = cosets(f)
    g, g2 = set(cos.g), set(cos.gamma2_g)
    bad = [(i, y) for (i, y), v in sorted(table.base.items()) if v not in (g2 if i == 0 else g)]
    report.add("theta.coset_placement", not bad and gamma == f.lam,
               f"misplaced θ_(i,y) at {bad}" if bad else "θ_{i,y} in G, θ_{0,y} in γ²G, γ = λ")
    report.elapsed = time.perf_counter() - started
    return report


# base-case determinants

def _v(field, theta, d):
    return [field.pow(theta, j) for j in range(d)]


def _vblock(field, gamma, theta, d, scaled=False):
    """V = [v(γθ), v(θ)] of shape (d, 2); ``scaled`` multiplies by Γ = diag(γ, 1)."""
    first = _v(field, field.mul(gamma, theta), d)
    if scaled:
        first = [field.mul(gamma, e) for e in first]
    return np.array([first, _v(field, theta, d)], dtype=np.int64).T


def base_matrix(field, gamma, q, thetas):
    """The single-section reduced matrix with q-1 erasures, size (q-1)q x (q-1)q.

    ``thetas`` is (θ_1, θ_2, θ_3) of the section; unused entries are ignored.
    """
    d = q - 1
    t1, t2, t3 = thetas

    def V(th):
        return _vblock(field, gamma, th, d)

    def VG(th):
        return _vblock(field, gamma, th, d, scaled=True)

    Z = np.zeros((d, 2), dtype=np.int64)
    if q == 2:
        rows = [[V(t1)], [VG(t1)]]
    elif q == 3:
        rows = [[V(t1), V(t2), Z],
                [VG(t1), Z, V(t3)],
                [Z, VG(t2), VG(t3)]]
    elif q == 4:
        rows = [[V(t1), V(t2), V(t3), Z, Z, Z],
                [VG(t1), Z, Z, Z, V(t2), V(t3)],
                [Z, VG(t2), Z, V(t1), Z, VG(t3)],
                [Z, Z, VG(t3), VG(t1), VG(t2), Z]]
    else:
        raise ValueError(f"q={q} not in {{2, 3, 4}}")
    return np.block(rows)


def base_determinant_closed_form(field, gamma, q, thetas):
    f = field
    t1, t2, t3 = thetas
    one_minus_g = 1 ^ gamma

    def prod(*xs):
        out = 1
        for x in xs:
            out = f.mul(out, x)
        return out

    if q == 2:
        return one_minus_g
    if q == 3:
        return prod(gamma, f.pow(one_minus_g, 4), t1, t2 ^ t1, t2 ^ t3)
    if q == 4:
        g = lambda v: f.mul(gamma, v)  # noqa: E731
        return prod(f.pow(gamma, 4), f.pow(one_minus_g, 6),
                    f.pow(t1 ^ t2, 2), f.pow(t1 ^ t3, 2), f.pow(t2 ^ t3, 4),
                    t1 ^ g(t3), g(t1) ^ t3, t1 ^ g(t2), g(t1) ^ t2)
    raise ValueError(f"q={q} not in {{2, 3, 4}}")


def verify_base_determinants(params, table, trials=100, seed=0):
    started = time.perf_counter()
    f, gamma, q = table.field, table.gamma, params.q
    report = VerificationReport(params, seed=seed)
    name = f"base_det.q{q}"

    def compare(thetas):
        el = determinant(f, base_matrix(f, gamma, q, thetas))
        cf = base_determinant_closed_form(f, gamma, q, thetas)
        return el, cf

    mismatches = []
    for y in range(params.t):
        thetas = tuple(table.base.get((i, y), 0) for i in (1, 2, 3))
        el, cf = compare(thetas)
        if el != cf or el == 0:
            mismatches.append((y, thetas, el, cf))
    report.add(f"{name}.table", not mismatches,
               f"mismatch (y, θ, elimination, closed form) = {mismatches[0]}" if mismatches
               else f"{params.t} sections, det = closed form ≠ 0")

    rng = random.Random(seed)
    mismatches = []
    for _ in range(trials):
        thetas = tuple(rng.randrange(1, f.size) for _ in range(3))
        el, cf = compare(thetas)
        if el != cf:
            mismatches.append((thetas, el, cf))
    report.add(f"{name}.random", not mismatches,
               f"mismatch (θ, elimination, closed form) = {mismatches[0]}" if mismatches
               else f"{trials} random draws agree")
    report.elapsed = time.perf_counter() - started
    return report


# MDS property

def verify_mds(params, table, budget=DEFAULT_BUDGET, seed=0):
    started = time.perf_counter()
    p = params
    report = VerificationReport(p, seed=seed)
    total = comb(p.n, p.r)
    patterns, sampled = _cases(
        total, lambda: combinations(p.real_nodes, p.r),
        lambda rng: tuple(sorted(rng.sample(range(p.n), p.r))), budget, seed)
    report.sampled = sampled

    rng = np.random.default_rng(seed)
    msg = rng.integers(0, p.Q, p.k * p.alpha)
    try:
        word = encode(msg, p, table)
    except MSRError as exc:
        report.add("mds.encode", False, f"encoding failed: {exc}")
        report.elapsed = time.perf_counter() - started
        return report

    rank_fail, decode_fail = [], []
    for pattern in patterns:
        h = parity_check_matrix(table, nodes=pattern)
        rk = rank(table.field, h)
        if rk != p.r * p.alpha:
            rank_fail.append((pattern, rk))
        try:
            got = decode(ErasureState.from_codeword(word, pattern), p, table)
            if got != word:
                decode_fail.append((pattern, "wrong symbols"))
        except MSRError as exc:
            decode_fail.append((pattern, str(exc)))
    label = f"{len(patterns)}/{total} patterns" + (" (sampled)" if sampled else "")
    report.add("mds.rank", not rank_fail,
               f"erased set {rank_fail[0][0]} has rank {rank_fail[0][1]} < {p.r * p.alpha}"
               if rank_fail else f"{label}, rank = r*alpha = {p.r * p.alpha}")
    report.add("mds.decode", not decode_fail,
               f"erased set {decode_fail[0][0]}: {decode_fail[0][1]}" if decode_fail
               else f"{label} decode exactly")
    report.elapsed = time.perf_counter() - started
    return report


# repair

def verify_repair(params, table, budget=DEFAULT_BUDGET, seed=0):
    started = time.perf_counter()
    p = params
    report = VerificationReport(p, seed=seed)
    report.add("repair.msr_point", p.alpha == (p.d - p.k + 1) * p.beta,
               f"alpha = {p.alpha} = (d-k+1)*beta = {(p.d - p.k + 1) * p.beta}")
    if p.k >= 2:
        report.add("repair.bandwidth", p.d * p.beta < p.k * p.alpha,
                   f"d*beta = {p.d * p.beta} < k*alpha = {p.k * p.alpha}")

    def all_cases():
        for failed in p.real_nodes:
            others = [v for v in p.real_nodes if v != failed]
            for helpers in combinations(others, p.d):
                yield failed, helpers

    def one_case(rng):
        failed = rng.randrange(p.n)
        others = [v for v in p.real_nodes if v != failed]
        return failed, tuple(sorted(rng.sample(others, p.d)))

    total = p.n * comb(p.n - 1, p.d)
    cases, sampled = _cases(total, all_cases, one_case, budget, seed)
    report.sampled = sampled

    rng = np.random.default_rng(seed)
    word = encode(rng.integers(0, p.Q, p.k * p.alpha), p, table)
    wrong, access = [], []
    for failed, helpers in cases:
        lost = word.copy()
        lost.symbols[failed] = 0
        try:
            rebuilt, trace = repair(lost, failed, helpers, p, table)
        except MSRError as exc:
            wrong.append((failed, helpers, str(exc)))
            continue
        if not np.array_equal(rebuilt, word.symbols[failed]):
            wrong.append((failed, helpers, "wrong symbols"))
        planes = repair_planes(p, failed)
        for h, sent in trace.payload.items():
            ok = (len(sent) == p.beta
                  and tuple(z for z, _ in sent) == planes
                  and all(v == word.symbols[h, z] for z, v in sent))
            if not ok:
                access.append((failed, helpers, h))
    label = f"{len(cases)}/{total} (failed, helpers) cases" + (" (sampled)" if sampled else "")
    report.add("repair.exact", not wrong,
               f"failed={wrong[0][0]} helpers={wrong[0][1]}: {wrong[0][2]}" if wrong
               else f"{label} repair exactly")
    report.add("repair.optimal_access", not access,
               f"failed={access[0][0]} helpers={access[0][1]}: helper {access[0][2]} payload wrong"
               if access else f"every helper sends beta={p.beta} stored symbols from z_(y0)=x0 planes")
    report.elapsed = time.perf_counter() - started
    return report


def verify_all(params, table, budget=DEFAULT_BUDGET, trials=100, seed=0):
    report = VerificationReport(params, seed=seed)
    for part in (verify_thetas(table),
                 verify_base_determinants(params, table, trials=trials, seed=seed),
                 verify_mds(params, table, budget=budget, seed=seed),
                 verify_repair(params, table, budget=budget, seed=seed)):
        report.merge(part)
    return report
