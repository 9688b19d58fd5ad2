"""Acceptance suite: one test per exit criterion, each with its time bound.

Each test prints a single ``criterion N: PASS|FAIL`` line; the terminal
summary (see conftest.py) repeats them together at the end of the run.
"""

import math
import os
import random
import time
from itertools import combinations

import numpy as np
import pytest

from msrcode.cli import main as cli_main
from msrcode.codec import ErasureState, decode, decode_naive, encode, repair, repair_planes
from msrcode.cube import parity_check_matrix, plane_digits
from msrcode.errors import UnrecoverableError
from msrcode.params import assign_thetas, derive_params, select_field
from msrcode.shards import shard_name, stripe_count
from msrcode.solver import rank
from msrcode.verify import verify_base_determinants, verify_mds, verify_thetas

ALL_SETS = [(4, 2, 3), (6, 3, 4), (5, 2, 3), (6, 2, 3), (6, 3, 5), (8, 4, 7), (8, 3, 6)]
EXHAUSTIVE_SETS = [(4, 2, 3), (6, 3, 4), (6, 2, 3), (6, 3, 5), (8, 4, 7), (5, 2, 3)]


def _report(num, ok, elapsed, limit, detail=""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    print(f"criterion {num}: {status} ({elapsed:.2f}s < {limit}s) {detail}")
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.2f}s, bound {limit}s"


@pytest.mark.acceptance(1, "parameter identities alpha = q^ceil(n/q), beta = alpha/q")
def test_criterion_1_parameter_identities():
    start = time.perf_counter()
    bad = []
    for n, k, d in ALL_SETS:
        p = derive_params(n, k, d)
        if p.alpha != p.q ** math.ceil(n / p.q) or p.beta * p.q != p.alpha:
            bad.append((n, k, d))
    _report(1, not bad, time.perf_counter() - start, 1.0, f"{len(ALL_SETS)} parameter sets {bad}")


@pytest.mark.acceptance(2, "field-size recipe for t in [2, 6]")
def test_criterion_2_field_size():
    start = time.perf_counter()
    bad = []
    for q in (2, 3, 4):
        w = 1 if q == 2 else 3
        for t in range(2, 7):
            m = select_field(q, t)
            size = 2 ** m
            need = 6 * t + 2 if q == 2 else 18 * t + 2
            if size < need or (size - 1) // 3 <= w * t:
                bad.append((q, t, m))
    _report(2, not bad, time.perf_counter() - start, 1.0, f"15 (q, t) pairs {bad}")


@pytest.mark.acceptance(3, "θ table invariants for q in {2,3,4}, t in [2, 6]")
def test_criterion_3_theta_invariants():
    start = time.perf_counter()
    bad = []
    for q in (2, 3, 4):
        for t in range(2, 7):
            n = q * t
            p = derive_params(n, n - q, n - 1)
            report = verify_thetas(assign_thetas(p))
            four = [c for c in report.checks if c.name != "theta.coset_placement"]
            if len(four) != 4 or not all(c.passed for c in four):
                bad.append((q, t, [c.name for c in report.failures()]))
    _report(3, not bad, time.perf_counter() - start, 1.0, f"15 tables {bad}")


@pytest.mark.acceptance(4, "base-case determinants match closed forms")
def test_criterion_4_base_determinants():
    start = time.perf_counter()
    bad = []
    for nkd in [(4, 2, 3), (6, 3, 5), (8, 4, 7)]:
        p = derive_params(*nkd)
        report = verify_base_determinants(p, assign_thetas(p), trials=100, seed=1)
        if not report.passed:
            bad.append((nkd, [c.detail for c in report.failures()]))
    _report(4, not bad, time.perf_counter() - start, 5.0, f"q=2,3,4 table + 100 draws each {bad}")


@pytest.mark.acceptance(5, "exhaustive MDS: every r-erasure decodes, rank r*alpha")
def test_criterion_5_exhaustive_mds():
    start = time.perf_counter()
    bad, count = [], 0
    for nkd in EXHAUSTIVE_SETS:
        p = derive_params(*nkd)
        table = assign_thetas(p)
        word = encode(np.random.default_rng(5).integers(0, p.Q, p.k * p.alpha), p, table)
        patterns = list(combinations(p.real_nodes, p.r))
        assert len(patterns) == math.comb(p.n, p.r)
        for erased in patterns:
            count += 1
            if rank(table.field, parity_check_matrix(table, nodes=erased)) != p.r * p.alpha:
                bad.append((nkd, erased, "rank"))
            if decode(ErasureState.from_codeword(word, erased), p, table) != word:
                bad.append((nkd, erased, "decode"))
    _report(5, not bad, time.perf_counter() - start, 60.0, f"{count} patterns {bad[:3]}")


@pytest.mark.acceptance(6, "exhaustive repair with optimal access")
def test_criterion_6_exhaustive_repair():
    start = time.perf_counter()
    bad, count, same_section_aloof = [], 0, 0
    for nkd in EXHAUSTIVE_SETS:
        p = derive_params(*nkd)
        table = assign_thetas(p)
        word = encode(np.random.default_rng(6).integers(0, p.Q, p.k * p.alpha), p, table)
        for failed in p.real_nodes:
            x0, y0 = failed % p.q, failed // p.q
            others = [v for v in p.real_nodes if v != failed]
            for helpers in combinations(others, p.d):
                count += 1
                lost = word.copy()
                lost.symbols[failed] = 0
                rebuilt, trace = repair(lost, failed, helpers, p, table)
                if not np.array_equal(rebuilt, word.symbols[failed]):
                    bad.append((nkd, failed, helpers, "symbols"))
                for h, sent in trace.payload.items():
                    if (len(sent) != p.beta
                            or any(plane_digits(z, p.q, p.t)[y0] != x0 for z, _ in sent)
                            or any(v != word.symbols[h, z] for z, v in sent)):
                        bad.append((nkd, failed, helpers, f"payload of {h}"))
                if len({a // p.q for a in trace.aloof}) < len(trace.aloof):
                    same_section_aloof += 1
    ok = not bad and same_section_aloof > 0
    _report(6, ok, time.perf_counter() - start, 120.0,
            f"{count} (failed, helpers) cases, {same_section_aloof} with same-section aloof pairs {bad[:3]}")


@pytest.mark.acceptance(7, "sequential decoder equals single-system decoder")
def test_criterion_7_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(7)
    bad, instances = [], 120
    for i in range(instances):
        nkd = rng.choice(ALL_SETS)
        p = derive_params(*nkd)
        table = assign_thetas(p)
        msg = np.array([rng.randrange(p.Q) for _ in range(p.k * p.alpha)])
        word = encode(msg, p, table)
        erased = rng.sample(list(p.real_nodes), rng.randint(1, p.r))
        state = ErasureState.from_codeword(word, erased)
        fast, slow = decode(state, p, table), decode_naive(state, p, table)
        if fast != slow or fast != word:
            bad.append((nkd, sorted(erased)))
    _report(7, not bad, time.perf_counter() - start, 60.0, f"{instances} random instances {bad[:3]}")


def _cli(*argv):
    return cli_main([str(a) for a in argv])


@pytest.mark.acceptance(8, "CLI round trip: decode from any k shards, repair one shard")
def test_criterion_8_cli_round_trip(tmp_path, capsys):
    start = time.perf_counter()
    bad, runs = [], 0
    for n, k, d in [(4, 2, 3), (6, 3, 4)]:
        p = derive_params(n, k, d)
        width = (p.m + 7) // 8
        for size in (0, 1, 17, 4096):
            work = tmp_path / f"{n}{k}{d}_{size}"
            work.mkdir()
            data = os.urandom(size)
            (work / "in.bin").write_bytes(data)
            shards = work / "shards"
            assert _cli("encode", "--n", n, "--k", k, "--d", d,
                        "--input", work / "in.bin", "--out-dir", shards) == 0
            originals = {v: (shards / shard_name(v)).read_bytes() for v in range(n)}

            for removed in combinations(range(n), n - k):
                sub = work / ("dec_" + "_".join(map(str, removed)))
                sub.mkdir()
                for v in range(n):
                    if v not in removed:
                        (sub / shard_name(v)).write_bytes(originals[v])
                runs += 1
                rc = _cli("decode", "--shards", sub, "--out", sub / "out.bin")
                if rc != 0 or (sub / "out.bin").read_bytes() != data:
                    bad.append(("decode", n, size, removed))

            stripes = stripe_count(size, p)
            for failed in range(n):
                sub = work / f"rep_{failed}"
                sub.mkdir()
                for v in range(n):
                    if v != failed:
                        (sub / shard_name(v)).write_bytes(originals[v])
                capsys.readouterr()
                runs += 1
                rc = _cli("repair", "--failed", failed, "--shards", sub, "--out", sub / "r.shard")
                out = capsys.readouterr().out
                reads = [ln for ln in out.splitlines() if ln.startswith("helper ")]
                expected = f"read {stripes * p.beta * width} bytes"
                if (rc != 0 or (sub / "r.shard").read_bytes() != originals[failed]
                        or len(reads) != d or not all(expected in ln for ln in reads)):
                    bad.append(("repair", n, size, failed))
    _report(8, not bad, time.perf_counter() - start, 30.0, f"{runs} CLI runs {bad[:3]}")


@pytest.mark.acceptance(9, "negative controls: duplicated θ and r+1 erasures")
def test_criterion_9_negative_controls():
    start = time.perf_counter()
    failures = []
    for nkd in [(4, 2, 3), (6, 3, 4), (6, 3, 5), (8, 4, 7)]:
        p = derive_params(*nkd)
        table = assign_thetas(p)
        broken = table.with_base({(1, 0): table.base[(1, p.t - 1)]})
        caught = not verify_thetas(broken).passed or not verify_mds(p, broken).passed
        if not caught:
            failures.append((nkd, "duplicate θ not reported"))
        word = encode(np.ones(p.k * p.alpha, dtype=np.int64), p, table)
        try:
            decode(ErasureState.from_codeword(word, range(p.r + 1)), p, table)
            failures.append((nkd, "r+1 erasures accepted"))
        except UnrecoverableError:
            pass
    _report(9, not failures, time.perf_counter() - start, 5.0, f"4 parameter sets {failures}")
