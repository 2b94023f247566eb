"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
and appending it to reports/acceptance.txt.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to watch the
lines stream).  The long opt-in run is marked ``stretch`` and needs
QSPREADS_STRETCH=1.
"""

import json
import math
import os
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from qspreads import bounds, oracles, serialize
from qspreads.cli import main as cli_main
from qspreads.errors import CertificationError
from qspreads.field import ScalarField, build_tower
from qspreads.linalg import Matrix, gl_iter, random_gl
from qspreads.search import (SearchConfig, base_frame, greedy_construct,
                             in_generating_set, union_size_exact)
from qspreads.spreads import certify_parallelism, certify_spread, spread_image

REPORTS = Path(__file__).resolve().parent.parent / "reports"
_towers = {}


def tower(p, e, k, n):
    key = (p, e, k, n)
    if key not in _towers:
        _towers[key] = build_tower(p, e, k, n)
    return _towers[key]


def record(criterion: str, ok: bool, detail: str):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    REPORTS.mkdir(exist_ok=True)
    with open(REPORTS / "acceptance.txt", "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    assert ok, line


def test_c01_gaussian_formula_vs_enumeration():
    start = time.time()
    checked = 0
    for q in (2, 3):
        for n in range(1, 6):
            for k in range(n + 1):
                assert oracles.count_subspaces_brute(n, k, q) == \
                    bounds.gaussian_binomial(n, k, q), (n, k, q)
                checked += 1
    assert bounds.gaussian_binomial(4, 2, 2) == 35
    elapsed = time.time() - start
    record("C1", elapsed < 10,
           f"{checked} (n,k,q) grid points agree, [4,2]_2 = 35 "
           f"({elapsed:.1f}s < 10s)")


def test_c02_gl_stream_counts():
    start = time.time()
    results = []
    for (n, q, want) in ((2, 2, 6), (2, 3, 48), (3, 2, 168), (4, 2, 20160)):
        field = ScalarField.for_prime_power(q)
        count = sum(1 for _ in gl_iter(n, field))
        assert count == bounds.gl_order(n, q) == want
        results.append(f"GL({n},{q})={count}")
    elapsed = time.time() - start
    record("C2", elapsed < 10, ", ".join(results) + f" ({elapsed:.1f}s < 10s)")


def test_c03_transporter_counts():
    start = time.time()
    wants = {(2, 1, 2): 2, (2, 1, 3): 12, (3, 1, 2): 24, (4, 2, 2): 576}
    reps = oracles.run_transporter_checks(
        instances=tuple(wants), pairs=3, seed=2024)
    for r in reps:
        inst = (r.instance["n"], r.instance["k"], r.instance["q"])
        assert r.formula == wants[inst]
        assert r.match, r.line()
    elapsed = time.time() - start
    record("C3", elapsed < 60,
           f"{len(reps)} random (u,v) pairs match q^k(n-k)|GL(k)||GL(n-k)| "
           f"({elapsed:.1f}s < 60s)")


def test_c04_spread_images_certify():
    start = time.time()
    rng = random.Random(404)
    total = 0
    for (p, k, n) in ((2, 2, 4), (2, 2, 6)):
        t = tower(p, 1, k, n)
        frame = base_frame(t)
        for _ in range(1000):
            m = random_gl(n, t.scalar_field, rng)
            s = spread_image(m, frame.base)
            assert certify_spread(s.members).ok
            total += 1
    elapsed = time.time() - start
    record("C4", elapsed < 30,
           f"{total} random spread images certified at (4,2,2) and (6,2,2) "
           f"({elapsed:.1f}s < 30s)")


def test_c05_pair_triple_intersection_counts():
    start = time.time()
    for (q, pair_want, triple_want) in ((2, 36, 6), (3, 2304, 48)):
        reps = oracles.run_intersection_checks(
            instances=((4, 2, q),), choices=5, threads=2)
        pair_reps = [r for r in reps if "pairs" in r.instance]
        triple_reps = [r for r in reps if "triple" in r.instance]
        assert len(pair_reps) >= 10 and len(triple_reps) >= 10
        for r in pair_reps:
            assert r.match and r.formula == pair_want, r.line()
        for r in triple_reps:
            assert r.match and r.formula == triple_want, r.line()
    elapsed = time.time() - start
    record("C5", elapsed < 300,
           f"pairwise = |GL(k,q)|^2 and triple = |GL(k,q)| at (4,2,2) and "
           f"(4,2,3), 10 normalized + 10 arbitrary choices each "
           f"({elapsed:.1f}s < 300s)")


def test_c06_closed_form_bound_values():
    r = bounds.bound_thm33(4, 2, 2)
    N = (2**4 - 1) // (2**2 - 1)
    denom = (N * N * 2**4 * bounds.gl_order(2, 2) ** 2
             - Fraction((2**4 - 1) ** 2, 2**2 - 1) + (2**4 - 1))
    assert r.value == Fraction(bounds.gl_order(4, 2)) / denom
    assert r.value == Fraction(336, 239) == Fraction(20160, 14340)
    assert r.integer_bound == 2
    r3 = bounds.bound_thm33(4, 2, 3)
    N3 = (3**4 - 1) // (3**2 - 1)
    denom3 = (N3 * N3 * 3**4 * bounds.gl_order(2, 3) ** 2
              - Fraction((3**4 - 1) ** 2, 3**2 - 1) + (3**4 - 1))
    assert denom3 == 18661680
    assert r3.value == Fraction(24261120, 18661680)
    assert r3.integer_bound == 2
    record("C6", True,
           "thm33(4,2,2) = 336/239 (int 2), thm33(4,2,3) = "
           "24261120/18661680 (int 2), factors recomputed independently")


def test_c07_strict_bound_values_and_ordering():
    assert bounds.bound_cor34(4, 2, 2).value == Fraction(7, 5)
    assert bounds.bound_cor34(4, 2, 2).integer_bound == 2
    assert bounds.bound_cor34(6, 2, 2).value == Fraction(31, 21)
    assert bounds.bound_cor34(6, 2, 2).integer_bound == 2
    assert bounds.bound_cor34(6, 3, 2).value == Fraction(1085, 63)
    assert bounds.bound_cor34(6, 3, 2).integer_bound == 18
    checked = 0
    for q in (2, 3):
        for n in range(2, 9):
            for k in range(1, n):
                if n % k:
                    continue
                c = bounds.bound_cor34(n, k, q).value
                t = bounds.bound_thm33(n, k, q).value
                u = bounds.upper_bound(n, k, q).value
                assert c < t <= u, (n, k, q)
                checked += 1
    record("C7", True,
           f"cor34 values exact; cor34 < thm33 <= upper on {checked} "
           f"instances with n <= 8, q in {{2,3}}")


def test_c08_greedy_realizes_lower_bound():
    start = time.time()
    t = tower(2, 1, 2, 4)
    frame = base_frame(t)
    stats = union_size_exact(t)
    assert stats.gl_order == 20160
    assert stats.degree == stats.union_size - 1
    # identity transports every member but is excluded from the generating set
    ident = Matrix.identity(t.scalar_field, 4)
    assert frame.transports_any(ident)
    assert not in_generating_set(ident, frame)
    pp = greedy_construct(SearchConfig(mode="exhaustive"), t)
    assert certify_parallelism(pp.spreads).ok
    guarantee = math.ceil(Fraction(20160, stats.union_size))
    assert guarantee >= 2
    assert pp.size >= guarantee
    rng = random.Random(808)
    from qspreads.search import symmetric_closure_check
    assert all(symmetric_closure_check(random_gl(4, t.scalar_field, rng),
                                       frame) for _ in range(1000))
    elapsed = time.time() - start
    record("C8", elapsed < 120,
           f"exhaustive greedy at (4,2,2): {pp.size} certified spreads >= "
           f"ceil(20160/{stats.union_size}) = {guarantee}; degree = "
           f"union - 1 = {stats.degree}; S = S^-1 on 1000 samples "
           f"({elapsed:.1f}s < 120s)")


def test_c09_union_formula_diagnostic():
    start = time.time()
    rep, obj = oracles.run_union_comparison(4, 2, 2)
    REPORTS.mkdir(exist_ok=True)
    out = REPORTS / "thm32_union_comparison_4_2_2.json"
    out.write_text(json.dumps(obj, indent=2) + "\n")
    if not rep.match:
        print("WARNING: closed-form L disagrees with the enumerated union; "
              "the enumeration is ground truth")
    elapsed = time.time() - start
    record("C9", elapsed < 120,
           f"L term breakdown vs enumerated union at (4,2,2): L = {obj['L']}, "
           f"union = {obj['union_enumerated']}, match = {rep.match}; "
           f"archived to {out.name} ({elapsed:.1f}s < 120s)")


def test_c10_scalar_map_overcount():
    start = time.time()
    rep = oracles.scalar_overcount_check(tower(2, 1, 2, 4))
    assert rep.match, rep.line()
    assert "15 maps" in rep.detail and rep.formula == 5
    elapsed = time.time() - start
    record("C10", elapsed < 60,
           f"all 15 scalar maps lie in exactly N = 5 transporter sets "
           f"({elapsed:.1f}s < 60s)")


def test_c11_end_to_end_reproducibility(tmp_path):
    start = time.time()
    args = ["construct", "--n", "6", "--k", "2", "--q", "2",
            "--mode", "random", "--seed", "7", "--limit", "100000"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli_main(args + ["--out", str(a)]) == 0
    assert cli_main(args + ["--out", str(b)]) == 0
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert cli_main(["certify", str(a)]) == 0
    rng = random.Random(1111)
    rejected = 0
    mut_path = tmp_path / "mut.json"
    for _ in range(100):
        mut = bytearray(data)
        pos = rng.randrange(len(mut))
        new = mut[pos]
        while new == mut[pos]:
            new = rng.randrange(32, 127)
        mut[pos] = new
        mut_path.write_bytes(mut)
        try:
            serialize.certify_file(mut_path)
        except CertificationError:
            rejected += 1
    assert rejected == 100
    elapsed = time.time() - start
    record("C11", elapsed < 300,
           f"two seeded 100000-candidate runs at (6,2,2) byte-identical, "
           f"certified, and 100/100 single-byte mutations rejected "
           f"({elapsed:.1f}s < 300s)")


@pytest.mark.stretch
@pytest.mark.skipif(os.environ.get("QSPREADS_STRETCH") != "1",
                    reason="stretch run; set QSPREADS_STRETCH=1 to enable")
def test_c12_stretch_exhaustive_4_2_3():
    start = time.time()
    t = tower(3, 1, 2, 4)
    pp = greedy_construct(SearchConfig(mode="exhaustive"), t)
    assert certify_parallelism(pp.spreads).ok
    assert pp.size >= 2
    elapsed = time.time() - start
    record("C12", elapsed < 1800,
           f"exhaustive greedy over |GL(4,3)| = 24261120 candidates: "
           f"{pp.size} certified spreads ({elapsed:.1f}s < 1800s)")
