"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are echoed in the pytest
terminal summary and printed when this file is run as a script.
"""

import time

import numpy as np
import pytest

from nclp.algebra import Algebra, Element
from nclp.config import DEFAULT
from nclp.map_norms import amplified_norm, op_norm, s1_map_norm
from nclp.maps import amplify_sp, is_completely_positive, random_cp_map, transpose_map
from nclp.s1_solver import s1_norm_opt
from nclp.schatten import lp_norm
from nclp.vector_valued import GridElement, s1_corner_check, s1_norm_p1, s1_norm_positive, to_tensor_element, unit_grid
from nclp.verify import anti_isometry, direct_isometry, transpose_witness_factorization
from nclp.yeadon import IsometrySpec, classify, extract_triple, generate_isometry, scaled_transpose_pair_map, theorem_gate, triple_matches

RESULTS = {}
CONFIG = DEFAULT


def record(k, ok, detail):
    RESULTS[k] = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[k])
    assert ok, RESULTS[k]


def random_grid(alg, n, rng, positive=False):
    blocks = []
    for d in alg.dims:
        g = rng.standard_normal((n * d, n * d)) + 1j * rng.standard_normal((n * d, n * d))
        blocks.append(g @ g.conj().T if positive else g)
    return GridElement(alg, n, blocks)


def test_criterion_01_amplified_transpose():
    start = time.perf_counter()
    worst, fails = 0.0, []
    for n in (2, 3):
        for p in (1.0, 4 / 3, 4.0):
            target = n ** (2 * abs(0.5 - 1 / p))
            v = amplified_norm(transpose_map(n), p, n, CONFIG).value
            worst = max(worst, (target - v) / target)
            if not target * (1 - 1e-2) <= v <= target + 1e-6:
                fails.append((n, p, v, target))
    elapsed = time.perf_counter() - start
    record(1, not fails and elapsed < 60, f"worst relative shortfall {worst:.2e}, {elapsed:.1f}s (< 60s), failures {fails}")


def test_criterion_02_proof_constants():
    worst = 0.0
    for n in (2, 3):
        z = to_tensor_element(unit_grid(n))
        sw = amplify_sp(transpose_map(n), n).apply(z)
        for p in (1.0, 2.0, 4.0):
            worst = max(worst, abs(lp_norm(z, p) - n), abs(lp_norm(sw, p) - n ** (2 / p)))
    record(2, worst <= 1e-10, f"max deviation {worst:.2e} (<= 1e-10)")


def test_criterion_03_s1_values():
    start = time.perf_counter()
    fails, worst = [], 0.0
    for n in (2, 3):
        for p in (1.0, 2.0, 4.0):
            pos = s1_norm_positive(unit_grid(n), p)
            if abs(pos - n ** (1 / p)) > 1e-10:
                fails.append(("positive", n, p, pos))
            r = s1_norm_opt(unit_grid(n, transpose=True), p, CONFIG, seed=transpose_witness_factorization(n))
            target = n ** (1 + 1 / p)
            worst = max(worst, abs(r.upper - target) / target)
            if abs(r.upper - target) > 1e-2 * target:
                fails.append(("transpose grid", n, p, r.upper))
            v = s1_map_norm(transpose_map(n), p, n, CONFIG).value
            if v < n * (1 - 2e-2):
                fails.append(("map norm", n, p, v))
    elapsed = time.perf_counter() - start
    record(3, not fails and elapsed < 120, f"[E_ji] worst rel error {worst:.2e}, {elapsed:.1f}s (< 120s), failures {fails}")


def test_criterion_04_p1_equivalence():
    rng = np.random.default_rng(4)
    M2 = Algebra.matrix(2)
    worst = 0.0
    for _ in range(25):
        X = random_grid(M2, 2, rng)
        exact = s1_norm_p1(X)
        worst = max(worst, abs(s1_norm_opt(X, 1, CONFIG).upper - exact) / exact)
    record(4, worst <= 1e-2, f"25 grids, worst relative error {worst:.2e} (<= 1e-2)")


def test_criterion_05_positive_cone():
    rng = np.random.default_rng(5)
    algs = [Algebra.matrix(2), Algebra.matrix(3, 0.5), Algebra.of([1, 2], [2.0, 1.0])]
    ps = [1.5, 2.0, 3.0, 4.0]
    worst, below = 0.0, 0.0
    for i in range(25):
        alg, p = algs[i % len(algs)], ps[i % len(ps)]
        X = random_grid(alg, 2 + i % 2, rng, positive=True)
        target = lp_norm(X.diagonal_sum(), p)
        up = s1_norm_opt(X, p, CONFIG).upper
        worst = max(worst, abs(up - target) / target)
        below = max(below, target - up)
    record(5, worst <= 1e-2 and below <= 1e-8,
           f"25 grids, worst relative error {worst:.2e} (<= 1e-2), max undershoot {below:.1e} (<= 1e-8)")


def test_criterion_06_cp_maps():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    M2 = Algebra.matrix(2)
    fails, worst = [], 0.0
    for i in range(20):
        T = random_cp_map(M2, M2, rng)
        assert is_completely_positive(T)
        for p in (1.0, 3.0):
            opn = op_norm(T, p, CONFIG).value
            s1 = s1_map_norm(T, p, 2, CONFIG).value
            worst = max(worst, abs(s1 - opn) / opn)
            if not opn * (1 - 1e-2) <= s1 <= opn * (1 + 1e-2):
                fails.append((i, p, s1, opn))
    elapsed = time.perf_counter() - start
    record(6, not fails and elapsed < 120, f"40 cases, worst |s1/op - 1| {worst:.2e}, {elapsed:.1f}s (< 120s), failures {fails}")


def test_criterion_07_yeadon_round_trip():
    rng = np.random.default_rng(7)
    doms = [Algebra.matrix(2), Algebra.matrix(3), Algebra.of([1, 2], [2.0, 1.0])]
    aux = [Algebra.matrix(1), Algebra.matrix(2), Algebra.of([1, 2], [0.5, 1.0])]
    kinds = ["direct", "anti", "mixed"]
    fails = []
    for i in range(30):
        dom, kind, p = doms[i % 3], kinds[(i // 3) % 3], [1.0, 2.0, 3.0][(i // 9) % 3]
        pick = lambda: aux[rng.integers(len(aux))].random(rng, positive=True)
        parts = {"direct": [("direct", pick())], "anti": [("anti", pick())],
                 "mixed": [("direct", pick()), ("anti", pick())]}[kind]
        spec = IsometrySpec(dom, parts, p, twist=bool(i % 2), seed=i)
        g = generate_isometry(spec)
        tr = extract_triple(g.T, p, CONFIG)
        match = triple_matches(tr, g, 1e-8)
        if not all(match.values()) or tr.verdict != spec.expected_verdict():
            fails.append((i, kind, p, match, tr.verdict))
    record(7, not fails, f"30 isometries, mismatches {fails}")


def test_criterion_08_theorem_gates():
    rows, ok = [], True
    for p in (1.0, 2.0, 3.0):
        for seed in (0, 1):
            rep = theorem_gate(direct_isometry(p, seed=seed).T, p, CONFIG)
            good = rep["verdict"] == "direct" and rep["s1_2"] <= 1 + 1e-2 and rep["amp2"] <= 1 + 1e-2
            ok &= good
            rows.append(f"direct p={p:g}: s1_2={rep['s1_2']:.4f} amp2={rep['amp2']:.4f}")
        rep = theorem_gate(anti_isometry(p).T, p, CONFIG)
        good = rep["verdict"] == "anti-direct" and rep["s1_2"] >= 2 - 0.05
        if p == 2:
            good &= rep["amp2"] <= 1 + 1e-2
        else:
            good &= rep["amp2"] >= 2 ** (2 * abs(0.5 - 1 / p)) - 0.05
        ok &= good
        rows.append(f"anti p={p:g}: s1_2={rep['s1_2']:.4f} amp2={rep['amp2']:.4f}")
    record(8, ok, "; ".join(rows))


def test_criterion_09_scaled_transpose_pair():
    p, n = 1.0, 2
    T = scaled_transpose_pair_map(n, p)
    target = (1 + 1 / n) ** (1 / p)
    opn = op_norm(T, p, CONFIG).value
    verdict = classify(T, p, CONFIG)
    bounds = {}
    for m in (1, 2):
        bounds[f"amp{m}"] = amplified_norm(T, p, m, CONFIG).value
        bounds[f"s1_{m}"] = s1_map_norm(T, p, m, CONFIG).value
    parts = [abs(opn - target) <= 1e-3, verdict == "mixed", all(v <= opn * (1 + 1e-2) for v in bounds.values())]
    detail = (f"op_norm={opn:.6f} (target {target:.6f}), verdict={verdict}, "
              + ", ".join(f"{k}={v:.6f}" for k, v in bounds.items())
              + f" vs cap {opn * 1.01:.6f}; parts pass {parts}")
    record(9, all(parts), detail)


def test_criterion_10_corner_injectivity():
    rng = np.random.default_rng(10)
    M4 = Algebra.matrix(4)
    worst = 0.0
    for i in range(10):
        u = M4.random_unitary(rng)
        e = u @ Element(M4, [np.diag([1.0, 1.0, 0.0, 0.0])]) @ u.H
        p = [1.0, 1.5, 2.0, 3.0, 4.0][i % 5]
        X = GridElement.from_entries([[e @ M4.random(rng) @ e for _ in range(2)] for _ in range(2)])
        inner, outer = s1_corner_check(X, e, p, CONFIG)
        worst = max(worst, abs(inner - outer) / max(inner, outer))
    record(10, worst <= 2e-2, f"10 grids, worst relative disagreement {worst:.2e} (<= 2e-2)")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
