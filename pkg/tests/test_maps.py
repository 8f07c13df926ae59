import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nclp.algebra import Algebra, Element, direct_sum, is_positive, tensor, trace
from nclp.config import DEFAULT
from nclp.errors import PreconditionError, StructuralError
from nclp.map_norms import (
    amplified_norm,
    canonical_grid_witnesses,
    cp_s1_equality_test,
    op_norm,
    positive_completion_transfer,
    s1_map_norm,
)
from nclp.maps import (
    LpMap,
    add,
    amplify_sp,
    compose,
    conjugation_map,
    direct_sum_map,
    embed_tensor,
    from_function,
    identity,
    injection,
    is_completely_positive,
    is_positive_map_on_samples,
    pair_map,
    projection,
    random_cp_map,
    scale,
    transpose_map,
)
from nclp.s1_solver import s1_norm_opt
from nclp.schatten import lp_norm
from nclp.vector_valued import GridElement, to_tensor_element, unit_grid
from nclp.yeadon import is_isometry

from conftest import ALGEBRAS

M2 = Algebra.matrix(2)
FAST = DEFAULT.with_(restarts=3, iters=200)


# constructors


def test_transpose_example():
    assert transpose_map(2).apply(M2.unit(0, 0, 1)).close(M2.unit(0, 1, 0), 0)


def test_embed_tensor_example(rng):
    b = Element(M2, [np.diag([1.0, 0.0])])
    x = Algebra.matrix(3).random(rng)
    y = embed_tensor(Algebra.matrix(3), b).apply(x)
    assert y.close(tensor(x, M2.unit(0, 0, 0)), 1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_amplified_transpose_gives_swap(n):
    z = to_tensor_element(unit_grid(n))
    sw = amplify_sp(transpose_map(n), n).apply(z)
    swap = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            swap[i * n + j, j * n + i] = 1
    assert np.allclose(sw.blocks[0], swap)


def test_conjugation_and_composition(rng):
    a, b, x = M2.random(rng), M2.random(rng), M2.random(rng)
    T = conjugation_map(a, b)
    assert T.apply(x).close(a @ x @ b, 1e-12)
    S = compose(transpose_map(2), T)
    assert S.apply(x).close(Element(M2, [(a @ x @ b).blocks[0].T]), 1e-12)
    assert np.allclose(S.matrix, transpose_map(2).matrix @ T.matrix)
    assert scale(2j, T).apply(x).close(2j * (a @ x @ b), 1e-12)
    assert add(T, identity(M2)).apply(x).close(a @ x @ b + x, 1e-12)


def test_structural_errors(rng):
    M3 = Algebra.matrix(3)
    with pytest.raises(StructuralError):
        compose(transpose_map(2), transpose_map(3))
    with pytest.raises(StructuralError):
        conjugation_map(M2.identity(), M3.identity())
    with pytest.raises(StructuralError):
        add(identity(M2), identity(M3))
    with pytest.raises(StructuralError):
        transpose_map(2).apply(M3.identity())
    with pytest.raises(StructuralError):
        LpMap(M2, M3, np.zeros((4, 4)))
    with pytest.raises(StructuralError):
        pair_map(identity(M2), identity(M3))


def test_direct_sum_pair_projection_injection(rng):
    M3 = Algebra.matrix(3)
    x, y = M2.random(rng), M3.random(rng)
    T = direct_sum_map(transpose_map(2), identity(M3))
    out = T.apply(direct_sum(x, y))
    assert out.close(direct_sum(Element(M2, [x.blocks[0].T]), y), 1e-14)
    P = pair_map(identity(M2), transpose_map(2))
    assert P.apply(x).close(direct_sum(x, Element(M2, [x.blocks[0].T])), 1e-14)
    assert projection(M2, M3, 1).apply(direct_sum(x, y)).close(y, 0)
    assert injection(M2, M3, 0).apply(x).close(direct_sum(x, M3.zero()), 0)
    assert compose(projection(M2, M3, 0), injection(M2, M3, 0)).close(identity(M2))


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(1, 3), st.integers(0, 2**31))
def test_amplification_is_entrywise(i, m, seed):
    rng = np.random.default_rng(seed)
    alg = ALGEBRAS[i]
    T = random_cp_map(alg, M2, rng)
    X = GridElement.from_entries([[alg.random(rng) for _ in range(m)] for _ in range(m)])
    Y = T.apply_grid(X)
    for r in range(m):
        for c in range(m):
            assert Y.entry(r, c).close(T.apply(X.entry(r, c)), 1e-10)
    z = amplify_sp(T, m).apply(to_tensor_element(X))
    assert np.allclose(z.blocks[0], Y.big[0])


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 2**31))
def test_adjoint_duality(i, j, seed):
    rng = np.random.default_rng(seed)
    A, B = ALGEBRAS[i], ALGEBRAS[j]
    T = LpMap(A, B, rng.standard_normal((B.vec_dim, A.vec_dim)) + 1j * rng.standard_normal((B.vec_dim, A.vec_dim)))
    x, y = A.random(rng), B.random(rng)
    assert np.isclose(trace(T.apply(x).H @ y), trace(x.H @ T.adjoint().apply(y)))


# operator norms


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
def test_op_norm_examples(p):
    assert np.isclose(op_norm(identity(Algebra.matrix(3)), p, FAST).value, 1)
    assert np.isclose(op_norm(transpose_map(3), p, FAST).value, 1)
    assert np.isclose(op_norm(scale(-0.5, identity(M2)), p, FAST).value, 0.5)


def test_op_norm_p2_is_exact(rng):
    # x -> tr(x) 1 on M_3 at p = 2: ||tr(x) 1||_2 <= sqrt(3)|x|_2 sqrt(3), attained at 1
    M3 = Algebra.matrix(3)
    T = from_function(M3, M3, lambda x: trace(x) * M3.identity())
    assert np.isclose(op_norm(T, 2).value, 3)
    r = op_norm(T, 2)
    assert np.isclose(lp_norm(T.apply(r.witness), 2) / lp_norm(r.witness, 2), 3)


def test_op_norm_weighted():
    # identity from weight 1 to weight 4 scales every norm by 4^{1/p}
    T = LpMap(Algebra.matrix(2, 1.0), Algebra.matrix(2, 4.0), np.eye(4))
    for p in (1.0, 2.0, 3.0):
        assert np.isclose(op_norm(T, p, FAST).value, 4 ** (1 / p))


def test_op_norm_p1_trace_functional():
    # x -> tr(x) E_11 has norm 1 at p = 1, attained on a rank-one projection
    T = from_function(M2, M2, lambda x: trace(x) * M2.unit(0, 0, 0))
    assert np.isclose(op_norm(T, 1, FAST).value, 1, atol=1e-6)


@settings(max_examples=8)
@given(st.sampled_from([1.0, 1.5, 3.0]), st.integers(0, 2**31))
def test_op_norm_is_a_lower_bound(p, seed):
    rng = np.random.default_rng(seed)
    T = random_cp_map(M2, M2, rng)
    r = op_norm(T, p, FAST)
    assert np.isclose(lp_norm(T.apply(r.witness), p) / lp_norm(r.witness, p), r.value)
    for _ in range(20):
        x = M2.random(rng)
        assert lp_norm(T.apply(x), p) / lp_norm(x, p) <= r.value * (1 + 1e-6)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [1.0, 4 / 3, 4.0])
def test_amplified_transpose(n, p):
    target = n ** (2 * abs(0.5 - 1 / p))
    v = amplified_norm(transpose_map(n), p, n, FAST).value
    assert target * (1 - 1e-2) <= v <= target + 1e-6


def test_amplified_level_one_is_op_norm(rng):
    T = random_cp_map(M2, M2, rng)
    assert np.isclose(amplified_norm(T, 3, 1, FAST).value, op_norm(T, 3, FAST).value)


def test_amplified_monotone(rng):
    T = transpose_map(2)
    levels = amplified_norm(T, 4, 3, FAST, return_levels=True).details["levels"]
    assert all(b >= a - 1e-9 for a, b in zip(levels, levels[1:]))


@settings(max_examples=5)
@given(st.integers(0, 2**31))
def test_p2_amplification_is_free(seed):
    rng = np.random.default_rng(seed)
    T = LpMap(M2, M2, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    opn = op_norm(T, 2).value
    for m in (2, 3):
        assert np.isclose(amplified_norm(T, 2, m).value, opn, rtol=1e-9)


def test_canonical_witnesses():
    ws = canonical_grid_witnesses(M2, 2)
    assert len(ws) == 2
    assert np.allclose(ws[0].big[0], unit_grid(2).big[0])
    assert np.allclose(ws[1].big[0], unit_grid(2, transpose=True).big[0])


# S^1 map norms


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_s1_map_norm_transpose(p):
    v = s1_map_norm(transpose_map(2), p, 2, FAST).value
    assert 2 * (1 - 2e-2) <= v <= 2 + 1e-6


def test_s1_map_norm_identity_and_embedding(rng):
    assert np.isclose(s1_map_norm(identity(M2), 3, 2, FAST).value, 1, atol=1e-3)
    b = M2.random(rng, positive=True)
    b = b / lp_norm(b, 3)
    T = embed_tensor(M2, b)
    assert np.isclose(s1_map_norm(T, 3, 2, FAST).value, 1, atol=1e-3)
    X = GridElement.from_entries([[M2.random(rng) for _ in range(2)] for _ in range(2)])
    assert np.isclose(s1_norm_opt(T.apply_grid(X), 1).upper, lp_norm(b, 1) * s1_norm_opt(X, 1).upper, rtol=1e-6)


def test_s1_dominates_op_norm(rng):
    T = LpMap(M2, M2, rng.standard_normal((4, 4)))
    for p in (1.0, 3.0):
        assert s1_map_norm(T, p, 2, FAST).value >= op_norm(T, p, FAST).value * (1 - 1e-3)


# complete positivity


def test_cp_examples(rng):
    assert is_completely_positive(identity(M2))
    res = is_completely_positive(transpose_map(2))
    assert not res and np.isclose(res.min_eigenvalue, -1)
    a = M2.random(rng)
    assert is_completely_positive(conjugation_map(a.H, a))
    assert is_completely_positive(embed_tensor(M2, M2.random(rng, positive=True)))


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 2**31))
def test_cp_implies_positive(i, j, seed):
    rng = np.random.default_rng(seed)
    T = random_cp_map(ALGEBRAS[i], ALGEBRAS[j], rng)
    assert is_completely_positive(T)
    assert is_positive_map_on_samples(T, rng)
    assert is_completely_positive(T.adjoint())
    assert T.adjoint().adjoint().close(T)


def test_positive_completion_transfer(rng):
    T = random_cp_map(M2, M2, rng)
    X = GridElement.from_entries([[M2.random(rng) for _ in range(2)] for _ in range(2)])
    r = s1_norm_opt(X, 3, FAST)
    f2, bound = positive_completion_transfer(T, X, r.factorization, 3)
    assert f2.residual(T.apply_grid(X)) < 1e-8
    assert f2.value(3) <= bound * (1 + 1e-9)
    assert bound <= op_norm(T, 3, FAST).value * r.upper * (1 + 1e-6)
    with pytest.raises(PreconditionError):
        positive_completion_transfer(transpose_map(2), unit_grid(2), r.factorization.__class__(
            M2, 2, 2, [np.eye(4, dtype=complex)], [unit_grid(2).big[0]]), 3)


def test_cp_s1_equality_examples(rng):
    b = M2.random(rng, positive=True)
    rep = cp_s1_equality_test(embed_tensor(M2, b / lp_norm(b, 2)), 2, 1, FAST)
    assert rep["pass"] and np.isclose(rep["op_norm"], 1)
    a = M2.random(rng)
    rep = cp_s1_equality_test(conjugation_map(a.H, a), 3, 2, FAST)
    assert rep["pass"]
    with pytest.raises(PreconditionError):
        cp_s1_equality_test(transpose_map(2), 2, 1)


# isometries


def test_is_isometry_examples(rng):
    p = 3.0
    b = M2.random(rng, positive=True)
    b = b / lp_norm(b, p)
    assert is_isometry(embed_tensor(M2, b), p)
    assert not is_isometry(scale(0.5, identity(M2)), p)
    t = transpose_map(2)
    unnormalized = pair_map(identity(M2), scale(2 ** (-1 / p), t))
    assert not is_isometry(unnormalized, p)
    c1, c2 = 0.6 ** (1 / p), 0.4 ** (1 / p)
    assert is_isometry(pair_map(scale(c1, identity(M2)), scale(c2, t)), p)
    assert is_isometry(pair_map(scale(c1, identity(M2)), scale(c2, t)), p, method="yeadon")


def test_is_isometry_yeadon_needs_separating():
    M3 = Algebra.matrix(3)
    T = from_function(M3, M3, lambda x: x + trace(x) * M3.unit(0, 0, 0))
    with pytest.raises(PreconditionError):
        is_isometry(T, 2, method="yeadon")
    assert is_positive(T.apply(M3.identity()))


def test_threaded_op_norm_matches_sequential(rng):
    T = random_cp_map(M2, M2, rng)
    seq = op_norm(T, 3, FAST.with_(threads=1)).value
    par = op_norm(T, 3, FAST.with_(threads=2)).value
    assert seq == par
