import numpy as np
import pytest
from hypothesis import given, strategies as st

from nclp.algebra import (
    Algebra,
    Element,
    corner,
    direct_sum,
    is_positive,
    polar,
    power,
    pseudo_inverse,
    spectral,
    split_direct_sum,
    support,
    tensor,
    trace,
)
from nclp.errors import DomainError, PreconditionError, StructuralError
from nclp.maps import compose, conjugation_map, embed_tensor, from_function, identity, transpose_map
from nclp.representations import embed_m2, standardize_representation

from conftest import ALGEBRAS

M2 = Algebra.matrix(2)


def el(*blocks, alg=None):
    blocks = [np.array(b, dtype=complex) for b in blocks]
    alg = alg or Algebra.of([b.shape[0] for b in blocks])
    return Element(alg, blocks)


def test_trace_examples():
    assert trace(M2.identity()) == 2
    assert trace(el([[0, 1], [0, 0]])) == 0
    assert trace(Algebra.of([1, 3], [2, 1]).identity()) == 5


def test_trace_shape_mismatch():
    with pytest.raises(StructuralError):
        Element(M2, [np.eye(3)])
    with pytest.raises(StructuralError):
        Algebra.of([2], [-1.0])


def test_abelian_flag():
    assert Algebra.of([1, 1]).is_abelian
    assert not M2.is_abelian


def test_polar_examples():
    w, B = polar(M2.identity())
    assert w.close(M2.identity()) and B.close(M2.identity())
    w, B = polar(M2.unit(0, 0, 1))
    assert w.close(M2.unit(0, 0, 1)) and B.close(M2.unit(0, 1, 1))
    w, B = polar(M2.zero())
    assert w.max_abs() == 0 and B.max_abs() == 0
    assert support(B).max_abs() == 0


def test_support_examples():
    assert support(el(np.diag([3, 0]))).close(el(np.diag([1, 0])))
    assert support(Algebra.matrix(3).identity()).close(Algebra.matrix(3).identity())
    P = el(0.5 * np.ones((2, 2)))
    assert support(P).close(P)
    with pytest.raises(DomainError):
        support(el(np.diag([1, -1])))


def test_positive_power_pinv_examples():
    assert not is_positive(el(np.diag([1, -1e-3])), tol=1e-9)
    assert power(el(np.diag([4, 9])), 0.5).close(el(np.diag([2, 3])))
    assert pseudo_inverse(el(np.diag([2, 0]))).close(el(np.diag([0.5, 0])))
    with pytest.raises(DomainError):
        power(el([[0, 1], [0, 0]]), 2)
    with pytest.raises(DomainError):
        power(el(np.diag([1, -1])), 0.5)


def test_spectral_reconstructs(rng):
    for alg in ALGEBRAS:
        x = alg.random(rng, hermitian=True)
        sd = spectral(x)
        assert sd.reconstruct().close(x, 1e-9)
        total = alg.zero()
        for P in sd.projections:
            assert (P @ P).close(P, 1e-9) and P.is_hermitian()
            total = total + P
        assert total.close(alg.identity(), 1e-9)


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 2**31), st.booleans())
def test_polar_round_trip(idx, seed, singular):
    rng = np.random.default_rng(seed)
    alg = ALGEBRAS[idx]
    x = alg.random(rng)
    if singular:
        x = x @ Element(alg, [np.diag([1.0] + [0.0] * (d - 1)) for d in alg.dims])
    w, B = polar(x)
    assert (w @ B).close(x, 1e-9)
    assert (w.H @ w).close(support(B), 1e-9)
    assert is_positive(B)


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 2**31))
def test_trace_properties(idx, seed):
    rng = np.random.default_rng(seed)
    alg = ALGEBRAS[idx]
    x, y = alg.random(rng), alg.random(rng)
    assert np.isclose(trace(x.H), np.conj(trace(x)))
    assert np.isclose(trace(x + 2.5 * y), trace(x) + 2.5 * trace(y))
    t = trace(x.H @ x)
    assert abs(t.imag) < 1e-9 and t.real >= -1e-9
    assert x.H.H.close(x)


@given(st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 2**31))
def test_support_is_spectral_projection(idx, seed):
    rng = np.random.default_rng(seed)
    alg = ALGEBRAS[idx]
    x = alg.random(rng, positive=True)
    x = x @ Element(alg, [np.diag([1.0] * (d - 1) + [0.0]) if d > 1 else np.eye(1) for d in alg.dims]) @ x
    s = support(x)
    assert (s @ x).close(x, 1e-8) and (x @ s).close(x, 1e-8)


def test_tensor_and_direct_sum_elements(rng):
    a = Algebra.of([1, 2], [2, 3])
    b = Algebra.of([2], [0.5])
    x, y = a.random(rng), b.random(rng)
    z = tensor(x, y)
    assert z.algebra.dims == (2, 4) and z.algebra.weights == (1.0, 1.5)
    assert np.isclose(trace(z), trace(x) * trace(y))
    s = direct_sum(x, y)
    u, v = split_direct_sum(s, a)
    assert u.close(x) and v.close(y)


def test_corner_algebra(rng):
    M = Algebra.of([3], [2.0])
    e = Element(M, [np.diag([1, 1, 0])])
    c = corner(e)
    assert c.algebra.dims == (2,) and c.algebra.weights == (2.0,)
    x = M.random(rng)
    exe = e @ x @ e
    assert np.isclose(trace(c.compress(exe)), trace(exe))
    assert c.expand(c.compress(exe)).close(exe)


def test_standardize_identity():
    e, rho = standardize_representation(identity(M2))
    assert np.isclose(trace(e).real, 1)
    # rho is a permutation of coordinates
    assert np.allclose(np.abs(rho.matrix).sum(axis=0), 1) and np.allclose(np.abs(rho.matrix).sum(axis=1), 1)


def test_standardize_tensor_amplification(rng):
    theta = embed_tensor(M2, Algebra.matrix(3).identity())
    e, rho = standardize_representation(theta)
    expected = np.kron(np.diag([1, 0]), np.eye(3))
    assert np.allclose(e.blocks[0], expected)
    assert np.isclose(trace(e).real, 3)
    # a unitarily rotated copy still standardizes
    u = Algebra.matrix(6).random_unitary(rng)
    e2, _ = standardize_representation(compose(conjugation_map(u, u.H), theta))
    assert np.isclose(trace(e2).real, 3)


def test_standardize_weighted_target():
    # M_2 -> M_2 (+) M_4 with weights, a -> (a, a (x) 1_2)
    cod = Algebra.of([2, 4], [0.5, 2.0])
    theta = from_function(M2, cod, lambda a: Element(cod, [a.blocks[0], np.kron(a.blocks[0], np.eye(2))]))
    theta_unital_fail = from_function(M2, cod, lambda a: Element(cod, [a.blocks[0], np.zeros((4, 4))]))
    e, rho = standardize_representation(theta)
    assert rho.cod.dims == (2, 4)
    with pytest.raises(PreconditionError):
        standardize_representation(theta_unital_fail)


def test_standardize_rejects_non_homomorphisms():
    shear = el([[1, 1], [0, 1]])
    bad = compose(conjugation_map(shear, el([[1, -1], [0, 1]])), transpose_map(2))
    with pytest.raises(PreconditionError):
        standardize_representation(bad)
    with pytest.raises(PreconditionError):
        standardize_representation(transpose_map(2))


def test_embed_m2():
    g = embed_m2(Algebra.matrix(3))
    assert np.allclose(g.apply(M2.unit(0, 0, 0)).blocks[0], np.diag([1, 0, 0]))
    assert embed_m2(Algebra.of([1, 1])) is None
    assert embed_m2(M2).close(identity(M2))
    g = embed_m2(Algebra.of([1, 3]))
    a, b = M2.random(np.random.default_rng(0)), M2.random(np.random.default_rng(1))
    assert g.apply(a @ b).close(g.apply(a) @ g.apply(b))
