"""Unital representations of M_n and the corner embedding of M_2."""

import numpy as np

from .algebra import Algebra, Element, corner, tensor_algebra, trace
from .errors import PreconditionError
from .maps import from_function
from .vector_valued import GridElement


def _check_homomorphism(theta, tol):
    Mn = theta.dom
    if not theta.apply(Mn.identity()).close(theta.cod.identity(), tol):
        raise PreconditionError("theta is not unital")
    basis = Mn.basis()
    images = [theta.apply(x) for x in basis]
    for x, tx in zip(basis, images):
        if not theta.apply(x.H).close(tx.H, tol):
            raise PreconditionError("theta does not preserve the adjoint")
    for a, x in enumerate(basis):
        for b, y in enumerate(basis):
            if not theta.apply(x @ y).close(images[a] @ images[b], tol):
                raise PreconditionError("theta is not multiplicative")


def standardize_representation(theta, tol=1e-9):
    """Return (e, rho) with e = theta(E_11) and rho(theta(a)) = a (x) e.

    rho: M -> M_n (x) eMe sends x to the grid [theta(E_1i) x theta(E_j1)],
    with eMe realized as a standalone corner algebra (so e becomes its unit).
    It is a trace-preserving *-isomorphism; all three properties are
    verified on bases before returning.
    """
    Mn = theta.dom
    if len(Mn.dims) != 1:
        raise PreconditionError("theta must be defined on a single matrix block M_n")
    n = Mn.dims[0]
    _check_homomorphism(theta, tol)
    units = [[theta.apply(Mn.unit(0, i, j)) for j in range(n)] for i in range(n)]
    e = units[0][0]
    c = corner(e)
    target = tensor_algebra(Algebra.matrix(n), c.algebra)

    def rho_fn(x):
        grid = GridElement.from_entries([[c.compress(units[0][i] @ x @ units[j][0]) for j in range(n)] for i in range(n)])
        return Element(target, grid.big)

    rho = from_function(theta.cod, target, rho_fn, "standardization")
    _verify_rho(rho, theta, c, n, tol)
    return e, rho


def _verify_rho(rho, theta, c, n, tol):
    M = rho.dom
    basis = M.basis()
    images = [rho.apply(x) for x in basis]
    for x, rx in zip(basis, images):
        if abs(trace(rx) - trace(x)) > tol * max(1.0, abs(trace(x))):
            raise PreconditionError("rho is not trace preserving")
    for a, x in enumerate(basis):
        for b, y in enumerate(basis):
            if not rho.apply(x @ y).close(images[a] @ images[b], tol):
                raise PreconditionError("rho is not multiplicative")
    if rho.matrix.shape[0] != rho.matrix.shape[1] or np.linalg.matrix_rank(rho.matrix) != M.vec_dim:
        raise PreconditionError("rho is not bijective")
    one_c = c.algebra.identity()
    for a in theta.dom.basis():
        lhs = rho.apply(theta.apply(a))
        big = [np.kron(a.blocks[0], blk) for blk in one_c.blocks]
        if not lhs.close(Element(rho.cod, big), tol):
            raise PreconditionError("rho o theta differs from a (x) e")


def embed_m2(M):
    """*-homomorphism M_2 -> M into the top-left corner of the first block of size >= 2.

    Returns None when M is abelian.
    """
    k = next((i for i, d in enumerate(M.dims) if d >= 2), None)
    if k is None:
        return None
    M2 = Algebra.matrix(2)

    def fn(a):
        out = M.zero()
        out.blocks[k][:2, :2] = a.blocks[0]
        return out

    return from_function(M2, M, fn, "m2-embedding")

