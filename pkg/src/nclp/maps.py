"""Linear maps between finite-dimensional Lp spaces.

An LpMap stores a dense matrix acting on vectorized coordinates (see
``algebra``). Constructors record a provenance tag so that norm searches can
seed themselves with the right witnesses.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    Algebra,
    Element,
    direct_sum,
    direct_sum_algebra,
    is_positive,
    split_direct_sum,
    tensor,
    tensor_algebra,
)
from .config import DEFAULT
from .errors import StructuralError
from .vector_valued import GridElement


@dataclass(frozen=True, eq=False)
class LpMap:
    dom: Algebra
    cod: Algebra
    matrix: np.ndarray
    provenance: str = None
    witnesses: tuple = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.cod.vec_dim, self.dom.vec_dim):
            raise StructuralError(f"matrix shape {m.shape} does not match {(self.cod.vec_dim, self.dom.vec_dim)}")
        object.__setattr__(self, "matrix", m)

    def apply(self, x):
        if x.algebra != self.dom:
            raise StructuralError("element is not in the domain of the map")
        return self.cod.from_vec(self.matrix @ x.vec())

    __call__ = apply

    def apply_grid(self, X):
        """T (x) I on a grid: apply T to every entry."""
        if X.algebra != self.dom:
            raise StructuralError("grid is not over the domain of the map")
        n = X.n
        # move grid indices outward, apply the matrix to the algebra coordinates
        vecs = np.stack([
            np.concatenate([b.reshape(n, d, n, d)[i, :, j, :].ravel() for b, d in zip(X.big, X.algebra.dims)])
            for i in range(n) for j in range(n)
        ], axis=1)
        out = self.matrix @ vecs
        big = []
        o = self.cod.offsets
        for k, d in enumerate(self.cod.dims):
            blk = out[o[k]:o[k + 1]].reshape(d, d, n, n).transpose(2, 0, 3, 1).reshape(n * d, n * d)
            big.append(blk)
        return GridElement(self.cod, n, big)

    def adjoint(self):
        """The trace-duality adjoint: tau_N(T(x)* y) = tau_M(x* T^dagger(y))."""
        wd, wc = self.dom.coord_weights, self.cod.coord_weights
        return LpMap(self.cod, self.dom, (self.matrix.conj().T * wc[None, :]) / wd[:, None], "adjoint")

    def is_zero(self, tol=DEFAULT.tol):
        return float(np.max(np.abs(self.matrix), initial=0.0)) <= tol

    def close(self, other, tol=1e-9):
        if self.dom != other.dom or self.cod != other.cod:
            return False
        scale = max(1.0, float(np.max(np.abs(self.matrix), initial=0.0)))
        return float(np.max(np.abs(self.matrix - other.matrix), initial=0.0)) <= tol * scale

    def with_witnesses(self, *ws):
        return LpMap(self.dom, self.cod, self.matrix, self.provenance, tuple(self.witnesses) + tuple(ws))


def from_function(dom, cod, fn, provenance=None, witnesses=()):
    """Matrix of a linear map given by its action on elements."""
    cols = [fn(e).vec() for e in dom.basis()]
    return LpMap(dom, cod, np.stack(cols, axis=1), provenance, tuple(witnesses))


def identity(algebra):
    return LpMap(algebra, algebra, np.eye(algebra.vec_dim, dtype=complex), "identity")


def transpose_map(n):
    """Transposition on M_n, or blockwise on a given Algebra."""
    alg = n if isinstance(n, Algebra) else Algebra.matrix(n)
    return from_function(alg, alg, lambda x: Element(alg, [b.T for b in x.blocks]), "transpose")


def conjugation_map(a, b):
    """x -> a x b on the algebra of a and b."""
    if a.algebra != b.algebra:
        raise StructuralError("a and b must live in the same algebra")
    alg = a.algebra
    return from_function(alg, alg, lambda x: a @ x @ b, "conjugation")


def embed_tensor(algebra, b):
    """x -> x (x) b from M into M (x) N."""
    cod = tensor_algebra(algebra, b.algebra)
    return from_function(algebra, cod, lambda x: tensor(x, b), "tensor-embed")


def direct_sum_map(T1, T2):
    """T1 (+) T2 from dom1 (+) dom2 to cod1 (+) cod2."""
    dom = direct_sum_algebra(T1.dom, T2.dom)
    cod = direct_sum_algebra(T1.cod, T2.cod)
    mat = np.zeros((cod.vec_dim, dom.vec_dim), complex)
    mat[:T1.cod.vec_dim, :T1.dom.vec_dim] = T1.matrix
    mat[T1.cod.vec_dim:, T1.dom.vec_dim:] = T2.matrix
    return LpMap(dom, cod, mat, "direct-sum")


def pair_map(T1, T2):
    """x -> (T1 x, T2 x) into cod1 (+) cod2."""
    if T1.dom != T2.dom:
        raise StructuralError("paired maps need a common domain")
    cod = direct_sum_algebra(T1.cod, T2.cod)
    return LpMap(T1.dom, cod, np.vstack([T1.matrix, T2.matrix]), "pair")


def projection(first, second, index):
    """Coordinate projection from first (+) second onto one summand."""
    dom = direct_sum_algebra(first, second)
    target = first if index == 0 else second
    return from_function(dom, target, lambda z: split_direct_sum(z, first)[index], "projection")


def injection(first, second, index):
    """Inclusion of one summand into first (+) second."""
    src = first if index == 0 else second

    def fn(x):
        if index == 0:
            return direct_sum(x, second.zero())
        return direct_sum(first.zero(), x)

    return from_function(src, direct_sum_algebra(first, second), fn, "injection")


def compose(S, T):
    """S o T."""
    if T.cod != S.dom:
        raise StructuralError("cannot compose: codomain and domain differ")
    return LpMap(T.dom, S.cod, S.matrix @ T.matrix, "composition")


def scale(c, T):
    return LpMap(T.dom, T.cod, c * T.matrix, T.provenance, T.witnesses)


def add(S, T):
    if S.dom != T.dom or S.cod != T.cod:
        raise StructuralError("cannot add maps with different shapes")
    return LpMap(S.dom, S.cod, S.matrix + T.matrix, "sum")


def amplify_sp(T, m):
    """I_{S^p_m} (x) T acting entrywise on M_m (x) dom."""
    Mm = Algebra.matrix(m)
    dom = tensor_algebra(Mm, T.dom)
    cod = tensor_algebra(Mm, T.cod)

    def fn(z):
        X = GridElement(T.dom, m, z.blocks)
        return Element(cod, T.apply_grid(X).big)

    out = from_function(dom, cod, fn, f"amplified({T.provenance})")
    return out


def from_choi(dom, cod, chois):
    """Map whose Choi matrix for (dom block k, cod block l) is chois[k][l]."""
    def fn(x):
        blocks = [np.zeros((d, d), complex) for d in cod.dims]
        for k, dk in enumerate(dom.dims):
            xk = x.blocks[k]
            for l, dl in enumerate(cod.dims):
                C = chois[k][l].reshape(dk, dl, dk, dl)
                blocks[l] += np.einsum("ij,iajb->ab", xk, C)
        return Element(cod, blocks)

    return from_function(dom, cod, fn, "choi")


def random_cp_map(dom, cod, rng, rank=None):
    """A completely positive map with a Wishart-distributed Choi matrix."""
    chois = []
    for dk in dom.dims:
        row = []
        for dl in cod.dims:
            size = dk * dl
            r = rank or size
            g = rng.standard_normal((size, r)) + 1j * rng.standard_normal((size, r))
            row.append(g @ g.conj().T / size)
        chois.append(row)
    out = from_choi(dom, cod, chois)
    return LpMap(out.dom, out.cod, out.matrix, "random-cp")


def choi_matrices(T):
    """Choi matrices sum_ij E_ij (x) T(iota_k E_ij)_l per block pair."""
    out = []
    for k, dk in enumerate(T.dom.dims):
        row = []
        imgs = [[T.apply(T.dom.unit(k, i, j)) for j in range(dk)] for i in range(dk)]
        for l, dl in enumerate(T.cod.dims):
            C = np.block([[imgs[i][j].blocks[l] for j in range(dk)] for i in range(dk)])
            row.append(C)
        out.append(row)
    return out


@dataclass
class CPResult:
    value: bool
    min_eigenvalue: float
    chois: list

    def __bool__(self):
        return self.value


def is_completely_positive(T, tol=DEFAULT.tol):
    """Choi test, one block pair at a time. Weights play no role."""
    chois = choi_matrices(T)
    mins, ok = [], True
    for row in chois:
        for C in row:
            if not np.allclose(C, C.conj().T, atol=tol * max(1.0, float(np.max(np.abs(C))))):
                ok = False
                mins.append(-np.inf)
                continue
            ev = np.linalg.eigvalsh((C + C.conj().T) / 2)
            scale = max(1.0, float(np.max(np.abs(ev))))
            mins.append(float(ev.min()))
            if ev.min() < -tol * scale:
                ok = False
    return CPResult(ok, min(mins), chois)


def is_positive_map_on_samples(T, rng, trials=20, tol=1e-9):
    """Spot check that T sends random positive elements to positive elements."""
    for _ in range(trials):
        x = T.dom.random(rng, positive=True)
        y = T.apply(x)
        if not y.is_hermitian(tol * max(1.0, y.max_abs())):
            return False
        if not is_positive(y, tol * max(1.0, y.max_abs())):
            return False
    return True


def apply_to_element_grid(T, z, n):
    """(I_n (x) T)(z) for z an element of M_n (x) dom."""
    return Element(tensor_algebra(Algebra.matrix(n), T.cod), T.apply_grid(GridElement(T.dom, n, z.blocks)).big)
