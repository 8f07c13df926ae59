"""Row/column norms and the S^1_n-valued Lp norm of n x n grids.

A grid [x_ij] over M is identified with the element of M_n (x) M whose
(i, j) block is x_ij. The S^1-valued norm is

    ||[x_ij]|| = inf ||(sum_{i,k} a_ik a_ik*)^{1/2}||_{2p} ||(sum_{k,j} b_kj* b_kj)^{1/2}||_{2p}

over factorizations x_ij = sum_k a_ik b_kj. Exact values are available at
p = 1 (trace norm of the assembled matrix), on the positive cone (norm of the
diagonal sum) and for grids with one non-zero entry. Everything else goes
through the certified optimizer in ``s1_solver``.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, Element, corner, is_positive, tensor_algebra
from .config import DEFAULT, INF
from .errors import PreconditionError, StructuralError
from .schatten import check_p, lp_norm


class GridElement:
    """An n x n grid of elements of one algebra, stored as assembled blocks.

    ``big[k]`` is the (n d_k) x (n d_k) matrix whose (i, j) sub-block is the
    k-th block of x_ij.
    """

    __slots__ = ("algebra", "n", "big")

    def __init__(self, algebra, n, big):
        if n < 1:
            raise StructuralError("grid size must be at least 1")
        big = [np.array(b, dtype=complex) for b in big]
        if len(big) != len(algebra.dims):
            raise StructuralError("assembled blocks do not match the algebra")
        for b, d in zip(big, algebra.dims):
            if b.shape != (n * d, n * d):
                raise StructuralError(f"assembled block has shape {b.shape}, expected {(n * d, n * d)}")
        self.algebra = algebra
        self.n = n
        self.big = big

    @classmethod
    def from_entries(cls, entries):
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise StructuralError("grid entries must form a non-empty square array")
        alg = entries[0][0].algebra
        for row in entries:
            for x in row:
                if x.algebra != alg:
                    raise StructuralError("grid entries live in different algebras")
        big = [np.block([[entries[i][j].blocks[k] for j in range(n)] for i in range(n)]) for k in range(len(alg.dims))]
        return cls(alg, n, big)

    @classmethod
    def zeros(cls, algebra, n):
        return cls(algebra, n, [np.zeros((n * d, n * d), complex) for d in algebra.dims])

    @classmethod
    def single(cls, x, n, i=0, j=0):
        """The grid with x in position (i, j) and zeros elsewhere."""
        g = cls.zeros(x.algebra, n)
        for k, d in enumerate(x.algebra.dims):
            g.big[k][i * d:(i + 1) * d, j * d:(j + 1) * d] = x.blocks[k]
        return g

    def entry(self, i, j):
        return Element(self.algebra, [b[i * d:(i + 1) * d, j * d:(j + 1) * d] for b, d in zip(self.big, self.algebra.dims)])

    @property
    def entries(self):
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def diagonal_sum(self):
        return Element(self.algebra, [ptrace(b, self.n, d) for b, d in zip(self.big, self.algebra.dims)])

    def __mul__(self, c):
        return GridElement(self.algebra, self.n, [c * b for b in self.big])

    __rmul__ = __mul__

    def __add__(self, other):
        if other.algebra != self.algebra or other.n != self.n:
            raise StructuralError("grids differ in algebra or size")
        return GridElement(self.algebra, self.n, [a + b for a, b in zip(self.big, other.big)])

    def map_entries(self, fn):
        return GridElement.from_entries([[fn(x) for x in row] for row in self.entries])

    def nonzero_positions(self, tol=0.0):
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.entry(i, j).max_abs() > tol]


def ptrace(z, n, d):
    """Partial trace over the grid index: sum_i of the (i, i) sub-blocks."""
    return np.einsum("iaib->ab", z.reshape(n, d, n, d))


def amplify(a, n):
    """kron(I_n, a)."""
    return np.kron(np.eye(n), a)


def to_tensor_element(X):
    """The element of M_n (x) M (trace tr_n (x) tau) carrying the grid."""
    return Element(tensor_algebra(Algebra.matrix(X.n), X.algebra), X.big)


def from_tensor_element(z, n, algebra):
    expected = tensor_algebra(Algebra.matrix(n), algebra)
    if z.algebra != expected:
        raise StructuralError("element is not in M_n (x) M for the given n and algebra")
    return GridElement(algebra, n, z.blocks)


def _family_sum(family, adjoint_first):
    if not family:
        return None
    acc = None
    for x in family:
        term = x.H @ x if adjoint_first else x @ x.H
        acc = term if acc is None else acc + term
    return acc


def _half_power_norm(s, p):
    # ||s||_{p/2}^{1/2} for positive s, computed as tau(s^{p/2})^{1/p}
    if p == INF:
        return lp_norm(s, INF) ** 0.5
    total = 0.0
    for w, b in zip(s.algebra.weights, s.blocks):
        ev = np.clip(np.linalg.eigvalsh((b + b.conj().T) / 2), 0, None)
        total += w * float(np.sum(ev ** (p / 2)))
    return total ** (1.0 / p)


def col_norm(family, p):
    """||(sum b* b)^{1/2}||_p."""
    p = check_p(p)
    s = _family_sum(list(family), adjoint_first=True)
    return 0.0 if s is None else _half_power_norm(s, p)


def row_norm(family, p):
    """||(sum a a*)^{1/2}||_p."""
    p = check_p(p)
    s = _family_sum(list(family), adjoint_first=False)
    return 0.0 if s is None else _half_power_norm(s, p)


def polar_column_family(family, p=None, rank_tol=DEFAULT.rank_tol):
    """Write b_l = w_l b with b = (sum b_l* b_l)^{1/2} and sum w_l* w_l <= 1."""
    family = list(family)
    if not family:
        return [], None
    alg = family[0].algebra
    s = _family_sum(family, adjoint_first=True)
    b_blocks, binv_blocks = [], []
    for blk in s.blocks:
        ev, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        ev = np.clip(ev, 0, None)
        root = np.sqrt(ev)
        cut = rank_tol * root.max() if root.size and root.max() > 0 else np.inf
        inv = np.where(root > cut, 1.0 / np.where(root > cut, root, 1.0), 0.0)
        b_blocks.append((v * root) @ v.conj().T)
        binv_blocks.append((v * inv) @ v.conj().T)
    b = Element(alg, b_blocks)
    binv = Element(alg, binv_blocks)
    return [x @ binv for x in family], b


@dataclass
class Factorization:
    """x_ij = sum_k a_ik b_kj with an n x m row family and an m x n column family.

    ``A[k]`` and ``B[k]`` are the assembled (n d_k) x (m d_k) and
    (m d_k) x (n d_k) matrices for algebra block k.
    """

    algebra: Algebra
    n: int
    m: int
    A: list
    B: list

    def a(self, i, k):
        return Element(self.algebra, [blk[i * d:(i + 1) * d, k * d:(k + 1) * d] for blk, d in zip(self.A, self.algebra.dims)])

    def b(self, k, j):
        return Element(self.algebra, [blk[k * d:(k + 1) * d, j * d:(j + 1) * d] for blk, d in zip(self.B, self.algebra.dims)])

    def row_family(self):
        return [self.a(i, k) for i in range(self.n) for k in range(self.m)]

    def col_family(self):
        return [self.b(k, j) for k in range(self.m) for j in range(self.n)]

    def product(self):
        return GridElement(self.algebra, self.n, [a @ b for a, b in zip(self.A, self.B)])

    def row_value(self, p):
        # same as row_norm(row_family(), 2p) without materializing the family
        return _half_power_norm(Element(self.algebra, [ptrace(a @ a.conj().T, self.n, d) for a, d in zip(self.A, self.algebra.dims)]), 2 * p)

    def col_value(self, p):
        return _half_power_norm(Element(self.algebra, [ptrace_right(b, self.m, self.n, d) for b, d in zip(self.B, self.algebra.dims)]), 2 * p)

    def value(self, p):
        return self.row_value(p) * self.col_value(p)

    def residual(self, X):
        prod = self.product()
        return max(float(np.max(np.abs(a - b))) for a, b in zip(prod.big, X.big))

    def balanced(self, p):
        r, c = self.row_value(p), self.col_value(p)
        if r == 0 or c == 0:
            return self
        t = np.sqrt(c / r)
        return Factorization(self.algebra, self.n, self.m, [t * a for a in self.A], [b / t for b in self.B])


def ptrace_right(b, m, n, d):
    """sum_{k,j} b_kj* b_kj for an assembled (m d) x (n d) column family."""
    g = b.conj().T @ b
    return ptrace(g, n, d)


def scalar_grid(c, algebra=None):
    """A grid of scalars c_ij times the identity of ``algebra`` (default C)."""
    c = np.asarray(c, dtype=complex)
    algebra = algebra or Algebra.matrix(1)
    one = algebra.identity()
    return GridElement.from_entries([[c[i, j] * one for j in range(c.shape[1])] for i in range(c.shape[0])])


def unit_grid(n, transpose=False, algebra=None, block=0):
    """[E_ij] (or [E_ji] when transpose) over M_n, the standard witness grids for transposition."""
    algebra = algebra or Algebra.matrix(n)
    return GridElement.from_entries([[algebra.unit(block, j, i) if transpose else algebra.unit(block, i, j) for j in range(n)] for i in range(n)])


def s1_norm_p1(X):
    """Exact value at p = 1: the weighted trace norm of the assembled matrix."""
    return lp_norm(to_tensor_element(X), 1)


def is_positive_grid(X, tol=DEFAULT.tol):
    z = to_tensor_element(X)
    if not z.is_hermitian(tol):
        return False
    scale = max(1.0, max(float(np.max(np.abs(b))) for b in X.big))
    return is_positive(z, tol * scale)


def s1_norm_positive(X, p):
    """Exact value on the positive cone: ||sum_i x_ii||_p."""
    p = check_p(p, allow_inf=False)
    if not is_positive_grid(X, 1e-9):
        raise PreconditionError("grid is not positive semidefinite as an element of M_n (x) M")
    return lp_norm(X.diagonal_sum(), p)


def s1_norm_single(X, p, tol=0.0):
    """Exact value for a grid with at most one non-zero entry."""
    pos = X.nonzero_positions(tol)
    if len(pos) > 1:
        raise PreconditionError("grid has more than one non-zero entry")
    if not pos:
        return 0.0
    return lp_norm(X.entry(*pos[0]), p)


def oracle_value(X, p):
    """(value, tag) from an exact formula, or (None, None) when none applies."""
    p = check_p(p, allow_inf=False)
    if p == 1:
        return s1_norm_p1(X), "p1-trace-norm"
    if len(X.nonzero_positions()) <= 1:
        return s1_norm_single(X, p), "single-entry"
    if is_positive_grid(X, 1e-9):
        return lp_norm(X.diagonal_sum(), p), "positive-cone"
    return None, None


def holder_lower_bound(X, p):
    """||sum_i x_ii||_p, a lower bound for the S^1 norm of any grid.

    sum_i x_ii = sum_{i,k} a_ik b_ki, so Hoelder bounds it by the value of
    every factorization. Equality holds on the positive cone.
    """
    return lp_norm(X.diagonal_sum(), p)


def pair_grids(X1, X2):
    """The grid over N1 (+) N2 with entries (x1_ij, x2_ij)."""
    if X1.n != X2.n:
        raise StructuralError("grids must have the same size")
    from .algebra import direct_sum_algebra

    return GridElement(direct_sum_algebra(X1.algebra, X2.algebra), X1.n, list(X1.big) + list(X2.big))


def s1_direct_sum_check(X1, X2, p, config=DEFAULT):
    """(norm of the paired grid, l^p combination of the two norms)."""
    from .s1_solver import s1_norm

    p = check_p(p, allow_inf=False)
    lhs = s1_norm(pair_grids(X1, X2), p, config).value
    rhs = (s1_norm(X1, p, config).value ** p + s1_norm(X2, p, config).value ** p) ** (1 / p)
    return lhs, rhs


def s1_corner_check(X, e, p, config=DEFAULT, tol=1e-8):
    """(value over the corner eMe, value over M) for a grid supported in eMe."""
    from .s1_solver import s1_norm_opt

    for row in X.entries:
        for x in row:
            if not (e @ x @ e).close(x, tol):
                raise PreconditionError("grid entry is not supported in the corner eMe")
    c = corner(e)
    inner = GridElement.from_entries([[c.compress(x) for x in row] for row in X.entries])
    return s1_norm_opt(inner, p, config).upper, s1_norm_opt(X, p, config).upper
