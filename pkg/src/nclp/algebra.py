"""Finite-dimensional von Neumann algebras with weighted traces.

An algebra is a direct sum of full matrix blocks M_{n_k}, each carrying a
positive weight lambda_k, so that tau(x) = sum_k lambda_k tr(x_k). Elements
are tuples of dense complex blocks. Vectorized coordinates concatenate the
row-major ravel of every block; maps act on those coordinates.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import DEFAULT
from .errors import DomainError, StructuralError


@dataclass(frozen=True)
class Block:
    dim: int
    weight: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise StructuralError(f"block dim must be a positive integer, got {self.dim!r}")
        w = float(self.weight)
        if not np.isfinite(w) or w <= 0:
            raise StructuralError(f"block weight must be positive and finite, got {self.weight!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class Algebra:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Block) else Block(*b) for b in self.blocks)
        if not blocks:
            raise StructuralError("an algebra needs at least one block")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def matrix(cls, n, weight=1.0):
        """The full matrix algebra M_n with trace weight * tr."""
        return cls((Block(n, weight),))

    @classmethod
    def of(cls, dims, weights=None):
        weights = [1.0] * len(dims) if weights is None else weights
        if len(weights) != len(dims):
            raise StructuralError("dims and weights differ in length")
        return cls(tuple(Block(d, w) for d, w in zip(dims, weights)))

    @property
    def dims(self):
        return tuple(b.dim for b in self.blocks)

    @property
    def weights(self):
        return tuple(b.weight for b in self.blocks)

    @property
    def is_abelian(self):
        return all(d == 1 for d in self.dims)

    @cached_property
    def offsets(self):
        out = [0]
        for d in self.dims:
            out.append(out[-1] + d * d)
        return tuple(out)

    @property
    def vec_dim(self):
        return self.offsets[-1]

    @cached_property
    def coord_weights(self):
        """Trace weight attached to each vector coordinate."""
        return np.concatenate([np.full(d * d, w) for d, w in zip(self.dims, self.weights)])

    def element(self, blocks):
        return Element(self, blocks)

    def zero(self):
        return Element(self, [np.zeros((d, d), complex) for d in self.dims])

    def identity(self):
        return Element(self, [np.eye(d, dtype=complex) for d in self.dims])

    def unit(self, k, i, j):
        """Matrix unit E_ij inside block k."""
        x = self.zero()
        x.blocks[k][i, j] = 1.0
        return x

    def basis(self):
        """Matrix units in vectorization order."""
        return [self.from_vec(v) for v in np.eye(self.vec_dim, dtype=complex)]

    def from_vec(self, v):
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.vec_dim,):
            raise StructuralError(f"vector of length {v.shape} does not fit algebra of dim {self.vec_dim}")
        o = self.offsets
        return Element(self, [v[o[k]:o[k + 1]].reshape(d, d).copy() for k, d in enumerate(self.dims)])

    def random(self, rng, hermitian=False, positive=False):
        blocks = []
        for d in self.dims:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            if positive:
                g = g @ g.conj().T
            elif hermitian:
                g = (g + g.conj().T) / 2
            blocks.append(g)
        return Element(self, blocks)

    def random_unitary(self, rng):
        blocks = []
        for d in self.dims:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            q, r = np.linalg.qr(g)
            blocks.append(q * (np.diag(r) / np.abs(np.diag(r))))
        return Element(self, blocks)

    def to_json(self):
        return {"blocks": [{"dim": b.dim, "weight": b.weight} for b in self.blocks]}


class Element:
    """A block-diagonal element of an Algebra.

    Treated as immutable by every library function; arithmetic returns new
    elements.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra, blocks):
        blocks = [np.array(b, dtype=complex) for b in blocks]
        if len(blocks) != len(algebra.dims):
            raise StructuralError(f"expected {len(algebra.dims)} blocks, got {len(blocks)}")
        for k, (b, d) in enumerate(zip(blocks, algebra.dims)):
            if b.shape != (d, d):
                raise StructuralError(f"block {k} has shape {b.shape}, algebra expects ({d}, {d})")
        self.algebra = algebra
        self.blocks = blocks

    def _check(self, other):
        if not isinstance(other, Element):
            raise StructuralError(f"expected an Element, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise StructuralError("elements live in different algebras")

    def vec(self):
        return np.concatenate([b.ravel() for b in self.blocks])

    @property
    def H(self):
        return Element(self.algebra, [b.conj().T for b in self.blocks])

    def __add__(self, other):
        self._check(other)
        return Element(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return Element(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.algebra, [-a for a in self.blocks])

    def __mul__(self, c):
        if isinstance(c, Element):
            raise TypeError("use @ for the algebra product")
        return Element(self.algebra, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        self._check(other)
        return Element(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def max_abs(self):
        return max(float(np.max(np.abs(b))) for b in self.blocks)

    def close(self, other, tol=DEFAULT.tol):
        self._check(other)
        scale = max(1.0, self.max_abs(), other.max_abs())
        return (self - other).max_abs() <= tol * scale

    def is_hermitian(self, tol=DEFAULT.tol):
        return self.close(self.H, tol)

    def __repr__(self):
        return f"Element(dims={self.algebra.dims}, blocks={[b.round(6).tolist() for b in self.blocks]})"


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: tuple
    projections: tuple

    def reconstruct(self):
        out = self.projections[0] * 0
        for lam, P in zip(self.eigenvalues, self.projections):
            out = out + lam * P
        return out


def trace(x):
    """Weighted trace sum_k lambda_k tr(x_k)."""
    return complex(sum(w * np.trace(b) for w, b in zip(x.algebra.weights, x.blocks)))


def inner(x, y):
    """tau(x* y)."""
    x._check(y)
    return complex(sum(w * np.vdot(a, b) for w, a, b in zip(x.algebra.weights, x.blocks, y.blocks)))


def _require_hermitian(x, tol):
    if not x.is_hermitian(tol=max(tol, 1e-9)):
        raise DomainError("operation requires a self-adjoint element")


def _eigh_blocks(x):
    out = []
    for b in x.blocks:
        vals, vecs = np.linalg.eigh((b + b.conj().T) / 2)
        out.append((vals, vecs))
    return out


def _funcalc(x, fn):
    blocks = [(v * fn(w)) @ v.conj().T for w, v in _eigh_blocks(x)]
    return Element(x.algebra, blocks)


def _eig_max(x):
    return max(float(np.max(np.abs(w))) for w, _ in _eigh_blocks(x))


def is_positive(x, tol=DEFAULT.tol):
    _require_hermitian(x, tol)
    return min(float(np.min(w)) for w, _ in _eigh_blocks(x)) >= -tol


def power(x, s, rank_tol=DEFAULT.rank_tol, tol=DEFAULT.tol):
    """x^s by functional calculus.

    Integer s works for any self-adjoint x. Non-integer s needs x >= 0, and
    s <= 0 is taken on the support (zero on the kernel).
    """
    _require_hermitian(x, tol)
    integer = float(s).is_integer() and s > 0
    lmax = _eig_max(x)
    cut = rank_tol * lmax
    if not integer and not is_positive(x, tol * max(1.0, lmax)):
        raise DomainError("non-integer powers need a positive element")

    def fn(w):
        if integer:
            return w ** int(s)
        w = np.where(w > cut, w, 0.0)
        if s > 0:
            return w ** s
        safe = np.where(w > cut, w, 1.0)
        return np.where(w > cut, safe ** s, 0.0)

    return _funcalc(x, fn)


def pseudo_inverse(x, rank_tol=DEFAULT.rank_tol, tol=DEFAULT.tol):
    """Inverse on the support of a self-adjoint x, zero on its kernel."""
    _require_hermitian(x, tol)
    cut = rank_tol * _eig_max(x)

    def fn(w):
        keep = np.abs(w) > cut
        return np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)

    return _funcalc(x, fn)


def support(x, rank_tol=DEFAULT.rank_tol, tol=DEFAULT.tol):
    """Projection onto the range of a positive x (eigenvalues above rank_tol * max)."""
    lmax = _eig_max(x) if x.max_abs() > 0 else 0.0
    if not is_positive(x, tol * max(1.0, lmax)):
        raise DomainError("support requires a positive semidefinite element")
    cut = rank_tol * lmax
    return _funcalc(x, lambda w: (w > cut).astype(float) if lmax > 0 else np.zeros_like(w))


def spectral(x, rank_tol=DEFAULT.rank_tol, tol=DEFAULT.tol, cluster_tol=1e-8):
    """Spectral projections of a self-adjoint x, one per distinct eigenvalue."""
    _require_hermitian(x, tol)
    pairs = _eigh_blocks(x)
    values = np.concatenate([w for w, _ in pairs])
    scale = max(1.0, float(np.max(np.abs(values))))
    distinct = []
    for v in np.sort(values):
        if not distinct or v - distinct[-1][-1] > cluster_tol * scale:
            distinct.append([v])
        else:
            distinct[-1].append(v)
    eigs, projs = [], []
    for group in distinct:
        lo, hi = group[0], group[-1]
        blocks = []
        for w, vecs in pairs:
            mask = (w >= lo - cluster_tol * scale / 2) & (w <= hi + cluster_tol * scale / 2)
            blocks.append(vecs[:, mask] @ vecs[:, mask].conj().T)
        eigs.append(float(np.mean(group)))
        projs.append(Element(x.algebra, blocks))
    return SpectralData(tuple(eigs), tuple(projs))


def polar(x, rank_tol=DEFAULT.rank_tol):
    """x = w B with B = |x| and w = x B^+, so that w*w = support(B)."""
    wb, bb = [], []
    for blk in x.blocks:
        u, s, vh = np.linalg.svd(blk)
        smax = s[0] if s.size else 0.0
        keep = s > rank_tol * smax if smax > 0 else np.zeros_like(s, bool)
        v = vh.conj().T
        bb.append((v * s) @ vh)
        wb.append(u[:, keep] @ vh[keep, :])
    return Element(x.algebra, wb), Element(x.algebra, bb)


def abs_(x):
    return polar(x)[1]


def commutator(x, y):
    return x @ y - y @ x


# Constructions on algebras.


def tensor_algebra(a, b):
    """Blocks (k, l) in lexicographic order, dim n_k m_l, weight lambda_k mu_l."""
    return Algebra(tuple(Block(p.dim * q.dim, p.weight * q.weight) for p in a.blocks for q in b.blocks))


def tensor(x, y):
    alg = tensor_algebra(x.algebra, y.algebra)
    return Element(alg, [np.kron(p, q) for p in x.blocks for q in y.blocks])


def direct_sum_algebra(a, b):
    return Algebra(a.blocks + b.blocks)


def direct_sum(x, y):
    return Element(direct_sum_algebra(x.algebra, y.algebra), list(x.blocks) + list(y.blocks))


def split_direct_sum(z, first):
    """Inverse of direct_sum given the first summand's algebra."""
    k = len(first.dims)
    if z.algebra.blocks[:k] != first.blocks:
        raise StructuralError("element does not start with the given summand")
    rest = Algebra(z.algebra.blocks[k:])
    return Element(first, z.blocks[:k]), Element(rest, z.blocks[k:])


@dataclass(frozen=True)
class Corner:
    """The reduced algebra eMe realized as a standalone Algebra.

    ``isometries[k]`` spans the range of e in block k (None when empty).
    Weights are inherited, so the trace is the restriction of tau_M.
    """

    parent: Algebra
    algebra: Algebra
    isometries: tuple
    kept: tuple

    def compress(self, x):
        if x.algebra != self.parent:
            raise StructuralError("element is not in the parent algebra")
        return Element(self.algebra, [self.isometries[k].conj().T @ x.blocks[k] @ self.isometries[k] for k in self.kept])

    def expand(self, y):
        blocks = [np.zeros((d, d), complex) for d in self.parent.dims]
        for j, k in enumerate(self.kept):
            v = self.isometries[k]
            blocks[k] = v @ y.blocks[j] @ v.conj().T
        return Element(self.parent, blocks)


def corner(e, tol=DEFAULT.tol):
    """Build eMe for a projection e."""
    if not (e.is_hermitian(tol) and (e @ e).close(e, 1e-8)):
        raise DomainError("corner needs an orthogonal projection")
    isos, kept, blocks = [], [], []
    for k, (b, blk) in enumerate(zip(e.algebra.blocks, e.blocks)):
        w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        v = v[:, w > 0.5]
        isos.append(v if v.shape[1] else None)
        if v.shape[1]:
            kept.append(k)
            blocks.append(Block(v.shape[1], b.weight))
    if not blocks:
        raise DomainError("corner of the zero projection is empty")
    return Corner(e.algebra, Algebra(tuple(blocks)), tuple(isos), tuple(kept))
