"""Weighted Schatten norms and the identities they satisfy."""

import numpy as np

from .algebra import Element, direct_sum, tensor
from .config import DEFAULT, INF
from .errors import DomainError, StructuralError


def check_p(p, allow_inf=True):
    if p == INF or (isinstance(p, str) and p.lower() in ("inf", "infinity")):
        if not allow_inf:
            raise DomainError("only finite p is supported here")
        return INF
    p = float(p)
    if not np.isfinite(p):
        if allow_inf and p > 0:
            return INF
        raise DomainError(f"invalid exponent {p}")
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return p


def conjugate_exponent(p):
    p = check_p(p)
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1)


def singular_values(x):
    """Per-block singular values, largest first."""
    return [np.linalg.svd(b, compute_uv=False) for b in x.blocks]


def lp_norm(x, p):
    """(sum_k lambda_k sum_i s_{k,i}^p)^{1/p}; the largest singular value at INF."""
    p = check_p(p)
    svs = singular_values(x)
    if p == INF:
        return float(max(s.max() if s.size else 0.0 for s in svs))
    total = sum(w * float(np.sum(s ** p)) for w, s in zip(x.algebra.weights, svs))
    return total ** (1.0 / p)


def norm_gradient(x, p):
    """Euclidean gradient of x -> ||x||_p in vectorized coordinates.

    Valid where the norm is differentiable (x != 0; full rank when p = 1).
    """
    p = check_p(p, allow_inf=False)
    nu = lp_norm(x, p)
    if nu == 0:
        return np.zeros(x.algebra.vec_dim, complex)
    parts = []
    for w, b in zip(x.algebra.weights, x.blocks):
        u, s, vh = np.linalg.svd(b)
        parts.append((w * nu ** (1 - p) * (u * s ** (p - 1)) @ vh).ravel())
    return np.concatenate(parts)


def dual_witness(x, p):
    """y with ||y||_{p'} = 1 and tau(x y) = ||x||_p.

    y = |x|^{p-1} w* / ||x||_p^{p-1} where x = w|x|; at p = 1 it is w*.
    """
    p = check_p(p, allow_inf=False)
    nu = lp_norm(x, p)
    blocks = []
    for b in x.blocks:
        u, s, vh = np.linalg.svd(b)
        if nu == 0:
            blocks.append(np.zeros_like(b))
            continue
        keep = s > DEFAULT.rank_tol * s[0]
        scale = np.where(keep, (s / nu) ** (p - 1), 0.0)
        blocks.append((vh.conj().T * scale) @ u.conj().T)
    return Element(x.algebra, blocks)


def holder_check(x, y, p, q, tol=1e-9):
    """||x y||_r <= ||x||_p ||y||_q with 1/r = 1/p + 1/q.

    Accepts r >= 1, plus r = p/2 when q = p (the case used for row and
    column families).
    """
    if x.algebra != y.algebra:
        raise StructuralError("holder_check needs elements of the same algebra")
    p, q = check_p(p), check_p(q)
    inv = (0 if p == INF else 1 / p) + (0 if q == INF else 1 / q)
    if inv == 0:
        r = INF
    else:
        r = 1 / inv
        if r < 1 and not (p == q and abs(r - p / 2) < 1e-12):
            raise DomainError(f"exponent r = {r} is outside the supported range")
    lhs = _quasi_norm(x @ y, r)
    rhs = lp_norm(x, p) * lp_norm(y, q)
    return bool(lhs <= rhs + tol * max(1.0, rhs))


def _quasi_norm(x, r):
    if r == INF:
        return lp_norm(x, INF)
    total = sum(w * float(np.sum(s ** r)) for w, s in zip(x.algebra.weights, singular_values(x)))
    return total ** (1.0 / r)


def tensor_norm_identity(x, y, p):
    """(||x (x) y||_p, ||x||_p ||y||_p)."""
    p = check_p(p)
    return lp_norm(tensor(x, y), p), lp_norm(x, p) * lp_norm(y, p)


def direct_sum_norm(x1, x2, p):
    """(||x1||_p^p + ||x2||_p^p)^{1/p}, the norm of (x1, x2) in the l^p sum."""
    p = check_p(p, allow_inf=False)
    return (lp_norm(x1, p) ** p + lp_norm(x2, p) ** p) ** (1.0 / p)


def direct_sum_norm_identity(x1, x2, p):
    """(direct_sum_norm, lp_norm of the concatenated element)."""
    return direct_sum_norm(x1, x2, p), lp_norm(direct_sum(x1, x2), p)
