"""Separating maps and their Yeadon triples (w, B, J).

A separating map factors as T(x) = w B J(x) with w a partial isometry, B a
positive operator commuting with the range of J, and J a Jordan
*-homomorphism with w*w = J(1) = s(B). At finite dimension every condition
is a finite linear-algebra identity, checked on matrix-unit bases.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    Algebra,
    Element,
    direct_sum,
    is_positive,
    polar,
    power,
    pseudo_inverse,
    spectral,
    support,
    tensor,
    tensor_algebra,
    trace,
)
from .config import DEFAULT
from .errors import InternalInconsistencyError, PreconditionError, StructuralError
from .maps import LpMap, from_function
from .schatten import check_p, lp_norm

DIRECT, ANTI, MIXED, NOT_SEPARATING = "direct", "anti-direct", "mixed", "not-separating"


@dataclass
class YeadonTriple:
    w: Element
    B: Element
    J: LpMap
    e: Element = None
    f: Element = None
    verdict: str = None
    checks: dict = field(default_factory=dict)


@dataclass
class NotSeparating:
    failed: str
    witness: tuple = None
    checks: dict = field(default_factory=dict)

    verdict = NOT_SEPARATING


def _scale(*els):
    return max([1.0] + [x.max_abs() for x in els])


def _small(x, tol, scale=1.0):
    return x.max_abs() <= tol * max(1.0, scale)


def disjoint_pairs(algebra, rng, trials):
    """Pairs (x, y) with x*y = x y* = 0 built as x = P a R, y = Q b S.

    P is orthogonal to Q and R to S inside every block, so the products vanish
    structurally. Matrix-unit pairs E_ij, E_kl with i != k, j != l and pairs
    from different blocks come first.
    """
    out = []
    dims = algebra.dims
    for k, d in enumerate(dims):
        for i in range(d):
            for j in range(d):
                for a in range(d):
                    for b in range(d):
                        if a != i and b != j:
                            out.append((algebra.unit(k, i, j), algebra.unit(k, a, b)))
    for k in range(len(dims)):
        for l in range(len(dims)):
            if k != l:
                out.append((algebra.unit(k, 0, 0), algebra.unit(l, 0, 0)))
    for _ in range(trials):
        P, Q, R, S = ([], [], [], [])
        for d in dims:
            u = _haar(d, rng)
            v = _haar(d, rng)
            r = int(rng.integers(0, d + 1))
            s = int(rng.integers(0, d + 1))
            P.append(u[:, :r] @ u[:, :r].conj().T)
            Q.append(u[:, r:] @ u[:, r:].conj().T)
            R.append(v[:, :s] @ v[:, :s].conj().T)
            S.append(v[:, s:] @ v[:, s:].conj().T)
        a = algebra.random(rng)
        b = algebra.random(rng)
        x = Element(algebra, [p @ ab @ r for p, ab, r in zip(P, a.blocks, R)])
        y = Element(algebra, [q @ bb @ s for q, bb, s in zip(Q, b.blocks, S)])
        out.append((x, y))
    return out


def _haar(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def falsify_separating(T, config=DEFAULT, tol=1e-8):
    """Search disjoint pairs for T(x)*T(y) != 0 or T(x)T(y)* != 0."""
    rng = config.streams(1, salt=31)[0]
    for x, y in disjoint_pairs(T.dom, rng, config.trials):
        tx, ty = T.apply(x), T.apply(y)
        s = _scale(tx, ty) ** 2
        if not (_small(tx.H @ ty, tol, s) and _small(tx @ ty.H, tol, s)):
            return (x, y)
    return None


def extract_triple(T, p=None, config=DEFAULT, tol=1e-8):
    """Yeadon triple of T, or NotSeparating naming the failed identity.

    (w, B) = polar(T(1)), J = B^+ w* T. Conditions are checked on bases and
    cross-validated against the disjoint-pair falsifier.
    """
    if p is not None:
        check_p(p, allow_inf=False)
    N = T.cod
    if T.is_zero(0.0):
        J = LpMap(T.dom, N, np.zeros_like(T.matrix), "jordan")
        z = N.zero()
        return YeadonTriple(z, z, J, z, z, DIRECT, {"zero_map": True})
    one = T.apply(T.dom.identity())
    if _small(one, tol, np.max(np.abs(T.matrix))):
        return NotSeparating("T(1) = 0 for a non-zero map", falsify_separating(T, config, tol))
    w, B = polar(one)
    sB = support(B)
    Binv = pseudo_inverse(B)
    wstar = w.H
    J = from_function(T.dom, N, lambda x: Binv @ wstar @ T.apply(x), "jordan")
    basis = T.dom.basis()
    images = [J.apply(x) for x in basis]
    timages = [T.apply(x) for x in basis]
    sc = _scale(*images)
    checks = {}
    checks["a_wstar_w_is_support"] = (w.H @ w).close(sB, tol)
    checks["a_J1_is_support"] = J.apply(T.dom.identity()).close(sB, tol)
    checks["b_B_commutes_with_J"] = all(_small(B @ j - j @ B, tol, _scale(B) * sc) for j in images)
    checks["c_T_is_wBJ"] = all((w @ B @ j).close(t, tol) for j, t in zip(images, timages))
    checks["jordan_involution"] = all(J.apply(x.H).close(j.H, tol) for x, j in zip(basis, images))
    jordan_ok = True
    for a, x in enumerate(basis):
        for b in range(a, len(basis)):
            y = basis[b]
            lhs = J.apply(x @ y + y @ x)
            rhs = images[a] @ images[b] + images[b] @ images[a]
            if not lhs.close(rhs, tol * max(1.0, sc * sc)):
                jordan_ok = False
                break
        if not jordan_ok:
            break
    checks["jordan_product"] = jordan_ok
    witness = falsify_separating(T, config, tol)
    checks["falsifier_clean"] = witness is None
    identities = {k: v for k, v in checks.items() if k != "falsifier_clean"}
    if all(identities.values()):
        if witness is not None:
            raise InternalInconsistencyError("triple verified but a disjoint pair violates separation")
        rng = config.streams(1, salt=37)[0]
        checks["wstarT_positive_spot"] = _spot_positive(T, w, rng)
        triple = YeadonTriple(w, B, J, checks=checks)
        e, f, _, _, info = decompose_jordan(J, tol=tol)
        triple.e, triple.f = e, f
        triple.verdict = info["verdict"]
        return triple
    failed = next(k for k, v in identities.items() if not v)
    return NotSeparating(failed, witness, checks)


def _spot_positive(T, w, rng, trials=10):
    for _ in range(trials):
        x = T.dom.random(rng, positive=True)
        y = w.H @ T.apply(x)
        s = max(1.0, y.max_abs())
        if not y.is_hermitian(1e-8 * s) or not is_positive(y, 1e-8 * s):
            return False
    return True


# Generated algebra, center and central decomposition.


def _span_basis(vectors, tol=1e-10):
    if not vectors:
        return np.zeros((0, 0))
    A = np.stack(vectors, axis=1)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((A.shape[0], 0))
    return u[:, s > tol * s[0]]


def generated_algebra(gens, algebra, tol=1e-10):
    """Orthonormal basis (columns, vectorized) of the algebra generated by gens."""
    span = _span_basis([g.vec() for g in gens], tol)
    while True:
        elems = [algebra.from_vec(v) for v in span.T]
        prods = [a @ g for a in elems for g in gens]
        new = _span_basis([v for v in span.T] + [x.vec() for x in prods], tol)
        if new.shape[1] == span.shape[1]:
            return span
        span = new


def center(span, gens, algebra, tol=1e-9):
    """Basis of the center of the algebra spanned by ``span`` (commutes with gens)."""
    elems = [algebra.from_vec(v) for v in span.T]
    rows = []
    for g in gens:
        rows.append(np.stack([(z @ g - g @ z).vec() for z in elems], axis=1))
    if not rows:
        return span
    C = np.vstack(rows)
    _, s, vh = np.linalg.svd(C)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > tol * smax))
    null = vh[rank:].conj().T
    return span @ null


def minimal_central_projections(zbasis, unit, algebra, rng, tol=1e-8):
    """Minimal projections of a commutative *-algebra with unit ``unit``."""
    zs = [algebra.from_vec(v) for v in zbasis.T]
    herm = []
    for z in zs:
        herm.append((z + z.H) * 0.5)
        herm.append((z - z.H) * (-0.5j))
    h = unit * 0
    for z in herm:
        h = h + float(rng.standard_normal()) * z
    h = h + (float(rng.uniform(2, 3)) * max(1.0, h.max_abs() * 10)) * unit
    sd = spectral(h, cluster_tol=1e-7)
    out = []
    for lam, P in zip(sd.eigenvalues, sd.projections):
        if abs(lam) > tol * max(1.0, max(abs(v) for v in sd.eigenvalues)):
            out.append(P)
    return out


def _is_mult(J, z, basis, images, anti, tol):
    for a, x in enumerate(basis):
        for b, y in enumerate(basis):
            lhs = J.apply(x @ y) @ z
            rhs = (images[b] @ images[a] if anti else images[a] @ images[b]) @ z
            if not lhs.close(rhs, tol):
                return False
    return True


def decompose_jordan(J, tol=1e-8, seed=0):
    """Central projections e, f with J(.)e multiplicative and J(.)f anti-multiplicative.

    Returns (e, f, pi, sigma, info). Abelian pieces, which are both, go to e.
    """
    N = J.cod
    basis = J.dom.basis()
    images = [J.apply(x) for x in basis]
    unit = J.apply(J.dom.identity())
    if unit.max_abs() <= tol:
        z = N.zero()
        zero = LpMap(J.dom, N, np.zeros_like(J.matrix), "pi")
        return z, z, zero, LpMap(J.dom, N, np.zeros_like(J.matrix), "sigma"), {"verdict": DIRECT, "blocks": []}
    span = generated_algebra(images, N)
    zb = center(span, images, N)
    rng = np.random.default_rng(seed)
    projs = minimal_central_projections(zb, unit, N, rng)
    e, f = N.zero(), N.zero()
    blocks = []
    all_mult, all_anti = True, True
    sc = max(1.0, max(x.max_abs() for x in images) ** 2)
    for z in projs:
        m = _is_mult(J, z, basis, images, False, tol * sc)
        a = _is_mult(J, z, basis, images, True, tol * sc)
        if not (m or a):
            raise InternalInconsistencyError("a central block of the generated algebra is neither multiplicative nor anti-multiplicative")
        blocks.append({"multiplicative": m, "anti_multiplicative": a, "rank": float(trace(z).real)})
        all_mult &= m
        all_anti &= a
        if m:
            e = e + z
        else:
            f = f + z
    if not (e + f).close(unit, 1e-7):
        raise InternalInconsistencyError("central projections do not sum to J(1)")
    pi = from_function(J.dom, N, lambda x: J.apply(x) @ e, "pi")
    sigma = from_function(J.dom, N, lambda x: J.apply(x) @ f, "sigma")
    if all_mult:
        verdict = DIRECT
    elif all_anti:
        verdict = ANTI
    else:
        verdict = MIXED
    return e, f, pi, sigma, {"verdict": verdict, "blocks": blocks, "generated_dim": span.shape[1], "center_dim": zb.shape[1]}


def classify(T, p=None, config=DEFAULT):
    res = extract_triple(T, p, config)
    return res.verdict


def split_map(T, p=None, config=DEFAULT, tol=1e-8):
    """T = T1 + T2 with T1 = T(.)e and T2 = T(.)f; needs w = J(1)."""
    tr = extract_triple(T, p, config, tol)
    if isinstance(tr, NotSeparating):
        raise PreconditionError(f"map is not separating ({tr.failed})")
    j1 = tr.J.apply(T.dom.identity())
    if not tr.w.close(j1, tol):
        raise PreconditionError("w differs from J(1); pre-compose with w* (x -> w* T(x)) first")
    T1 = from_function(T.dom, T.cod, lambda x: T.apply(x) @ tr.e, "direct-part")
    T2 = from_function(T.dom, T.cod, lambda x: T.apply(x) @ tr.f, "anti-part")
    return T1, T2, tr


def precompose_wstar(T, w):
    """x -> w* T(x), whose Yeadon triple is (J(1), B, J)."""
    return from_function(T.dom, T.cod, lambda x: w.H @ T.apply(x), "wstar-precomposed")


# Isometry checks and generated isometries.


def is_isometry(T, p, method="sample", config=DEFAULT, tol=1e-8):
    p = check_p(p, allow_inf=False)
    if method == "sample":
        rng = config.streams(1, salt=41)[0]
        xs = T.dom.basis() + [T.dom.random(rng) for _ in range(config.trials)]
        xs += [T.dom.random(rng, positive=True) for _ in range(config.trials // 2)]
        for x in xs:
            nx = lp_norm(x, p)
            if abs(lp_norm(T.apply(x), p) - nx) > tol * max(1.0, nx):
                return False
        return True
    if method == "yeadon":
        tr = extract_triple(T, p, config, tol)
        if isinstance(tr, NotSeparating):
            raise PreconditionError(f"yeadon method needs a separating map ({tr.failed})")
        Bp = power(tr.B, p)
        for y in T.dom.basis():
            if abs(trace(Bp @ tr.J.apply(y)) - trace(y)) > tol * max(1.0, abs(trace(y))):
                return False
        return True
    raise ValueError(f"unknown method {method!r}")


@dataclass
class IsometrySpec:
    """Recipe for an isometry with a known Yeadon triple.

    parts: list of (kind, b) with kind 'direct' or 'anti' and b a positive
    element of an auxiliary algebra; part i contributes J_i(x) = x (x) s(b)
    or t(x) (x) s(b) and B_i = 1 (x) b.
    """

    dom: Algebra
    parts: list
    p: float
    twist: bool = True
    seed: int = 0

    def expected_verdict(self):
        kinds = {k for k, _ in self.parts}
        if not kinds:
            raise PreconditionError("no parts")
        if self.dom.is_abelian or kinds == {"direct"}:
            return DIRECT
        if kinds == {"anti"}:
            return ANTI
        return MIXED


@dataclass
class GeneratedIsometry:
    T: LpMap
    w: Element
    B: Element
    J: LpMap
    spec: IsometrySpec


def _blockwise_transpose(x):
    return Element(x.algebra, [b.T for b in x.blocks])


def generate_isometry(spec):
    """Build T = w B J from the spec, rescaling B so that tau(B^p J(y)) = tau(y)."""
    p = check_p(spec.p, allow_inf=False)
    M = spec.dom
    if not spec.parts:
        raise PreconditionError("infeasible rescaling: J = 0")
    parts = []
    for kind, b in spec.parts:
        if kind not in ("direct", "anti"):
            raise StructuralError(f"unknown part kind {kind!r}")
        if not is_positive(b):
            raise PreconditionError("B parts must be positive")
        parts.append((kind, b, support(b)))
    cods = [tensor_algebra(M, b.algebra) for _, b, _ in parts]
    N = cods[0]
    for c in cods[1:]:
        N = Algebra(N.blocks + c.blocks)

    def J0(x):
        pieces = [tensor(x if kind == "direct" else _blockwise_transpose(x), s) for kind, _, s in parts]
        return Element(N, [blk for piece in pieces for blk in piece.blocks])

    def Bfor(c):
        pieces = [tensor(c, b) for _, b, _ in parts]
        return Element(N, [blk for piece in pieces for blk in piece.blocks])

    ones = M.identity()
    B0 = Bfor(ones)
    B0p = power(B0, p)
    coeffs = []
    for k, d in enumerate(M.dims):
        y = M.unit(k, 0, 0)
        s = trace(B0p @ J0(y)).real
        if s <= 0:
            raise PreconditionError("infeasible rescaling: J vanishes on a block")
        coeffs.append((M.weights[k] / s) ** (1.0 / p))
    c = Element(M, [ck * np.eye(d) for ck, d in zip(coeffs, M.dims)])
    B = Bfor(c)
    J = from_function(M, N, J0, "jordan")
    unitJ = J.apply(ones)
    if spec.twist:
        u = N.random_unitary(np.random.default_rng(spec.seed))
        w = u @ unitJ
    else:
        w = unitJ
    T = from_function(M, N, lambda x: w @ B @ J0(x), f"isometry({spec.expected_verdict()})")
    return GeneratedIsometry(T, w, B, J, spec)


def scaled_transpose_pair_map(n, p):
    """(x, y) -> (x, n^{-1/p} t(x)) on M_n (+) M_n, a separating non-isometry."""
    Mn = Algebra.matrix(n)
    dom = Algebra(Mn.blocks + Mn.blocks)

    def fn(z):
        x = Element(Mn, [z.blocks[0]])
        return direct_sum(x, n ** (-1.0 / p) * _blockwise_transpose(x))

    return from_function(dom, dom, fn, "scaled-transpose-pair")


def theorem_gate(T, p, config=DEFAULT, tol=1e-2):
    """Check the certifiable directions linking direct factorizations and contractivity."""
    from .map_norms import amplified_norm, s1_map_norm

    p = check_p(p, allow_inf=False)
    if not is_isometry(T, p, "sample", config):
        raise PreconditionError("theorem_gate needs an isometry")
    verdict = classify(T, p, config)
    s1_2 = s1_map_norm(T, p, 2, config).value
    amp2 = amplified_norm(T, p, 2, config).value
    margin = config.margin
    assertions = []
    if verdict == DIRECT:
        assertions.append({"name": "direct => s1_2 <= 1+tol", "pass": bool(s1_2 <= 1 + tol)})
        assertions.append({"name": "direct => amp2 <= 1+tol", "pass": bool(amp2 <= 1 + tol)})
    else:
        assertions.append({"name": "not direct => s1_2 > 1+margin", "pass": bool(s1_2 > 1 + margin)})
        if p != 2:
            assertions.append({"name": "not direct, p != 2 => amp2 > 1+margin", "pass": bool(amp2 > 1 + margin)})
    return {"verdict": verdict, "s1_2": float(s1_2), "amp2": float(amp2), "assertions": assertions,
            "pass": all(a["pass"] for a in assertions)}


def normalized(T, p, config=DEFAULT):
    """||T||^{-1} T using the best operator-norm lower bound."""
    from .map_norms import op_norm
    from .maps import scale

    v = op_norm(T, p, config).value
    if v == 0:
        raise PreconditionError("cannot normalize the zero map")
    return scale(1.0 / v, T)


def triple_matches(tr, gen, tol=1e-8):
    """Entrywise agreement of an extracted triple with a generated one."""
    return {
        "w": tr.w.close(gen.w, tol),
        "B": tr.B.close(gen.B, tol),
        "J": tr.J.close(gen.J, tol),
    }


__all__ = [
    "DIRECT", "ANTI", "MIXED", "NOT_SEPARATING", "YeadonTriple", "NotSeparating", "extract_triple",
    "decompose_jordan", "classify", "split_map", "precompose_wstar", "is_isometry", "IsometrySpec",
    "generate_isometry", "theorem_gate", "normalized", "triple_matches", "falsify_separating",
    "disjoint_pairs", "generated_algebra", "center", "scaled_transpose_pair_map",
]
