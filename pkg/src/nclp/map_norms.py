"""Lower bounds for operator, amplified and S^1 map norms.

Every value returned here is attained by an explicit witness, so it is a
certified lower bound. At p = 2 the operator norm is computed exactly.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .algebra import Algebra, Element, tensor_algebra
from .config import DEFAULT, parallel_map
from .errors import PreconditionError
from .maps import amplify_sp, is_completely_positive
from .s1_solver import s1_norm, s1_norm_opt
from .schatten import check_p, lp_norm, norm_gradient
from .vector_valued import GridElement, Factorization, ptrace


@dataclass
class NormResult:
    value: float
    witness: object
    details: dict = field(default_factory=dict)


def _ratio(T, x, p):
    nx = lp_norm(x, p)
    return 0.0 if nx == 0 else lp_norm(T.apply(x), p) / nx


def _op_norm_p2(T):
    sd = np.sqrt(T.dom.coord_weights)
    sc = np.sqrt(T.cod.coord_weights)
    W = (sc[:, None] * T.matrix) / sd[None, :]
    u, s, vh = np.linalg.svd(W)
    if s.size == 0:
        return 0.0, T.dom.zero()
    x = T.dom.from_vec(vh[0].conj() / sd)
    return float(s[0]), x


def _ascend(T, p, x0, iters):
    """Local maximization of ||Tx||_p / ||x||_p from x0 (L-BFGS on the log ratio)."""
    M = T.matrix
    dom, cod = T.dom, T.cod
    dim = dom.vec_dim

    def f(z):
        v = z[:dim] + 1j * z[dim:]
        x = dom.from_vec(v)
        y = cod.from_vec(M @ v)
        nx, ny = lp_norm(x, p), lp_norm(y, p)
        if nx == 0 or ny == 0:
            return 0.0, np.zeros_like(z)
        g = M.conj().T @ norm_gradient(y, p) / ny - norm_gradient(x, p) / nx
        g = -g
        return -np.log(ny) + np.log(nx), np.concatenate([g.real, g.imag])

    v0 = x0.vec()
    res = minimize(f, np.concatenate([v0.real, v0.imag]), jac=True, method="L-BFGS-B",
                   options=dict(maxiter=iters, gtol=1e-12, ftol=1e-14))
    return dom.from_vec(res.x[:dim] + 1j * res.x[dim:])


def _default_seeds(T, rng, count):
    dom = T.dom
    seeds = list(T.witnesses)
    seeds.append(dom.identity())
    # rank-one positive seeds from T^dagger(1): optimal at p = 1 for positive maps
    adj1 = T.adjoint().apply(T.cod.identity())
    for k, blk in enumerate(adj1.blocks):
        h = (blk + blk.conj().T) / 2
        ev, v = np.linalg.eigh(h)
        for idx in (-1, 0):
            x = dom.zero()
            x.blocks[k] = np.outer(v[:, idx], v[:, idx].conj())
            seeds.append(x)
    for k, d in enumerate(dom.dims):
        for i in range(d):
            for j in range(d):
                seeds.append(dom.unit(k, i, j))
    for _ in range(count):
        seeds.append(dom.random(rng))
        seeds.append(dom.random(rng, positive=True))
    return seeds


def op_norm(T, p, config=DEFAULT, seeds=()):
    """Best ratio ||Tx||_p / ||x||_p found, with the maximizing x.

    Exact at p = 2 (largest singular value in trace-weighted coordinates).
    """
    p = check_p(p, allow_inf=False)
    if T.is_zero(0.0):
        return NormResult(0.0, T.dom.identity(), {"method": "zero"})
    if p == 2:
        v, x = _op_norm_p2(T)
        return NormResult(v, x, {"method": "exact-svd"})
    rng = config.streams(1, salt=11)[0]
    cands = list(seeds) + _default_seeds(T, rng, config.restarts)
    scored = sorted(((_ratio(T, x, p), i) for i, x in enumerate(cands)), reverse=True)
    best_val, best_x = scored[0][0], cands[scored[0][1]]
    # keep the strongest seeds plus a couple of random ones for diversity
    starts = [cands[i] for _, i in scored[:config.restarts]]
    surrogates = [p] if p > 1 else [p, 1.01]
    jobs = [(x0, ps) for x0 in starts for ps in surrogates]
    ends = parallel_map(lambda job: _ascend(T, job[1], job[0], config.iters), jobs, config)
    for x in ends:
        val = _ratio(T, x, p)
        if val > best_val:
            best_val, best_x = val, x
    return NormResult(float(best_val), best_x, {"method": "multi-start-lbfgs", "starts": len(starts)})


# Amplification.


def lift_element(z, m_from, m_to, base):
    """Embed an element of M_a (x) base into M_b (x) base (b >= a) as a corner."""
    big = []
    for blk, d in zip(z.blocks, base.dims):
        out = np.zeros((m_to * d, m_to * d), complex)
        out[:m_from * d, :m_from * d] = blk
        big.append(out)
    return Element(tensor_algebra(Algebra.matrix(m_to), base), big)


def canonical_grid_witnesses(dom, m):
    """[E_ij] and [E_ji] style grids of size m over dom, one pair per block."""
    out = []
    for k, d in enumerate(dom.dims):
        r = min(m, d)
        for transpose in (False, True):
            g = GridElement.zeros(dom, m)
            for i in range(r):
                for j in range(r):
                    u = dom.unit(k, j, i) if transpose else dom.unit(k, i, j)
                    g.big[k][i * d:(i + 1) * d, j * d:(j + 1) * d] = u.blocks[k]
            out.append(g)
    return out


def amplified_norm(T, p, m, config=DEFAULT, return_levels=False):
    """Lower bound on ||I_{S^p_m} (x) T|| with a witness.

    Levels 1..m are searched in order; each level is seeded with the previous
    witness placed in a corner, so the bounds are monotone in m.
    """
    p = check_p(p, allow_inf=False)
    levels, prev = [], None
    for level in range(1, m + 1):
        A = T if level == 1 else amplify_sp(T, level)
        seeds = []
        if level > 1:
            base_alg = tensor_algebra(Algebra.matrix(level), T.dom)
            for g in canonical_grid_witnesses(T.dom, level):
                seeds.append(Element(base_alg, g.big))
            seeds.append(lift_element(prev, level - 1, level, T.dom))
        res = op_norm(A, p, config, seeds=seeds)
        if prev is not None and levels and res.value < levels[-1].value:
            res = NormResult(levels[-1].value, lift_element(prev, level - 1, level, T.dom), res.details)
        levels.append(res)
        prev = res.witness
    out = levels[-1]
    if return_levels:
        out.details["levels"] = [lv.value for lv in levels]
    return out


# S^1 map norms.


def _s1_ratio(T, X, p, config):
    """Certified lower bound on ||(T (x) I) X|| / ||X||."""
    den = s1_norm(X, p, config)
    if den.upper == 0:
        return 0.0, den, None
    num = s1_norm(T.apply_grid(X), p, config)
    return num.lower / den.upper, den, num


def s1_map_norm(T, p, n, config=DEFAULT, seeds=()):
    """Lower bound on ||T (x) I_{S^1_n}|| with a witness grid."""
    p = check_p(p, allow_inf=False)
    rng = config.streams(1, salt=23)[0]
    fast = config.with_(restarts=min(config.restarts, 2))
    cands = list(seeds) + canonical_grid_witnesses(T.dom, n)
    opn = op_norm(T, p, config)
    cands.append(GridElement.single(opn.witness, n))
    for w in T.witnesses:
        cands.append(GridElement.single(w, n))
    for _ in range(max(1, config.restarts // 2)):
        cands.append(GridElement.from_entries([[T.dom.random(rng) for _ in range(n)] for _ in range(n)]))
    scored = []
    for X in cands:
        r, _, _ = _s1_ratio(T, X, p, fast)
        scored.append((r, X))
    scored.sort(key=lambda t: -t[0])
    best_r, best_X = scored[0]
    # random-perturbation ascent from the two strongest starts
    for r0, X0 in scored[:2]:
        cur_r, cur_X = r0, X0
        step = 0.3
        for _ in range(config.ascent_steps):
            pert = GridElement.from_entries([[T.dom.random(rng) for _ in range(n)] for _ in range(n)])
            scale_x = max(float(np.max(np.abs(b))) for b in cur_X.big) or 1.0
            Y = cur_X + pert * (step * scale_x / np.sqrt(2 * T.dom.vec_dim))
            r, _, _ = _s1_ratio(T, Y, p, fast)
            if r > cur_r:
                cur_r, cur_X = r, Y
            else:
                step *= 0.6
        if cur_r > best_r:
            best_r, best_X = cur_r, cur_X
    # final certification with the full configuration
    r, den, num = _s1_ratio(T, best_X, p, config)
    return NormResult(float(max(r, 0.0)), best_X, {"op_norm": opn.value, "numerator_lower": num.lower if num else 0.0,
                                                    "denominator_upper": den.upper})


def positive_completion_transfer(T, X, fact, p):
    """Push a factorization of X through a CP map T.

    With C = [A; B*] the 2n-grid Z = C C* = [[A A*, X], [X*, B* B]] is positive,
    so (T (x) I)(Z) is positive too. Its square root splits into a
    factorization of (T (x) I)(X) whose value is at most
    (||T(Tr A A*)||_p ||T(Tr B* B)||_p)^{1/2} <= ||T|| value(fact).
    Returns (factorization of T(X), that bound).
    """
    n = X.n
    dom = X.algebra
    Zbig = []
    for A, B, d in zip(fact.A, fact.B, dom.dims):
        # grid rows 0..n-1 come from A, rows n..2n-1 from B*
        C = np.vstack([A, B.conj().T])
        Zbig.append(C @ C.conj().T)
    Z = GridElement(dom, 2 * n, Zbig)
    TZ = T.apply_grid(Z)
    A2, B2 = [], []
    for blk, d in zip(TZ.big, T.cod.dims):
        ev, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        if ev.min() < -1e-8 * max(1.0, abs(ev).max()):
            raise PreconditionError("map is not completely positive on this witness")
        root = (v * np.sqrt(np.clip(ev, 0, None))) @ v.conj().T
        A2.append(root[:n * d])
        B2.append(root[n * d:].conj().T)
    top = Element(T.cod, [ptrace(blk[:n * d, :n * d], n, d) for blk, d in zip(TZ.big, T.cod.dims)])
    bot = Element(T.cod, [ptrace(blk[n * d:, n * d:], n, d) for blk, d in zip(TZ.big, T.cod.dims)])
    bound = (lp_norm(top, p) * lp_norm(bot, p)) ** 0.5
    f2 = Factorization(T.cod, n, 2 * n, A2, B2)
    return f2, bound


def cp_s1_equality_test(T, p, n_max, config=DEFAULT, tol=1e-2):
    """Check ||T||_{S^1} = ||T|| for a completely positive T on grids up to n_max."""
    p = check_p(p, allow_inf=False)
    if not is_completely_positive(T):
        raise PreconditionError("map is not completely positive")
    opn = op_norm(T, p, config)
    rows, ok = [], True
    for n in range(1, n_max + 1):
        res = s1_map_norm(T, p, n, config)
        X = res.witness
        den = s1_norm_opt(X, p, config)
        f2, bound = positive_completion_transfer(T, X, den.factorization, p)
        residual = f2.residual(T.apply_grid(X))
        transfer_ratio = f2.value(p) / den.lower if den.lower > 0 else 0.0
        upper_ok = res.value <= opn.value * (1 + tol)
        lower_ok = n > 1 or res.value >= opn.value * (1 - tol)
        transfer_ok = residual < 1e-7 and f2.value(p) <= bound * (1 + 1e-9) and bound <= opn.value * den.upper * (1 + tol)
        rows.append({
            "n": n, "s1_lower": res.value, "op_norm": opn.value, "transfer_ratio_upper": transfer_ratio,
            "transfer_residual": residual, "pass": bool(upper_ok and lower_ok and transfer_ok),
        })
        ok = ok and rows[-1]["pass"]
    return {"op_norm": opn.value, "rows": rows, "pass": bool(ok)}
