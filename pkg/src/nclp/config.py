import os
from dataclasses import dataclass, field, replace

import numpy as np

INF = float("inf")


def _default_threads():
    try:
        return max(1, int(os.environ.get("NCLP_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class OptConfig:
    """Knobs for the numerical searches.

    ``restarts`` and ``iters`` bound every optimizer; ``seed`` is the root of
    all randomness, split into independent streams per restart.
    """

    restarts: int = 8
    iters: int = 400
    seed: int = 0
    rel_tol: float = 1e-3
    max_m: int = 64
    tol: float = 1e-9
    rank_tol: float = 1e-10
    trials: int = 40
    margin: float = 0.05
    ascent_steps: int = 12
    threads: int = field(default_factory=_default_threads)

    def with_(self, **kw):
        return replace(self, **kw)

    def streams(self, count, salt=0):
        """Independent generators for ``count`` restarts."""
        ss = np.random.SeedSequence([self.seed, salt])
        return [np.random.default_rng(s) for s in ss.spawn(count)]


DEFAULT = OptConfig()


def parallel_map(fn, items, config):
    """Map ``fn`` over ``items``; uses a thread pool when config.threads > 1.

    Output order always follows input order so results stay deterministic.
    """
    items = list(items)
    if config.threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(fn, items))
