import functools
import math

import pytest

from knightcount import _backend
from knightcount.board import StartClass
from knightcount.sampler import BatchResult

OFFSETS = [(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)]


def naive_neighbours(side, f, r):
    return [(f + a, r + b) for a, b in OFFSETS if 0 <= f + a < side and 0 <= r + b < side]


@functools.lru_cache(maxsize=None)
def naive_paths(side, start):
    """Every Hamiltonian knight path from ``start``; plain DFS, no pruning."""
    out = []
    path = [start]
    seen = {start}

    def go():
        if len(path) == side * side:
            out.append(tuple(path))
            return
        for nb in naive_neighbours(side, *path[-1]):
            if nb not in seen:
                seen.add(nb)
                path.append(nb)
                go()
                path.pop()
                seen.discard(nb)

    go()
    return tuple(out)


def naive_violations(side, path, viable_only=False):
    """Violation count of a complete path, straight from the definition."""
    seen = {path[0]}
    k = 0
    for i in range(1, len(path)):
        cur = path[i - 1]
        cands = [c for c in naive_neighbours(side, *cur) if c not in seen]
        degs = {c: sum(1 for t in naive_neighbours(side, *c) if t not in seen and t != c)
                for c in cands}
        last = i == len(path) - 1
        pool = [d for d in degs.values() if not viable_only or last or d >= 1]
        if degs[path[i]] > min(pool):
            k += 1
        seen.add(path[i])
    return k


def make_batch(weights, *, samples=None, closed=(), violations=None, cls=None,
               replication=0, side=5, alpha=1.0, n_k=None):
    """BatchResult from an explicit list of completed-walk weights.

    ``samples`` may exceed ``len(weights)``: the rest are failed walks.
    """
    samples = len(weights) if samples is None else samples
    cls = cls or StartClass((0, 0), 1, 0)
    violations = violations or [0] * len(weights)
    n_k = n_k or side * side - 1
    by_k = [0.0] * n_k
    by_k2 = [0.0] * n_k
    for w, k in zip(weights, violations):
        by_k[k] += w
        by_k2[k] += w * w
    cw = [w for i, w in enumerate(weights) if i in set(closed)]
    return BatchResult(
        cls, replication, samples, sum(1 for w in weights if w > 0),
        math.fsum(weights), math.fsum(w * w for w in weights), len(cw),
        math.fsum(cw), math.fsum(w * w for w in cw), by_k, by_k2,
        seed_used=0, board_side=side, alpha=alpha,
    )


needs_compiled = pytest.mark.skipif(
    "cython" not in _backend.BACKENDS, reason="compiled kernels not built"
)
