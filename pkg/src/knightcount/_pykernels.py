"""Pure-Python fallback for ``_kernels``.

Same signatures and the same floating-point operation order, so a batch run
here is bit-identical to the compiled one (only much slower).
"""

from ._rng import Xoshiro256

_OFFSETS = ((-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1))
_VISITED = -16


def _adjacency(side):
    adj = []
    for f in range(side):
        for r in range(side):
            adj.append(tuple(
                (f + df) * side + (r + dr)
                for df, dr in _OFFSETS
                if 0 <= f + df < side and 0 <= r + dr < side
            ))
    return adj


def rng_stream(seed, n):
    rng = Xoshiro256(seed)
    return [rng.next_u64() for _ in range(n)]


def walk(adj, start, wtab, alpha_inf, viable_only, rng, path=None):
    """One randomized walk; returns (last_square or -1, weight, violations).

    ``wtab[d]`` is the unnormalised weight of a free square with ``d``
    continuations (``wtab[0] == 0``).  If ``path`` is a list, visited squares
    are appended to it.
    """
    nsq = len(adj)
    deg = [len(a) for a in adj]

    def visit(sq):
        deg[sq] = _VISITED
        for nb in adj[sq]:
            deg[nb] -= 1

    cur = start
    visit(cur)
    if path is not None:
        path.append(cur)
    weight = 1.0
    viol = 0
    for step in range(1, nsq):
        nbrs = adj[cur]
        cdeg = [deg[nb] for nb in nbrs]
        if step == nsq - 1:
            cw = [1.0 if d >= 0 else 0.0 for d in cdeg]
            min_all = min_viable = 0
        else:
            min_all = min((d for d in cdeg if d >= 0), default=99)
            min_viable = min((d for d in cdeg if d >= 1), default=99)
            if alpha_inf:
                cw = [1.0 if d == min_viable else 0.0 for d in cdeg]
            else:
                cw = [wtab[d] if d >= 0 else 0.0 for d in cdeg]
        total = 0.0
        cum = []
        for w in cw:
            total += w
            cum.append(total)

        u = rng.random()
        if total <= 0.0:
            return -1, 0.0, viol
        u = u * total
        pick = sum(1 for c in cum if c <= u)
        if pick >= len(cw):
            pick = len(cw) - 1
            while cw[pick] == 0.0:
                pick -= 1

        weight *= total / cw[pick]
        if cdeg[pick] > (min_viable if viable_only else min_all):
            viol += 1
        cur = nbrs[pick]
        visit(cur)
        if path is not None:
            path.append(cur)
    return cur, weight, viol


def weight_table(alpha):
    return [0.0] + [float(d) ** -alpha for d in range(1, 9)]


class _Kahan:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x):
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t


def sample_batch(side, start, alpha, alpha_inf, seed, n, viable_only):
    if side < 3 or side * side > 256:
        raise ValueError(f"side {side} outside kernel range 3..16")
    adj = _adjacency(side)
    wtab = weight_table(alpha)
    rng = Xoshiro256(seed)
    attacks_start = set(adj[start])
    nk = side * side - 1
    sums = [_Kahan() for _ in range(4)]
    by_k = [_Kahan() for _ in range(nk)]
    by_k2 = [_Kahan() for _ in range(nk)]
    succ = closed = 0
    for _ in range(n):
        last, w, viol = walk(adj, start, wtab, alpha_inf, viable_only, rng)
        if last < 0:
            continue
        succ += 1
        w2 = w * w
        sums[0].add(w)
        sums[1].add(w2)
        by_k[viol].add(w)
        by_k2[viol].add(w2)
        if last in attacks_start:
            closed += 1
            sums[2].add(w)
            sums[3].add(w2)
    return (succ, closed, sums[0].s, sums[1].s, sums[2].s, sums[3].s,
            [k.s for k in by_k], [k.s for k in by_k2])


def count_paths(side, start, closed, track, viable_only=False, first=-1):
    if side < 3 or side * side > 64:
        raise ValueError(f"side {side} outside exact kernel range 3..8")
    mask = [sum(1 << j for j in nbrs) for nbrs in _adjacency(side)]
    start_nbrs = mask[start]
    hist = {}
    count = 0

    def dead(head, free):
        if closed and not free & start_nbrs:
            return True
        hmask = mask[head]
        nfree = free.bit_count()
        ends = 0
        rest = free
        while rest:
            bit = rest & -rest
            rest ^= bit
            d = (mask[bit.bit_length() - 1] & free).bit_count()
            if d == 0:
                if nfree > 1 or not hmask & bit:
                    return True
            elif d == 1 and not hmask & bit:
                ends += 1
                if ends > 1 or (closed and not start_nbrs & bit):
                    return True
        return False

    def min_degree(head, free):
        m = 99
        many = free.bit_count() > 1
        rest = mask[head] & free
        while rest:
            bit = rest & -rest
            rest ^= bit
            d = (mask[bit.bit_length() - 1] & free).bit_count()
            if viable_only and d == 0 and many:
                continue
            m = min(m, d)
        return m

    def extend(head, free, viol):
        nonlocal count
        if not free:
            if closed and not start_nbrs >> head & 1:
                return
            count += 1
            if track:
                hist[viol] = hist.get(viol, 0) + 1
            return
        if dead(head, free):
            return
        m = min_degree(head, free) if track else 0
        rest = mask[head] & free
        while rest:
            bit = rest & -rest
            rest ^= bit
            j = bit.bit_length() - 1
            step_viol = 0
            if track and (mask[j] & free).bit_count() > m:
                step_viol = 1
            extend(j, free ^ bit, viol + step_viol)

    free = ((1 << side * side) - 1) ^ (1 << start)
    if first < 0:
        extend(start, free, 0)
    elif start_nbrs >> first & 1:
        bit = 1 << first
        step_viol = 0
        if track and (mask[first] & free).bit_count() > min_degree(start, free):
            step_viol = 1
        extend(first, free ^ bit, step_viol)
    return count, dict(sorted(hist.items()))
