# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: randomized Warnsdorff batches and exact path counting.

Squares are integer indices ``file * side + rank``; neighbour lists are kept in
ascending index order, which is the (file, rank) order used by the Python
layer.  ``_pykernels`` mirrors every function here operation for operation.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.math cimport pow
from libc.string cimport memcpy, memset

cdef enum:
    MAXSQ = 256
    MAX_EXACT_SQ = 64

cdef struct Graph:
    int side
    int nsq
    int nadj[MAXSQ]
    int adj[MAXSQ][8]
    uint64_t mask[MAX_EXACT_SQ]

cdef struct Rng:
    uint64_t s[4]

cdef int[8] DF
cdef int[8] DR
DF[:] = [-2, -2, -1, -1, 1, 1, 2, 2]
DR[:] = [-1, 1, -2, 2, -2, 2, -1, 1]


cdef void build_graph(Graph* g, int side) noexcept nogil:
    cdef int f, r, k, f2, r2, sq, n
    g.side = side
    g.nsq = side * side
    for f in range(side):
        for r in range(side):
            sq = f * side + r
            n = 0
            # offsets are pre-sorted by (df, dr), so targets come out sorted
            for k in range(8):
                f2 = f + DF[k]
                r2 = r + DR[k]
                if 0 <= f2 < side and 0 <= r2 < side:
                    g.adj[sq][n] = f2 * side + r2
                    n += 1
            g.nadj[sq] = n
            if sq < MAX_EXACT_SQ:
                g.mask[sq] = 0
                for k in range(n):
                    g.mask[sq] |= (<uint64_t>1) << g.adj[sq][k]


# ---------------------------------------------------------------- rng

cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t splitmix_next(uint64_t* x) noexcept nogil:
    cdef uint64_t z
    x[0] += <uint64_t>0x9E3779B97F4A7C15
    z = x[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef void rng_seed(Rng* r, uint64_t seed) noexcept nogil:
    cdef uint64_t x = seed
    cdef int i
    for i in range(4):
        r.s[i] = splitmix_next(&x)


cdef inline uint64_t rng_next(Rng* r) noexcept nogil:
    cdef uint64_t result = rotl(r.s[1] * 5, 7) * 9
    cdef uint64_t t = r.s[1] << 17
    r.s[2] ^= r.s[0]
    r.s[3] ^= r.s[1]
    r.s[1] ^= r.s[2]
    r.s[0] ^= r.s[3]
    r.s[2] ^= t
    r.s[3] = rotl(r.s[3], 45)
    return result


cdef inline double rng_double(Rng* r) noexcept nogil:
    return (rng_next(r) >> 11) * (1.0 / 9007199254740992.0)


def rng_stream(uint64_t seed, int n):
    """First ``n`` raw outputs for ``seed`` (cross-checks the Python generator)."""
    cdef Rng r
    rng_seed(&r, seed)
    return [rng_next(&r) for _ in range(n)]


# ---------------------------------------------------------------- sampler

cdef inline void kahan_add(double* s, double* c, double x) noexcept nogil:
    cdef double y = x - c[0]
    cdef double t = s[0] + y
    c[0] = (t - s[0]) - y
    s[0] = t


cdef enum:
    VISITED = -16   # later neighbour visits push this down to at most -24
    WOFF = 32       # wtab index offset so visited squares map to weight 0


cdef inline void visit(Graph* g, int sq, int* deg) noexcept nogil:
    # visited squares get a large negative degree so one load answers both
    # "is it free" and "how many continuations"
    cdef int k
    deg[sq] = VISITED
    for k in range(g.nadj[sq]):
        deg[g.adj[sq][k]] -= 1


cdef int sample_one(Graph* g, int start, double* wtab, bint alpha_inf,
                    bint viable_only, Rng* rng, int* deg,
                    double* out_w, int* out_viol) noexcept nogil:
    """One randomized walk; returns the final square, or -1 on a dead end.

    ``wtab`` is indexed by ``degree + WOFF``: visited squares and mid-walk
    dead ends weigh 0.  Zero-weight entries leave the running sums unchanged,
    so scanning every neighbour gives the same floating-point results as
    scanning only the free ones.
    """
    cdef double cum[8]
    cdef double cw[8]
    cdef int cdeg[8]
    cdef int cur = start, step, k, n, d, i, pick, dm
    cdef int min_all, min_viable, thr
    cdef int last_step = g.nsq - 1
    cdef double total, u, w, weight = 1.0
    cdef int viol = 0
    cdef int* nbrs

    memcpy(deg, g.nadj, g.nsq * sizeof(int))
    visit(g, cur, deg)

    for step in range(1, g.nsq):
        n = g.nadj[cur]
        nbrs = g.adj[cur]
        min_all = 99
        min_viable = 99
        total = 0.0
        if step == last_step:
            # one free square left; it needs no continuation
            for k in range(n):
                d = deg[nbrs[k]]
                cdeg[k] = d
                cw[k] = 1.0 if d >= 0 else 0.0
                total += cw[k]
                cum[k] = total
            min_all = 0
            min_viable = 0
        else:
            for k in range(n):
                d = deg[nbrs[k]]
                cdeg[k] = d
                dm = d if d >= 0 else 99
                min_all = dm if dm < min_all else min_all
                dm = d if d >= 1 else 99
                min_viable = dm if dm < min_viable else min_viable
                cw[k] = wtab[d + WOFF]
                total += cw[k]
                cum[k] = total
            if alpha_inf:
                total = 0.0
                for k in range(n):
                    cw[k] = 1.0 if cdeg[k] == min_viable else 0.0
                    total += cw[k]
                    cum[k] = total

        u = rng_double(rng)
        if total <= 0.0:
            return -1
        u = u * total
        pick = 0
        for k in range(n):
            pick += cum[k] <= u
        if pick >= n:
            # u rounded up to total: take the last positive-weight square
            pick = n - 1
            while cw[pick] == 0.0:
                pick -= 1

        weight *= total / cw[pick]
        thr = min_viable if viable_only else min_all
        viol += cdeg[pick] > thr
        cur = nbrs[pick]
        visit(g, cur, deg)

    out_w[0] = weight
    out_viol[0] = viol
    return cur


def sample_batch(int side, int start, double alpha, bint alpha_inf,
                 uint64_t seed, int64_t n, bint viable_only):
    """Run ``n`` walks from ``start`` and return accumulated sums.

    Returns ``(successes, closed_successes, sum_w, sum_w_sq, sum_wc,
    sum_wc_sq, by_k, by_k_sq)``; ``by_k`` lists have ``side**2 - 1`` entries.
    """
    if side < 3 or side * side > MAXSQ:
        raise ValueError(f"side {side} outside kernel range 3..16")
    cdef Graph g
    cdef Rng rng
    cdef int deg[MAXSQ]
    cdef char attacks_start[MAXSQ]
    cdef double wtab[WOFF + 9]
    cdef double s[4]
    cdef double c[4]
    cdef double by_k[MAXSQ]
    cdef double by_kc[MAXSQ]
    cdef double by_k2[MAXSQ]
    cdef double by_k2c[MAXSQ]
    cdef int64_t it, succ = 0, closed = 0
    cdef int last, viol, k, d
    cdef double w, w2

    build_graph(&g, side)
    rng_seed(&rng, seed)
    for d in range(WOFF + 1):
        wtab[d] = 0.0
    for d in range(1, 9):
        wtab[WOFF + d] = pow(<double>d, -alpha)
    memset(attacks_start, 0, g.nsq)
    for k in range(g.nadj[start]):
        attacks_start[g.adj[start][k]] = 1
    for k in range(4):
        s[k] = 0.0
        c[k] = 0.0
    for k in range(g.nsq):
        by_k[k] = 0.0
        by_kc[k] = 0.0
        by_k2[k] = 0.0
        by_k2c[k] = 0.0

    with nogil:
        for it in range(n):
            last = sample_one(&g, start, wtab, alpha_inf, viable_only, &rng,
                              deg, &w, &viol)
            if last < 0:
                continue
            succ += 1
            w2 = w * w
            kahan_add(&s[0], &c[0], w)
            kahan_add(&s[1], &c[1], w2)
            kahan_add(&by_k[viol], &by_kc[viol], w)
            kahan_add(&by_k2[viol], &by_k2c[viol], w2)
            if attacks_start[last]:
                closed += 1
                kahan_add(&s[2], &c[2], w)
                kahan_add(&s[3], &c[3], w2)

    return (succ, closed, s[0], s[1], s[2], s[3],
            [by_k[k] for k in range(g.nsq - 1)],
            [by_k2[k] for k in range(g.nsq - 1)])


# ---------------------------------------------------------------- exact

cdef struct Search:
    Graph* g
    uint64_t start_nbrs
    bint closed
    bint track
    bint viable_only
    int64_t count
    int64_t* hist


cdef inline int popcount(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef bint dead(Search* st, int head, uint64_t free) noexcept nogil:
    """Degree pruning; never rejects a state that still has a completion."""
    cdef Graph* g = st.g
    cdef uint64_t rest = free, hmask = g.mask[head], bit
    cdef int u, d, ends = 0
    cdef int nfree = popcount(free)
    if st.closed and (free & st.start_nbrs) == 0:
        return True
    while rest:
        u = __builtin_ctzll(rest)
        bit = (<uint64_t>1) << u
        rest ^= bit
        d = popcount(g.mask[u] & free)
        if d == 0:
            if nfree > 1 or not (hmask & bit):
                return True
        elif d == 1 and not (hmask & bit):
            # entered through its only free neighbour, so the path ends here
            ends += 1
            if ends > 1:
                return True
            if st.closed and not (st.start_nbrs & bit):
                return True
    return False


cdef void extend(Search* st, int head, uint64_t free, int viol) noexcept nogil:
    cdef Graph* g = st.g
    cdef uint64_t rest, bit
    cdef int j, d, m = 99
    if free == 0:
        if st.closed and not (st.start_nbrs & ((<uint64_t>1) << head)):
            return
        st.count += 1
        if st.track:
            st.hist[viol] += 1
        return
    if dead(st, head, free):
        return
    rest = g.mask[head] & free
    if st.track:
        while rest:
            j = __builtin_ctzll(rest)
            rest &= rest - 1
            d = popcount(g.mask[j] & free)
            if st.viable_only and d == 0 and popcount(free) > 1:
                continue
            if d < m:
                m = d
        rest = g.mask[head] & free
    while rest:
        j = __builtin_ctzll(rest)
        bit = (<uint64_t>1) << j
        rest ^= bit
        if st.track:
            d = popcount(g.mask[j] & free)
            extend(st, j, free ^ bit, viol + (1 if d > m else 0))
        else:
            extend(st, j, free ^ bit, 0)


def count_paths(int side, int start, bint closed, bint track, bint viable_only=False,
                int first=-1):
    """Count directed Hamiltonian knight paths from ``start``.

    ``closed`` keeps only paths whose last square attacks ``start``.  With
    ``track`` a violation histogram (index = violation count) is returned
    too.  ``first`` restricts the search to one first move (for splitting
    work across threads).
    """
    if side < 3 or side * side > MAX_EXACT_SQ:
        raise ValueError(f"side {side} outside exact kernel range 3..8")
    cdef Graph g
    cdef Search st
    cdef int64_t hist[MAX_EXACT_SQ]
    cdef uint64_t full, free, bit, rest
    cdef int j, m, d
    build_graph(&g, side)
    memset(hist, 0, sizeof(hist))
    st.g = &g
    st.start_nbrs = g.mask[start]
    st.closed = closed
    st.track = track
    st.viable_only = viable_only
    st.count = 0
    st.hist = hist
    full = ((<uint64_t>1) << (g.nsq - 1) << 1) - 1 if g.nsq == 64 else ((<uint64_t>1) << g.nsq) - 1
    free = full ^ ((<uint64_t>1) << start)
    with nogil:
        if first < 0:
            extend(&st, start, free, 0)
        elif g.mask[start] & ((<uint64_t>1) << first):
            bit = (<uint64_t>1) << first
            m = 99
            if track:
                # violation status of the forced first move
                rest = g.mask[start] & free
                while rest:
                    j = __builtin_ctzll(rest)
                    rest &= rest - 1
                    d = popcount(g.mask[j] & free)
                    if viable_only and d == 0 and popcount(free) > 1:
                        continue
                    if d < m:
                        m = d
                d = popcount(g.mask[first] & free)
                extend(&st, first, free ^ bit, 1 if d > m else 0)
            else:
                extend(&st, first, free ^ bit, 0)
    histogram = {k: hist[k] for k in range(g.nsq) if hist[k]}
    return st.count, histogram
