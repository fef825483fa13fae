"""Exact tour counts by backtracking, for small boards.

Counts are directed: a *numbering* is a Hamiltonian knight path with a
marked first square.  Closed diagrams are obtained from closed numberings
starting at the corner: each cycle passes through every square and can be
walked in two directions, so ``diagrams = numberings_from_corner / 2``.

Board-size note: some literature quotes the 6x6 closed-diagram count as
98626; the exact count produced here is 9862.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor

from . import _backend
from .board import Board, Square, knight_moves, start_classes

DEFAULT_EXACT_LIMIT = 6
HISTOGRAM_LIMIT = 5


class ExactLimitError(RuntimeError):
    """Exact enumeration infeasible for this board size."""


class TourKind(enum.Enum):
    OPEN_NUMBERING = "open-numberings"
    CLOSED_NUMBERING = "closed-numberings"
    CLOSED_DIAGRAM = "closed-diagrams"


def _guard(board: Board, limit: int) -> None:
    if board.side > limit:
        raise ExactLimitError(
            f"exact enumeration infeasible: side {board.side} exceeds limit {limit}"
        )
    if board.n_squares > 64:
        raise ExactLimitError("exact kernel supports at most 64 squares")


def _count(board, start, closed, track=False, viable_only=False, threads=1, backend=None):
    """Run the path counter, optionally split over first moves."""
    k = _backend.get(backend)
    s = board.index(start)
    if threads <= 1:
        return k.count_paths(board.side, s, closed, track, viable_only)
    firsts = [board.index(t) for t in knight_moves(board, start)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda f: k.count_paths(board.side, s, closed, track, viable_only, f), firsts
        ))
    total = sum(c for c, _ in parts)
    hist: dict[int, int] = {}
    for _, h in parts:
        for key, v in h.items():
            hist[key] = hist.get(key, 0) + v
    return total, dict(sorted(hist.items()))


def count_open_numberings_from(board: Board, start: Square, *, limit=DEFAULT_EXACT_LIMIT,
                               threads=1, backend=None) -> int:
    """Number of directed open tours that begin on ``start``."""
    start = board.check(start)
    _guard(board, limit)
    return _count(board, start, False, threads=threads, backend=backend)[0]


def count_open_numberings(board: Board, *, limit=DEFAULT_EXACT_LIMIT, threads=1,
                          backend=None) -> int:
    """N_n: directed open tours over all start squares.

    Uses one representative per symmetry class weighted by orbit size.
    """
    _guard(board, limit)
    return sum(
        c.multiplicity * count_open_numberings_from(
            board, c.representative, limit=limit, threads=threads, backend=backend
        )
        for c in start_classes(board)
    )


def count_closed_numberings_from(board: Board, start: Square, *, limit=DEFAULT_EXACT_LIMIT,
                                 threads=1, backend=None) -> int:
    """Directed open tours from ``start`` whose last square attacks ``start``."""
    start = board.check(start)
    _guard(board, limit)
    return _count(board, start, True, threads=threads, backend=backend)[0]


def count_closed_diagrams(board: Board, *, limit=DEFAULT_EXACT_LIMIT, threads=1,
                          backend=None) -> int:
    """D_n: undirected Hamiltonian knight cycles."""
    _guard(board, limit)
    if board.n_squares % 2:
        return 0  # knight graph is bipartite
    directed = count_closed_numberings_from(
        board, Square(0, 0), limit=limit, threads=threads, backend=backend
    )
    return directed // 2


def exact_violation_histogram(board: Board, *, viable_only=False, limit=HISTOGRAM_LIMIT,
                              threads=1, backend=None) -> dict[int, int]:
    """Open numberings keyed by how many steps break the fewest-continuations rule.

    A step is a violation when the chosen square has more onward free squares
    than the minimum over all legal candidates (over candidates that still
    have a continuation when ``viable_only``).
    """
    _guard(board, limit)
    hist: dict[int, int] = {}
    for c in start_classes(board):
        _, h = _count(board, c.representative, False, True, viable_only, threads, backend)
        for k, v in h.items():
            hist[k] = hist.get(k, 0) + c.multiplicity * v
    return dict(sorted(hist.items()))


def exact_count(board: Board, kind: TourKind, start: Square | None = None, **kw) -> int:
    """Dispatch used by the command line."""
    if kind is TourKind.OPEN_NUMBERING:
        if start is None:
            return count_open_numberings(board, **kw)
        return count_open_numberings_from(board, start, **kw)
    if kind is TourKind.CLOSED_NUMBERING:
        return count_closed_numberings_from(board, start or Square(0, 0), **kw)
    if start is not None:
        # every cycle runs through every square, in two directions
        return count_closed_numberings_from(board, start, **kw) // 2
    return count_closed_diagrams(board, **kw)
