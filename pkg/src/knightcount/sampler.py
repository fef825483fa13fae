"""Randomized Warnsdorff sampling of knight paths.

Each walk moves from the current square to a free neighbour ``j`` with
probability proportional to ``N_j ** -alpha``, where ``N_j`` is the number of
free squares reachable from ``j``.  A completed walk is weighted by the
product of its inverse step probabilities, which makes the weight an unbiased
estimate of the number of tours from the start square.  ``alpha = 0`` is a
uniform random walk; ``alpha = inf`` only ever picks minimal-degree squares.

Candidates that still need a continuation but have none (``N_j == 0`` before
the last step) get probability zero: no complete tour passes through such a
step, so the estimate stays unbiased.  On the last step the single remaining
square is taken with probability one.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import _backend
from ._pykernels import walk, weight_table
from ._rng import Xoshiro256, derive_seed
from .board import Board, Square, StartClass, knight_moves, single_start, start_classes

VIOLATION_MODES = ("all", "viable")


def parse_alpha(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    alpha = float(value)
    if math.isnan(alpha) or alpha == -math.inf:
        raise ValueError(f"alpha must be a finite real or 'inf', got {value!r}")
    return alpha


@dataclass(frozen=True)
class SamplerConfig:
    """Everything that determines a sampling experiment.

    ``samples_per_replication`` walks are drawn from every start class in
    every replication.
    """

    board_side: int
    alpha: float
    samples_per_replication: int
    replications: int = 1
    base_seed: int = 0
    start: Square | None = None  # None: all symmetry classes
    violation_min_over: str = "all"

    def __post_init__(self):
        Board(self.board_side)
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))
        if self.samples_per_replication < 1:
            raise ValueError("samples_per_replication must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in 64 unsigned bits")
        if self.violation_min_over not in VIOLATION_MODES:
            raise ValueError(f"violation_min_over must be one of {VIOLATION_MODES}")
        if self.start is not None:
            object.__setattr__(self, "start", self.board.check(self.start))

    @property
    def board(self) -> Board:
        return Board(self.board_side)

    def classes(self) -> list[StartClass]:
        if self.start is None:
            return start_classes(self.board)
        return single_start(self.board, self.start)


@dataclass
class PathState:
    board: Board
    path: list[Square]

    @property
    def current(self) -> Square:
        return self.path[-1]

    @property
    def step(self) -> int:
        return len(self.path)

    @property
    def visited(self) -> set[Square]:
        return set(self.path)


@dataclass(frozen=True)
class Candidate:
    square: Square
    free_degree: int
    probability: float


@dataclass(frozen=True)
class StepDistribution:
    candidates: tuple[Candidate, ...]

    @property
    def dead_end(self) -> bool:
        return not any(c.probability > 0 for c in self.candidates)


@dataclass(frozen=True)
class TourSample:
    completed: bool
    weight: float
    violations: int
    closes: bool
    start: Square
    path: tuple[Square, ...] = ()


@dataclass
class BatchResult:
    """Accumulated sums of one (start class, replication) batch."""

    start_class: StartClass
    replication: int
    samples: int
    successes: int
    sum_weight: float
    sum_weight_sq: float
    closed_successes: int
    sum_weight_closed: float
    sum_weight_sq_closed: float
    sum_weight_by_violations: list[float]
    sum_weight_sq_by_violations: list[float]
    seed_used: int
    board_side: int
    alpha: float
    violation_min_over: str = "all"
    cpu_seconds: float = field(default=0.0, compare=False)

    def scaled(self, c: float) -> BatchResult:
        """Copy with every weight multiplied by ``c``."""
        c2 = c * c
        return BatchResult(
            self.start_class, self.replication, self.samples, self.successes,
            self.sum_weight * c, self.sum_weight_sq * c2, self.closed_successes,
            self.sum_weight_closed * c, self.sum_weight_sq_closed * c2,
            [w * c for w in self.sum_weight_by_violations],
            [w * c2 for w in self.sum_weight_sq_by_violations],
            self.seed_used, self.board_side, self.alpha, self.violation_min_over,
        )


def merge_batches(parts: Sequence[BatchResult]) -> BatchResult:
    """Pool batches of the same start class into one (sums added in order)."""
    first = parts[0]
    for p in parts[1:]:
        if (p.start_class, p.board_side, p.alpha, p.violation_min_over) != (
            first.start_class, first.board_side, first.alpha, first.violation_min_over
        ):
            raise ValueError("can only merge batches of one start class and configuration")

    def total(attr):
        return sum(getattr(p, attr) for p in parts)

    nk = len(first.sum_weight_by_violations)
    return BatchResult(
        first.start_class, first.replication, total("samples"), total("successes"),
        total("sum_weight"), total("sum_weight_sq"), total("closed_successes"),
        total("sum_weight_closed"), total("sum_weight_sq_closed"),
        [sum(p.sum_weight_by_violations[k] for p in parts) for k in range(nk)],
        [sum(p.sum_weight_sq_by_violations[k] for p in parts) for k in range(nk)],
        first.seed_used, first.board_side, first.alpha, first.violation_min_over,
        total("cpu_seconds"),
    )


def free_degree(board: Board, visited, j: Square) -> int:
    """Free squares a knight on ``j`` could move to next."""
    j = board.check(j)
    if j in visited:
        raise ValueError(f"{tuple(j)} is already visited")
    return sum(1 for t in knight_moves(board, j) if t not in visited)


def step_distribution(board: Board, state: PathState, alpha: float) -> StepDistribution:
    """Move probabilities from the head of ``state``."""
    alpha = parse_alpha(alpha)
    if state.step >= board.n_squares:
        raise ValueError("path already covers the board")
    visited = state.visited
    final = state.step == board.n_squares - 1
    cands = [(t, free_degree(board, visited, t))
             for t in knight_moves(board, state.current) if t not in visited]
    viable = [d for _, d in cands if final or d >= 1]
    if final:
        weights = [1.0 for _ in cands]
    elif math.isinf(alpha):
        lo = min(viable, default=None)
        weights = [1.0 if d >= 1 and d == lo else 0.0 for _, d in cands]
    else:
        weights = [float(d) ** -alpha if d >= 1 else 0.0 for _, d in cands]
    total = sum(weights)
    if total <= 0.0:
        return StepDistribution(tuple(Candidate(t, d, 0.0) for t, d in cands))
    return StepDistribution(tuple(
        Candidate(t, d, w / total) for (t, d), w in zip(cands, weights)
    ))


def sample_tour(board: Board, start: Square, alpha, rng, *,
                violation_min_over: str = "all") -> TourSample:
    """Draw one walk from ``start``.

    ``rng`` is an integer seed or a :class:`Xoshiro256`; the draw consumes one
    uniform per step, exactly as the batch kernels do.
    """
    start = board.check(start)
    alpha = parse_alpha(alpha)
    if not isinstance(rng, Xoshiro256):
        rng = Xoshiro256(int(rng))
    alpha_inf = math.isinf(alpha)
    wtab = weight_table(0.0 if alpha_inf else alpha)
    path: list[int] = []
    last, weight, viol = walk(
        board.adjacency, board.index(start), wtab, alpha_inf,
        violation_min_over == "viable", rng, path,
    )
    squares = tuple(board.square(i) for i in path)
    if last < 0:
        return TourSample(False, 0.0, viol, False, start, squares)
    closes = board.square(last) in knight_moves(board, start)
    return TourSample(True, weight, viol, closes, start, squares)


def run_batch(config: SamplerConfig, cls: StartClass, replication_index: int,
              *, backend=None) -> BatchResult:
    """Sample ``config.samples_per_replication`` walks from one start class."""
    board = config.board
    seed = derive_seed(config.base_seed, cls.index, replication_index)
    alpha_inf = math.isinf(config.alpha)
    t0 = time.thread_time()
    out = _backend.get(backend).sample_batch(
        board.side, board.index(cls.representative),
        0.0 if alpha_inf else config.alpha, alpha_inf, seed,
        config.samples_per_replication, config.violation_min_over == "viable",
    )
    succ, closed, sw, sw2, swc, swc2, by_k, by_k2 = out
    return BatchResult(
        cls, replication_index, config.samples_per_replication, succ, sw, sw2,
        closed, swc, swc2, list(by_k), list(by_k2), seed, board.side,
        config.alpha, config.violation_min_over, time.thread_time() - t0,
    )


def run_experiment(config: SamplerConfig, *, threads: int = 1, backend=None,
                   progress=None) -> list[BatchResult]:
    """All (class, replication) batches, in (replication, class) order.

    The order of the returned list does not depend on ``threads``.
    """
    jobs = [(c, r) for r in range(config.replications) for c in config.classes()]

    def one(job):
        res = run_batch(config, job[0], job[1], backend=backend)
        if progress is not None:
            progress(res)
        return res

    if threads <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, jobs))
