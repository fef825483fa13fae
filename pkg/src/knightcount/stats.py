"""Turn batch sums into tour-count estimates.

Within one replication the estimate is ``sum(multiplicity * mean_weight)``
over start classes.  The reported point is the mean over replications.
``std_error`` is the standard deviation of a *single* replication's
estimate: the sample standard deviation across replications, or, for a
one-replication run, the within-replication standard error.  ``sem`` is the
standard error of the pooled point, ``std_error / sqrt(replications)``, and
``within_sd`` the root-mean within-replication standard error (diagnostic).
"""

from __future__ import annotations

import enum
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .sampler import BatchResult

NUMBERINGS_PER_GEOMETRIC = 16  # 8 symmetries x 2 directions
NUMBERINGS_PER_DIAGRAM = 2


class ConfigurationError(ValueError):
    """Batches from incompatible experiments were combined."""


class QuantityKind(enum.Enum):
    OPEN_NUMBERINGS = "open-numberings"
    OPEN_DIAGRAMS = "open-diagrams"
    OPEN_GEOMETRIC = "open-geometric"
    CLOSED_DIAGRAMS = "closed-diagrams"
    VIOLATION_CLASS = "violation-class"


@dataclass(frozen=True)
class Estimate:
    kind: QuantityKind
    point: float
    std_error: float
    ci_low: float
    ci_high: float
    samples_total: int
    alpha: float
    board_side: int = 0
    replications: int = 1
    replicate_points: tuple[float, ...] = ()
    successes: int = 0
    between_sd: float = math.nan
    within_sd: float = math.nan
    violations: int | None = None

    @property
    def sem(self) -> float:
        return self.std_error / math.sqrt(self.replications)

    @property
    def min(self) -> float:
        return min(self.replicate_points, default=self.point)

    @property
    def max(self) -> float:
        return max(self.replicate_points, default=self.point)

    def scaled(self, divisor: float, kind: QuantityKind) -> Estimate:
        pts = tuple(p / divisor for p in self.replicate_points)
        return replace(
            self, kind=kind, point=self.point / divisor,
            std_error=self.std_error / divisor, ci_low=self.ci_low / divisor,
            ci_high=self.ci_high / divisor, replicate_points=pts,
            between_sd=self.between_sd / divisor, within_sd=self.within_sd / divisor,
        )


@dataclass(frozen=True)
class ViolationHistogramEstimate:
    per_k: dict[int, Estimate] = field(default_factory=dict)
    total: Estimate | None = None

    def mass_fraction(self, lo: int, hi: int) -> float:
        tot = sum(e.point for e in self.per_k.values())
        if tot == 0:
            return 0.0
        return sum(e.point for k, e in self.per_k.items() if lo <= k <= hi) / tot

    def argmax(self) -> int:
        return max(self.per_k, key=lambda k: self.per_k[k].point)


def confidence_interval(e: Estimate, z: float = 3.0) -> tuple[float, float]:
    if e.std_error < 0:
        raise ValueError("std_error must be non-negative")
    return e.point - z * e.std_error, e.point + z * e.std_error


def _check(batches: Sequence[BatchResult]) -> None:
    if not batches:
        raise ConfigurationError("no batches to estimate from")
    key = (batches[0].board_side, batches[0].alpha, batches[0].violation_min_over)
    for b in batches[1:]:
        if (b.board_side, b.alpha, b.violation_min_over) != key:
            raise ConfigurationError(
                "batches mix board sizes, alpha values or violation modes"
            )


def _mean_and_var(s: float, s2: float, n: int) -> tuple[float, float]:
    """Sample mean of the weights and the variance of that mean."""
    mean = s / n
    if n < 2:
        return mean, 0.0
    var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
    return mean, var / n


def _assemble(batches: Sequence[BatchResult], sums: Callable[[BatchResult], tuple[float, float]],
              kind: QuantityKind, divisor: float = 1.0, z: float = 3.0,
              successes: Callable[[BatchResult], int] = lambda b: b.successes) -> Estimate:
    _check(batches)
    by_rep: dict[int, list[BatchResult]] = defaultdict(list)
    for b in batches:
        by_rep[b.replication].append(b)
    points, variances = [], []
    for rep in sorted(by_rep):
        est = var = 0.0
        for b in sorted(by_rep[rep], key=lambda b: b.start_class.index):
            s, s2 = sums(b)
            mean, vmean = _mean_and_var(s, s2, b.samples)
            m = b.start_class.multiplicity
            est += m * mean
            var += m * m * vmean
        points.append(est / divisor)
        variances.append(var / (divisor * divisor))
    point = math.fsum(points) / len(points)
    within = math.sqrt(math.fsum(variances) / len(variances))
    between = statistics.stdev(points) if len(points) > 1 else math.nan
    std_error = within if len(points) == 1 else between
    return Estimate(
        kind=kind, point=point, std_error=std_error,
        ci_low=point - z * std_error, ci_high=point + z * std_error,
        samples_total=sum(b.samples for b in batches), alpha=batches[0].alpha,
        board_side=batches[0].board_side, replications=len(points),
        replicate_points=tuple(points), successes=sum(successes(b) for b in batches),
        between_sd=between, within_sd=within,
    )


def estimate_numberings(batches: Sequence[BatchResult], z: float = 3.0) -> Estimate:
    """Directed open tours over the sampled start squares."""
    return _assemble(batches, lambda b: (b.sum_weight, b.sum_weight_sq),
                     QuantityKind.OPEN_NUMBERINGS, z=z)


def _geometric_divisor(side: int, assume_trivial_stabilizer: bool) -> int:
    if side != 8 and not assume_trivial_stabilizer:
        raise ConfigurationError(
            "N/16 assumes no tour is fixed by a board symmetry or by reversal; "
            "only asserted for 8x8 (pass assume_trivial_stabilizer to override)"
        )
    return NUMBERINGS_PER_GEOMETRIC


def to_geometric(n_estimate: Estimate, *, assume_trivial_stabilizer: bool = False) -> Estimate:
    """Geometrically distinct open tours from an open-numbering estimate."""
    if n_estimate.kind is not QuantityKind.OPEN_NUMBERINGS:
        raise ConfigurationError("to_geometric expects an open-numberings estimate")
    div = _geometric_divisor(n_estimate.board_side, assume_trivial_stabilizer)
    return n_estimate.scaled(div, QuantityKind.OPEN_GEOMETRIC)


def to_diagrams(n_estimate: Estimate) -> Estimate:
    """Open tour diagrams: each is numbered from either end."""
    if n_estimate.kind is not QuantityKind.OPEN_NUMBERINGS:
        raise ConfigurationError("to_diagrams expects an open-numberings estimate")
    return n_estimate.scaled(NUMBERINGS_PER_DIAGRAM, QuantityKind.OPEN_DIAGRAMS)


def estimate_closed_diagrams(batches: Sequence[BatchResult], z: float = 3.0) -> Estimate:
    """Closed tour diagrams from the closed-ending walks.

    Dropping any one of a cycle's edges and picking a direction gives a
    numbering whose ends attack each other; a cycle on ``m`` squares yields
    ``2 m`` of them, so the divisor is twice the number of start squares
    covered by the batches.
    """
    _check(batches)
    classes = {b.start_class.index: b.start_class for b in batches}
    covered = sum(c.multiplicity for c in classes.values())
    return _assemble(
        batches, lambda b: (b.sum_weight_closed, b.sum_weight_sq_closed),
        QuantityKind.CLOSED_DIAGRAMS, divisor=2 * covered, z=z,
        successes=lambda b: b.closed_successes,
    )


def estimate_violation_histogram(batches: Sequence[BatchResult], z: float = 3.0, *,
                                 assume_trivial_stabilizer: bool = False
                                 ) -> ViolationHistogramEstimate:
    """Per-violation-count split of the open-tour estimate.

    Geometric units (divided by 16) on 8x8 or with ``assume_trivial_stabilizer``;
    numbering units otherwise.
    """
    _check(batches)
    side = batches[0].board_side
    geometric = side == 8 or assume_trivial_stabilizer
    div = NUMBERINGS_PER_GEOMETRIC if geometric else 1
    kind = QuantityKind.OPEN_GEOMETRIC if geometric else QuantityKind.OPEN_NUMBERINGS
    nk = len(batches[0].sum_weight_by_violations)
    per_k = {}
    for k in range(nk):
        e = _assemble(
            batches,
            lambda b, k=k: (b.sum_weight_by_violations[k], b.sum_weight_sq_by_violations[k]),
            QuantityKind.VIOLATION_CLASS, divisor=div, z=z, successes=lambda b: 0,
        )
        per_k[k] = replace(e, violations=k)
    total = estimate_numberings(batches, z=z).scaled(div, kind)
    return ViolationHistogramEstimate(per_k, total)


def estimate(batches: Sequence[BatchResult], kind: QuantityKind, z: float = 3.0, *,
             assume_trivial_stabilizer: bool = False) -> Estimate:
    if kind is QuantityKind.OPEN_NUMBERINGS:
        return estimate_numberings(batches, z)
    if kind is QuantityKind.OPEN_DIAGRAMS:
        return to_diagrams(estimate_numberings(batches, z))
    if kind is QuantityKind.OPEN_GEOMETRIC:
        return to_geometric(estimate_numberings(batches, z),
                            assume_trivial_stabilizer=assume_trivial_stabilizer)
    if kind is QuantityKind.CLOSED_DIAGRAMS:
        return estimate_closed_diagrams(batches, z)
    raise ConfigurationError(f"use estimate_violation_histogram for {kind.value}")
