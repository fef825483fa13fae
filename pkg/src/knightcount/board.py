"""Board geometry: squares, knight moves and the dihedral symmetry group."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

KNIGHT_OFFSETS = ((-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1))


class Square(NamedTuple):
    file: int
    rank: int

    def __str__(self) -> str:
        return f"{self.file},{self.rank}"

    @classmethod
    def parse(cls, text: str) -> Square:
        """Parse ``"f,r"``."""
        parts = text.replace(" ", "").split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'file,rank', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))


@dataclass(frozen=True)
class Board:
    side: int

    def __post_init__(self) -> None:
        if not isinstance(self.side, int) or self.side < 3:
            raise ValueError(f"board side must be an integer >= 3, got {self.side!r}")

    @property
    def n_squares(self) -> int:
        return self.side * self.side

    def contains(self, s: Square) -> bool:
        return 0 <= s.file < self.side and 0 <= s.rank < self.side

    def check(self, s: Square) -> Square:
        s = Square(*s)
        if not self.contains(s):
            raise ValueError(f"square {tuple(s)} is off the {self.side}x{self.side} board")
        return s

    def index(self, s: Square) -> int:
        return s[0] * self.side + s[1]

    def square(self, index: int) -> Square:
        return Square(*divmod(index, self.side))

    def squares(self) -> list[Square]:
        return [self.square(i) for i in range(self.n_squares)]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Knight neighbours of every square index, ascending."""
        return tuple(
            tuple(self.index(t) for t in knight_moves(self, s)) for s in self.squares()
        )


def knight_moves(board: Board, s: Square) -> list[Square]:
    """On-board knight targets of ``s``, sorted by (file, rank)."""
    f, r = board.check(s)
    out = [Square(f + df, r + dr) for df, dr in KNIGHT_OFFSETS]
    return sorted(t for t in out if board.contains(t))


@dataclass(frozen=True)
class SymmetryTransform:
    """Element of the dihedral group acting on centred coordinates.

    ``matrix`` is a signed 2x2 permutation matrix ``((a, b), (c, d))``; with
    ``x = 2 * file - (side - 1)`` and ``y = 2 * rank - (side - 1)`` the image is
    ``(a x + b y, c x + d y)``.
    """

    name: str
    matrix: tuple[tuple[int, int], tuple[int, int]]

    def __matmul__(self, other: SymmetryTransform) -> SymmetryTransform:
        """``self @ other`` applies ``other`` first."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        m = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return _BY_MATRIX[m]

    @property
    def inverse(self) -> SymmetryTransform:
        (a, b), (c, d) = self.matrix
        return _BY_MATRIX[((a, c), (b, d))]


TRANSFORMS = (
    SymmetryTransform("identity", ((1, 0), (0, 1))),
    SymmetryTransform("rot90", ((0, 1), (-1, 0))),
    SymmetryTransform("rot180", ((-1, 0), (0, -1))),
    SymmetryTransform("rot270", ((0, -1), (1, 0))),
    SymmetryTransform("flip_files", ((-1, 0), (0, 1))),
    SymmetryTransform("flip_ranks", ((1, 0), (0, -1))),
    SymmetryTransform("diagonal", ((0, 1), (1, 0))),
    SymmetryTransform("antidiagonal", ((0, -1), (-1, 0))),
)
_BY_MATRIX = {t.matrix: t for t in TRANSFORMS}
TRANSFORM_BY_NAME = {t.name: t for t in TRANSFORMS}
IDENTITY = TRANSFORMS[0]


def apply_transform(board: Board, t: SymmetryTransform, s: Square) -> Square:
    f, r = board.check(s)
    c = board.side - 1
    x, y = 2 * f - c, 2 * r - c
    (a, b), (cc, d) = t.matrix
    return Square((a * x + b * y + c) // 2, (cc * x + d * y + c) // 2)


def orbit(board: Board, s: Square) -> frozenset[Square]:
    return frozenset(apply_transform(board, t, s) for t in TRANSFORMS)


@dataclass(frozen=True)
class StartClass:
    representative: Square
    multiplicity: int
    index: int = 0


def start_classes(board: Board) -> list[StartClass]:
    """One class per symmetry orbit, represented by its smallest square."""
    seen: set[Square] = set()
    reps = []
    for s in board.squares():
        if s in seen:
            continue
        orb = orbit(board, s)
        seen |= orb
        reps.append((min(orb), len(orb)))
    return [StartClass(rep, mult, i) for i, (rep, mult) in enumerate(sorted(reps))]


def single_start(board: Board, s: Square) -> list[StartClass]:
    """A lone start square counted once (for per-square estimates)."""
    return [StartClass(board.check(s), 1, 0)]
