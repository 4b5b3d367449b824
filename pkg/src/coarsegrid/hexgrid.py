"""Shared structures for hexagonal half-grid subdivisions.

Half-grid vertex (c, h) is column c, level h.  In the hexagonal half-grid
the rung joining columns c and c+1 at half-grid level h sits at hexagonal
row 2h + (c mod 2); contracting hexagonal rows 2h and 2h+1 of every column
recovers the half-grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError


@dataclass(frozen=True)
class FatnessSchedule:
    """Nondecreasing fatness requirements K_0 <= K_1 <= ..."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(v < 0 for v in vals):
            raise PreconditionError("fatness schedule entries must be nonnegative")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise PreconditionError(f"fatness schedule must be nondecreasing, got {list(vals)}")

    @classmethod
    def constant(cls, K: int, length: int) -> "FatnessSchedule":
        return cls((K,) * length)

    @classmethod
    def graded(cls, length: int, cap: int | None = None) -> "FatnessSchedule":
        """K_i = max(1, min(i, cap))."""
        return cls(tuple(max(1, i if cap is None else min(i, cap)) for i in range(length)))

    def __getitem__(self, i: int) -> int:
        # requirements beyond the listed prefix stay at the last value
        if not self.values:
            raise PreconditionError("empty fatness schedule")
        return self.values[min(i, len(self.values) - 1)]

    def __len__(self):
        return len(self.values)

    def to_json(self) -> list[int]:
        return list(self.values)


def fig1_order(rows: int, cols: int) -> list[tuple[int, int]]:
    """Rungs (c, h) of a rows x cols half-grid portion in diagonal sweep order.

    Round k lists the rungs with c + 2h in {2k-1, 2k}, right to left.
    """
    out: list[tuple[int, int]] = []
    total = rows * max(0, cols - 1)
    k = 0
    while len(out) < total:
        for c in range(2 * k, -1, -1):
            h = (2 * k - c) // 2
            if c < cols - 1 and h < rows:
                out.append((c, h))
        k += 1
    return out


def hex_row(c: int, h: int) -> int:
    """Hexagonal row of the rung joining columns c and c+1 at level h."""
    return 2 * h + (c % 2)


@dataclass
class HexSubdivision:
    """Vertical rays plus one horizontal path per rung of a half-grid portion.

    ``horizontals[(c, h)]`` runs from ``columns[c][attach[(c, h)][0]]`` to
    ``columns[c + 1][attach[(c, h)][1]]`` with every other vertex off the
    columns.
    """

    rows: int
    cols: int
    columns: tuple[tuple, ...]
    family_indices: tuple[int, ...]
    horizontals: dict = field(default_factory=dict)
    attach: dict = field(default_factory=dict)
    order: tuple = ()
    connectors: dict = field(default_factory=dict)

    def column_attachments(self, c: int, h: int) -> list[int]:
        """Indices on column c where the level-h rungs on either side attach."""
        out = []
        if c > 0 and (c - 1, h) in self.attach:
            out.append(self.attach[(c - 1, h)][1])
        if (c, h) in self.attach:
            out.append(self.attach[(c, h)][0])
        return out
