"""Cut-position discretization: demand-bounded sums of piece sizes.

A position q is usable on a plate dimension iff q is a sum of piece sizes
where each size is used at most its demand.  The same reachability table
drives position enumeration and plate-dimension normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

HORIZONTAL = "h"  # positions measured along the length
VERTICAL = "v"  # positions measured along the width
ORIENTATIONS = (HORIZONTAL, VERTICAL)

Caps = Sequence[tuple[int, int]]  # (size, demand) pairs


@dataclass(frozen=True)
class PositionSet:
    """Sorted cut positions of one orientation on a plate."""

    orientation: str
    plate_length: int
    plate_width: int
    positions: tuple[int, ...]

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        dim = self.plate_length if self.orientation == HORIZONTAL else self.plate_width
        prev = 0
        for q in self.positions:
            # the full dimension is allowed: normalization needs it
            if not prev < q <= dim:
                raise ValueError(f"position {q} out of order or outside (0, {dim}]")
            prev = q


def reachable_sums(limit: int, caps: Caps) -> list[bool]:
    """Boolean table t -> t is a demand-bounded sum of sizes, 0 <= t <= limit."""
    reach = [False] * (limit + 1)
    reach[0] = True
    for size, demand in caps:
        if size <= 0 or demand <= 0:
            raise ValueError("caps need positive size and demand")
        if size > limit:
            continue
        used = [-1] * (limit + 1)
        for t in range(limit + 1):
            if reach[t]:
                used[t] = 0
            elif t >= size and used[t - size] >= 0 and used[t - size] < demand:
                used[t] = used[t - size] + 1
                reach[t] = True
    return reach


def max_piece_counts(limit: int, caps: Caps) -> list[int]:
    """Per sum t, the largest piece count over demand-bounded combinations (-1 if none)."""
    best = [-1] * (limit + 1)
    best[0] = 0
    for size, demand in caps:
        if size > limit:
            continue
        # descending read order: writes land above the read point, so each
        # sum sees only counts from previously processed pieces
        for t in range(limit, -1, -1):
            if best[t] < 0:
                continue
            pos = t
            for c in range(1, demand + 1):
                pos += size
                if pos > limit:
                    break
                if best[t] + c > best[pos]:
                    best[pos] = best[t] + c
    return best


def cut_positions(
    dim: int,
    caps: Caps,
    *,
    orientation: str = HORIZONTAL,
    plate: tuple[int, int] | None = None,
) -> PositionSet:
    """All demand-bounded sums q with 0 < q <= dim, ascending.

    The caller filters caps to pieces that fit the plate; ``plate`` only
    labels the result (defaults to a square of side ``dim``).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    reach = reachable_sums(dim, caps)
    length, width = plate if plate is not None else (dim, dim)
    return PositionSet(
        orientation=orientation,
        plate_length=length,
        plate_width=width,
        positions=tuple(q for q in range(1, dim + 1) if reach[q]),
    )


def normalize_dim(dim: int, caps: Caps) -> int:
    """Largest demand-bounded sum <= dim (0 when nothing fits)."""
    if dim < 0:
        raise ValueError("dim must be >= 0")
    reach = reachable_sums(dim, caps)
    for t in range(dim, -1, -1):
        if reach[t]:
            return t
    return 0


def restricted_positions(plate: tuple[int, int], pieces, orientation: str) -> PositionSet:
    """Distinct piece lengths (horizontal) or widths (vertical) among fitting pieces."""
    length, width = plate
    sizes = {
        p.length if orientation == HORIZONTAL else p.width
        for p in pieces
        if p.fits(length, width)
    }
    return PositionSet(
        orientation=orientation,
        plate_length=length,
        plate_width=width,
        positions=tuple(sorted(sizes)),
    )
