"""Rewriting basic guillotine cuts into piece-outlining cuts.

A cut position is replaceable when it matches exactly the length (width,
for vertical cuts) of a fitting piece and cannot be reached by combining
two or more piece sizes within their demands.  Conservative mode replaces
a cut only when a single piece matches; aggressive mode emits one
piece-outlining cut per matching piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .enumeration import MAX_VARIABLES, PlateGraph, _enumerate, replaceable_pieces
from .instance import Instance, PieceType

MODES = ("none", "conservative", "aggressive")


@dataclass(frozen=True)
class HybridisationConfig:
    mode: str = "none"
    binding: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.binding and self.mode == "none":
            raise ValueError("binding requires a hybridisation mode")


def replaceable(
    plate: tuple[int, int],
    orientation: str,
    q: int,
    pieces: Sequence[PieceType],
) -> frozenset[int]:
    """Ids of fitting pieces whose matching dimension equals q, if replaceable."""
    return frozenset(replaceable_pieces(plate, orientation, q, pieces))


def hybridise_graph(
    g: PlateGraph,
    cfg: HybridisationConfig,
    pieces: Sequence[PieceType],
    *,
    max_variables: int | None = None,
) -> PlateGraph:
    """Re-enumerate the graph with replaceable cuts emitted as piece-outlining cuts.

    Piece-sized plates produced by the new cuts leave the plate set; residual
    plates (and anything reachable only through them) are enumerated fresh, so
    the plate set may gain residuals and lose plates that were only reachable
    through replaced cuts.
    """
    if cfg.mode == "none":
        raise ValueError("hybridise_graph needs mode conservative or aggressive")
    if g.hybrid != "none":
        raise ValueError("graph is already hybridised")
    original = g.original
    inst = Instance(
        plate_length=original.length,
        plate_width=original.width,
        pieces=tuple(pieces),
        rotation_allowed=False,
    )
    return _enumerate(
        inst,
        g.formulation,
        cfg.mode,
        MAX_VARIABLES if max_variables is None else max_variables,
    )
