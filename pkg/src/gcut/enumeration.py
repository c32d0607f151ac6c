"""Plate/cut/extraction graph enumeration for the flow-style MILP models.

Breadth-first expansion from the original plate.  Every plate spawns
single guillotine cuts at discretized positions; in ``bba`` mode positions
stop at the midplate, children are dimension-normalized, and direct piece
extractions replace cuts on plates too small for two pieces.  In ``fmt``
mode positions span the whole dimension, children keep their raw sizes and
piece-sized plates sell directly.

When a hybridisation mode is active, replaceable single cuts are emitted as
piece-outlining cuts instead: the piece-sized plate leaves the graph (it can
never be cut again) and only the residual plates remain as children.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .discretize import (
    HORIZONTAL,
    ORIENTATIONS,
    VERTICAL,
    max_piece_counts,
    normalize_dim,
    reachable_sums,
)
from .instance import Instance, PieceType

BGC = "BGC"  # basic guillotine cut
POC = "POC"  # piece-outlining cut

HYBRID_MODES = ("none", "conservative", "aggressive")

MAX_VARIABLES = 5_000_000


class EnumerationLimitError(RuntimeError):
    """Graph size exceeded the configured variable cap."""


@dataclass(frozen=True)
class Plate:
    id: int
    length: int
    width: int
    is_original: bool = False

    @property
    def dims(self) -> tuple[int, int]:
        return (self.length, self.width)

    @property
    def area(self) -> int:
        return self.length * self.width


@dataclass(frozen=True)
class Cut:
    """One cut on a parent plate; children carry production multiplicities.

    ``slots`` keeps the per-position child plates (first/second for a BGC,
    first-cut/second-cut residual for a POC) before aggregation; ``None``
    marks a child dropped as waste.
    """

    id: int
    parent: int
    orientation: str
    position: int
    children: tuple[tuple[int, int], ...]
    slots: tuple[int | None, int | None]
    kind: str = BGC
    poc_piece: int | None = None
    poc_single_cut: bool = False

    @property
    def child_count(self) -> int:
        return sum(mult for _, mult in self.children)


@dataclass(frozen=True)
class Extraction:
    piece: int
    plate: int


@dataclass(frozen=True)
class PlateGraph:
    formulation: str  # "bba" | "fmt"
    hybrid: str  # "none" | "conservative" | "aggressive"
    plates: tuple[Plate, ...]
    cuts: tuple[Cut, ...]
    extractions: tuple[Extraction, ...]

    @property
    def original(self) -> Plate:
        return self.plates[0]

    @property
    def stats(self) -> dict[str, int]:
        return {
            "plates": len(self.plates),
            "cuts": len(self.cuts),
            "extractions": len(self.extractions),
            "hybridised": sum(1 for c in self.cuts if c.kind == POC),
            "single_residual": sum(
                1 for c in self.cuts if c.kind == POC and c.child_count == 1
            ),
        }


def two_pieces_fit(
    plate: tuple[int, int], a: PieceType, b: PieceType
) -> bool:
    """Can pieces a and b be placed together in the plate (side by side or stacked)?"""
    length, width = plate
    return (a.length + b.length <= length and max(a.width, b.width) <= width) or (
        a.width + b.width <= width and max(a.length, b.length) <= length
    )


def extraction_eligible(
    plate: tuple[int, int], piece: PieceType, pieces: Sequence[PieceType]
) -> bool:
    """True iff no second piece of any type fits the plate alongside ``piece``."""
    if not piece.fits(*plate):
        raise ValueError(f"piece {piece.id} does not fit plate {plate}")
    return not any(two_pieces_fit(plate, piece, k) for k in pieces)


def _fitting(pieces: Sequence[PieceType], dims: tuple[int, int]) -> list[PieceType]:
    return [p for p in pieces if p.fits(*dims)]


def _size(piece: PieceType, orientation: str) -> int:
    return piece.length if orientation == HORIZONTAL else piece.width


def _caps(pieces: Iterable[PieceType], orientation: str) -> list[tuple[int, int]]:
    return [(_size(p, orientation), p.demand) for p in pieces]


def _normalize_plate(
    dims: tuple[int, int], pieces: Sequence[PieceType]
) -> tuple[int, int] | None:
    """Round both dimensions down to the largest reachable sums; None if no piece fits."""
    fit = _fitting(pieces, dims)
    if not fit:
        return None
    return (
        normalize_dim(dims[0], _caps(fit, HORIZONTAL)),
        normalize_dim(dims[1], _caps(fit, VERTICAL)),
    )


def replaceable_pieces(
    plate: tuple[int, int], orientation: str, q: int, pieces: Sequence[PieceType]
) -> tuple[int, ...]:
    """Piece ids whose matching dimension equals q, when the cut is replaceable.

    A cut is replaceable when the position matches at least one fitting
    piece and is not reachable as a demand-bounded sum of two or more piece
    sizes.  Returns the sorted matching ids, or () when not replaceable.
    """
    fit = _fitting(pieces, plate)
    dim = plate[0] if orientation == HORIZONTAL else plate[1]
    matching = tuple(sorted(p.id for p in fit if _size(p, orientation) == q))
    if not matching:
        return ()
    counts = max_piece_counts(min(q, dim), _caps(fit, orientation))
    if counts[q] >= 2:
        return ()
    return matching


@dataclass
class _Builder:
    """Mutable enumeration state; produces the frozen PlateGraph."""

    pieces: Sequence[PieceType]
    formulation: str
    hybrid: str
    max_variables: int

    def __post_init__(self):
        self.plate_ids: dict[tuple[int, int], int] = {}
        self.plates: list[tuple[int, int]] = []
        self.queue: deque[int] = deque()
        self.cuts: list[dict] = []
        self.extraction_count = 0

    def plate_id(self, dims: tuple[int, int]) -> int:
        pid = self.plate_ids.get(dims)
        if pid is None:
            pid = len(self.plates)
            self.plate_ids[dims] = pid
            self.plates.append(dims)
            self.queue.append(pid)
        return pid

    def child(self, dims: tuple[int, int]) -> int | None:
        if dims[0] <= 0 or dims[1] <= 0:
            return None
        if self.formulation == "bba":
            norm = _normalize_plate(dims, self.pieces)
            if norm is None or norm[0] == 0 or norm[1] == 0:
                return None
            return self.plate_id(norm)
        # fmt keeps raw dimensions; a child holding no piece is trimmed off
        if not _fitting(self.pieces, dims):
            return None
        return self.plate_id(dims)

    def add_cut(
        self,
        parent: int,
        orientation: str,
        q: int,
        slots: tuple[int | None, int | None],
        kind: str = BGC,
        poc_piece: int | None = None,
        poc_single_cut: bool = False,
    ) -> None:
        children: dict[int, int] = {}
        for pid in slots:
            if pid is not None:
                children[pid] = children.get(pid, 0) + 1
        self.cuts.append(
            dict(
                parent=parent,
                orientation=orientation,
                position=q,
                children=tuple(sorted(children.items())),
                slots=slots,
                kind=kind,
                poc_piece=poc_piece,
                poc_single_cut=poc_single_cut,
            )
        )
        if len(self.cuts) + self.extraction_count > self.max_variables:
            raise EnumerationLimitError(
                f"graph exceeds {self.max_variables} combined cut/extraction variables"
            )

    def emit_bgc(self, parent: int, dims: tuple[int, int], orientation: str, q: int):
        length, width = dims
        if orientation == HORIZONTAL:
            first, second = (q, width), (length - q, width)
        else:
            first, second = (length, q), (length, width - q)
        self.add_cut(parent, orientation, q, (self.child(first), self.child(second)))

    def emit_poc(self, parent: int, dims: tuple[int, int], orientation: str, piece: PieceType):
        length, width = dims
        if orientation == HORIZONTAL:
            # first cut along the length at the piece length
            residual_first = (length - piece.length, width)
            second_needed = piece.width < width
            residual_second = (piece.length, width - piece.width)
        else:
            residual_first = (length, width - piece.width)
            second_needed = piece.length < length
            residual_second = (length - piece.length, piece.width)
        slots = (
            self.child(residual_first),
            self.child(residual_second) if second_needed else None,
        )
        self.add_cut(
            parent,
            orientation,
            _size(piece, orientation),
            slots,
            kind=POC,
            poc_piece=piece.id,
            poc_single_cut=not second_needed,
        )

    def expand(self, pid: int) -> None:
        dims = self.plates[pid]
        fit = _fitting(self.pieces, dims)
        by_id = {p.id: p for p in self.pieces}
        for orientation in ORIENTATIONS:
            dim = dims[0] if orientation == HORIZONTAL else dims[1]
            reach = reachable_sums(dim, _caps(fit, orientation))
            limit = dim // 2 if self.formulation == "bba" else dim - 1
            for q in range(1, limit + 1):
                if not reach[q]:
                    continue
                if self.hybrid != "none":
                    matching = replaceable_pieces(dims, orientation, q, self.pieces)
                    if len(matching) == 1 or (self.hybrid == "aggressive" and matching):
                        for piece_id in matching:
                            self.emit_poc(pid, dims, orientation, by_id[piece_id])
                        continue
                self.emit_bgc(pid, dims, orientation, q)

    def extractions_for(self, pid: int) -> list[tuple[int, int]]:
        dims = self.plates[pid]
        out = []
        for p in _fitting(self.pieces, dims):
            if self.formulation == "bba":
                ok = extraction_eligible(dims, p, self.pieces)
            else:
                # fmt sells piece-sized plates directly
                ok = (p.length, p.width) == dims
            if ok:
                out.append((p.id, pid))
        self.extraction_count += len(out)
        return out

    def build(self, original: tuple[int, int]) -> PlateGraph:
        root = self.plate_id(original)
        assert root == 0
        extractions: list[tuple[int, int]] = []
        while self.queue:
            pid = self.queue.popleft()
            self.expand(pid)
            extractions.extend(self.extractions_for(pid))
        return self.freeze(extractions)

    def freeze(self, extractions: list[tuple[int, int]]) -> PlateGraph:
        # deterministic public ids: plates by decreasing area then dims,
        # cuts by (plate, orientation, position, piece); original stays 0
        order = sorted(
            range(len(self.plates)),
            key=lambda i: (-self.plates[i][0] * self.plates[i][1], self.plates[i]),
        )
        assert order[0] == 0
        remap = {old: new for new, old in enumerate(order)}
        plates = tuple(
            Plate(
                id=new,
                length=self.plates[old][0],
                width=self.plates[old][1],
                is_original=old == 0,
            )
            for new, old in enumerate(order)
        )
        cut_key = lambda c: (
            remap[c["parent"]],
            c["orientation"],
            c["position"],
            c["kind"],
            -1 if c["poc_piece"] is None else c["poc_piece"],
        )
        cuts = tuple(
            Cut(
                id=i,
                parent=remap[c["parent"]],
                orientation=c["orientation"],
                position=c["position"],
                children=tuple(
                    sorted((remap[pid], mult) for pid, mult in c["children"])
                ),
                slots=tuple(
                    None if pid is None else remap[pid] for pid in c["slots"]
                ),
                kind=c["kind"],
                poc_piece=c["poc_piece"],
                poc_single_cut=c["poc_single_cut"],
            )
            for i, c in enumerate(sorted(self.cuts, key=cut_key))
        )
        extr = tuple(
            sorted(
                (Extraction(piece=piece, plate=remap[pid]) for piece, pid in extractions),
                key=lambda e: (e.plate, e.piece),
            )
        )
        return PlateGraph(
            formulation=self.formulation,
            hybrid=self.hybrid,
            plates=plates,
            cuts=cuts,
            extractions=extr,
        )


def _enumerate(
    inst: Instance, formulation: str, hybrid: str, max_variables: int
) -> PlateGraph:
    if hybrid not in HYBRID_MODES:
        raise ValueError(f"hybrid mode must be one of {HYBRID_MODES}")
    builder = _Builder(
        pieces=inst.pieces,
        formulation=formulation,
        hybrid=hybrid,
        max_variables=max_variables,
    )
    return builder.build((inst.plate_length, inst.plate_width))


def enumerate_bba(
    inst: Instance, *, hybrid: str = "none", max_variables: int = MAX_VARIABLES
) -> PlateGraph:
    """Midplate-restricted, normalized graph with direct piece extractions."""
    return _enumerate(inst, "bba", hybrid, max_variables)


def enumerate_fmt(
    inst: Instance, *, hybrid: str = "none", max_variables: int = MAX_VARIABLES
) -> PlateGraph:
    """Full-position reference graph: raw plate sizes, piece-sized plates sell directly."""
    return _enumerate(inst, "fmt", hybrid, max_variables)
