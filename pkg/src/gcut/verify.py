"""Decoding solver output into cutting trees and checking pattern validity.

A decoded solution is a binary guillotine tree: internal nodes are single
edge-to-edge cuts, leaves are sold pieces or waste.  Normalization waste is
materialized as explicit waste leaves so children always tile their parent
exactly in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .discretize import HORIZONTAL, VERTICAL
from .enumeration import POC, Cut, PlateGraph
from .instance import Instance
from .model import cut_var_name, extraction_var_name, sale_var_name
from .solve import VarAssignment

CUT = "cut"
PIECE = "piece"
WASTE = "waste"


class DecodeError(RuntimeError):
    """Assignment does not describe a consistent flow over the graph."""


@dataclass(frozen=True)
class TreeNode:
    length: int
    width: int
    kind: str
    orientation: str | None = None
    position: int | None = None
    children: tuple["TreeNode", ...] = ()
    piece: int | None = None
    source: str | None = None  # "extraction" | "poc" for piece leaves

    @property
    def dims(self) -> tuple[int, int]:
        return (self.length, self.width)


def cut_node(
    length: int, width: int, orientation: str, position: int, first: TreeNode, second: TreeNode
) -> TreeNode:
    return TreeNode(
        length=length,
        width=width,
        kind=CUT,
        orientation=orientation,
        position=position,
        children=(first, second),
    )


def waste_node(length: int, width: int) -> TreeNode:
    return TreeNode(length=length, width=width, kind=WASTE)


def piece_node(length: int, width: int, piece: int, source: str | None = None) -> TreeNode:
    return TreeNode(length=length, width=width, kind=PIECE, piece=piece, source=source)


@dataclass(frozen=True)
class CuttingTree:
    root: TreeNode

    def value(self, inst: Instance) -> int:
        """Total profit of the sold piece leaves."""
        return sum(
            inst.pieces[n.piece].profit for n in iter_nodes(self.root) if n.kind == PIECE
        )


def iter_nodes(node: TreeNode) -> Iterable[TreeNode]:
    yield node
    for child in node.children:
        yield from iter_nodes(child)


@dataclass(frozen=True)
class PlacedRect:
    piece: int | None  # None marks waste
    x: int
    y: int
    length: int
    width: int

    @property
    def corners(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.x + self.length, self.y + self.width)


@dataclass(frozen=True)
class Placement:
    plate_length: int
    plate_width: int
    rects: tuple[PlacedRect, ...]

    def __post_init__(self):
        for r in self.rects:
            x0, y0, x1, y1 = r.corners
            if x0 < 0 or y0 < 0 or x1 > self.plate_length or y1 > self.plate_width:
                raise ValueError(f"rectangle {r} sticks out of the plate")
        for i, a in enumerate(self.rects):
            ax0, ay0, ax1, ay1 = a.corners
            for b in self.rects[i + 1 :]:
                bx0, by0, bx1, by1 = b.corners
                if ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1:
                    raise ValueError(f"rectangles {a} and {b} overlap")


def placement_from_tree(tree: CuttingTree, *, include_waste: bool = False) -> Placement:
    rects: list[PlacedRect] = []

    def walk(node: TreeNode, x: int, y: int) -> None:
        if node.kind == CUT:
            first, second = node.children
            walk(first, x, y)
            if node.orientation == HORIZONTAL:
                walk(second, x + node.position, y)
            else:
                walk(second, x, y + node.position)
        elif node.kind == PIECE or include_waste:
            rects.append(
                PlacedRect(
                    piece=node.piece,
                    x=x,
                    y=y,
                    length=node.length,
                    width=node.width,
                )
            )

    root = tree.root
    walk(root, 0, 0)
    return Placement(plate_length=root.length, plate_width=root.width, rects=tuple(rects))


def _rounded_counts(assignment: VarAssignment, names: Sequence[str]) -> list[int]:
    counts = []
    for name in names:
        value = assignment.value(name)
        nearest = round(value)
        if abs(value - nearest) > 1e-6 or nearest < 0:
            raise DecodeError(f"variable {name} = {value} is not a count")
        counts.append(int(nearest))
    return counts


class _Decoder:
    def __init__(self, assignment: VarAssignment, g: PlateGraph, inst: Instance):
        self.g = g
        self.inst = inst
        self.cut_remaining = _rounded_counts(assignment, [cut_var_name(c) for c in g.cuts])
        self.extr_remaining = dict(
            zip(
                [(e.piece, e.plate) for e in g.extractions],
                _rounded_counts(
                    assignment, [extraction_var_name(e) for e in g.extractions]
                ),
            )
        )
        sale_names = [sale_var_name(p.id) for p in inst.pieces]
        if any(name in assignment.values for name in sale_names):
            self.sale_remaining = dict(
                zip(range(len(inst.pieces)), _rounded_counts(assignment, sale_names))
            )
        else:
            self.sale_remaining = {p.id: 0 for p in inst.pieces}
        self.extr_by_plate: dict[int, list[int]] = {p.id: [] for p in g.plates}
        for e in g.extractions:
            self.extr_by_plate[e.plate].append(e.piece)
        for pieces in self.extr_by_plate.values():
            pieces.sort()
        self.cuts_by_parent: dict[int, list[Cut]] = {p.id: [] for p in g.plates}
        for c in g.cuts:
            self.cuts_by_parent[c.parent].append(c)

    def build_plate(self, plate_id: int) -> TreeNode:
        plate = self.g.plates[plate_id]
        for piece in self.extr_by_plate[plate_id]:
            if self.extr_remaining.get((piece, plate_id), 0) > 0:
                self.extr_remaining[(piece, plate_id)] -= 1
                return self._carve_piece(plate.dims, piece, "extraction")
        for cut in self.cuts_by_parent[plate_id]:
            if self.cut_remaining[cut.id] > 0:
                self.cut_remaining[cut.id] -= 1
                return self._apply_cut(plate.dims, cut)
        return waste_node(*plate.dims)

    def _sell_or_waste(self, piece: int) -> TreeNode:
        p = self.inst.pieces[piece]
        if self.sale_remaining.get(piece, 0) > 0:
            self.sale_remaining[piece] -= 1
            return piece_node(p.length, p.width, piece, source="poc")
        return waste_node(p.length, p.width)

    def _apply_cut(self, dims: tuple[int, int], cut: Cut) -> TreeNode:
        length, width = dims
        q = cut.position
        if cut.orientation == HORIZONTAL:
            region1, region2 = (q, width), (length - q, width)
        else:
            region1, region2 = (length, q), (length, width - q)
        if cut.kind == POC:
            piece = self.inst.pieces[cut.poc_piece]
            if cut.poc_single_cut:
                first = self._sell_or_waste(cut.poc_piece)
            else:
                inner = self._sell_or_waste(cut.poc_piece)
                if cut.orientation == HORIZONTAL:
                    # second constituting cut separates the piece from the
                    # second-cut residual within the piece-length strip
                    rest = (piece.length, width - piece.width)
                    first = cut_node(
                        *region1,
                        VERTICAL,
                        piece.width,
                        inner,
                        self._wrap_region(rest, cut.slots[1]),
                    )
                else:
                    rest = (length - piece.length, piece.width)
                    first = cut_node(
                        *region1,
                        HORIZONTAL,
                        piece.length,
                        inner,
                        self._wrap_region(rest, cut.slots[1]),
                    )
            second = self._wrap_region(region2, cut.slots[0])
        else:
            first = self._wrap_region(region1, cut.slots[0])
            second = self._wrap_region(region2, cut.slots[1])
        return cut_node(length, width, cut.orientation, q, first, second)

    def _wrap_region(self, region: tuple[int, int], slot: int | None) -> TreeNode:
        if slot is None:
            return waste_node(*region)
        plate = self.g.plates[slot]
        node = self.build_plate(slot)
        # materialize normalization waste so children tile the region exactly
        if plate.width < region[1]:
            node = cut_node(
                plate.length,
                region[1],
                VERTICAL,
                plate.width,
                node,
                waste_node(plate.length, region[1] - plate.width),
            )
        if plate.length < region[0]:
            node = cut_node(
                region[0],
                region[1],
                HORIZONTAL,
                plate.length,
                node,
                waste_node(region[0] - plate.length, region[1]),
            )
        return node

    def _carve_piece(self, dims: tuple[int, int], piece: int, source: str) -> TreeNode:
        p = self.inst.pieces[piece]
        node = piece_node(p.length, p.width, piece, source=source)
        if p.width < dims[1]:
            node = cut_node(
                p.length, dims[1], VERTICAL, p.width, node, waste_node(p.length, dims[1] - p.width)
            )
        if p.length < dims[0]:
            node = cut_node(
                dims[0], dims[1], HORIZONTAL, p.length, node, waste_node(dims[0] - p.length, dims[1])
            )
        return node


def decode(assignment: VarAssignment, g: PlateGraph, inst: Instance) -> CuttingTree:
    """Materialize a cutting tree from an integral assignment.

    Greedy multiset matching descending from the original plate; extractions
    are consumed before cuts, cuts by ascending id.  Raises DecodeError when
    flow conservation or the objective does not add up.
    """
    if assignment.status in ("infeasible", "timeout"):
        raise DecodeError(f"cannot decode a solution with status {assignment.status}")
    decoder = _Decoder(assignment, g, inst)
    tree = CuttingTree(root=decoder.build_plate(0))
    leftovers = sum(decoder.cut_remaining) + sum(decoder.extr_remaining.values())
    leftovers += sum(decoder.sale_remaining.values())
    if leftovers:
        raise DecodeError(
            f"{leftovers} cut/extraction/sale executions had no plate copy to run on"
        )
    value = tree.value(inst)
    if assignment.objective is None or round(assignment.objective) != value:
        raise DecodeError(
            f"tree value {value} disagrees with objective {assignment.objective}"
        )
    return tree


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    value: int
    piece_counts: tuple[tuple[int, int], ...]
    violations: tuple[str, ...]


def check_solution(tree: CuttingTree, inst: Instance) -> CheckReport:
    """Verify geometry, demand (joint across twins) and recompute the value."""
    violations: list[str] = []
    counts: dict[int, int] = {}

    def walk(node: TreeNode) -> None:
        if node.kind == CUT:
            if len(node.children) != 2:
                violations.append(f"cut node with {len(node.children)} children")
                return
            first, second = node.children
            q = node.position
            if node.orientation == HORIZONTAL:
                want = ((q, node.width), (node.length - q, node.width))
                good = q is not None and 0 < q < node.length
            else:
                want = ((node.length, q), (node.length, node.width - q))
                good = q is not None and 0 < q < node.width
            if not good:
                violations.append(
                    f"cut position {q} outside {node.length}x{node.width} plate"
                )
            for child, dims in zip((first, second), want):
                if child.dims != dims:
                    violations.append(
                        f"containment: child {child.dims} does not tile "
                        f"{node.length}x{node.width} cut at {q}"
                    )
            walk(first)
            walk(second)
        elif node.kind == PIECE:
            p = inst.pieces[node.piece]
            if node.dims != (p.length, p.width):
                violations.append(
                    f"piece {node.piece} leaf {node.dims} differs from "
                    f"{p.length}x{p.width}"
                )
            counts[node.piece] = counts.get(node.piece, 0) + 1

    root = tree.root
    if root.dims != (inst.plate_length, inst.plate_width):
        violations.append(
            f"root {root.dims} is not the {inst.plate_length}x{inst.plate_width} plate"
        )
    walk(root)
    for members in inst.demand_groups():
        produced = sum(counts.get(piece, 0) for piece in members)
        demand = inst.pieces[members[0]].demand
        if produced > demand:
            violations.append(
                f"demand: {produced} copies of piece group {members} exceed {demand}"
            )
    value = sum(inst.pieces[piece].profit * n for piece, n in counts.items())
    return CheckReport(
        ok=not violations,
        value=value,
        piece_counts=tuple(sorted(counts.items())),
        violations=tuple(violations),
    )


def is_guillotinable(p: Placement) -> bool:
    """Can the placed rectangles be separated by recursive edge-to-edge cuts?"""
    rects = [r.corners for r in p.rects if r.piece is not None]
    memo: dict[frozenset[int], bool] = {}

    def rec(ids: frozenset[int]) -> bool:
        if len(ids) <= 1:
            return True
        cached = memo.get(ids)
        if cached is not None:
            return cached
        x0 = min(rects[i][0] for i in ids)
        y0 = min(rects[i][1] for i in ids)
        x1 = max(rects[i][2] for i in ids)
        y1 = max(rects[i][3] for i in ids)
        ok = False
        for c in sorted({rects[i][0] for i in ids} | {rects[i][2] for i in ids}):
            if not x0 < c < x1:
                continue
            if any(rects[i][0] < c < rects[i][2] for i in ids):
                continue
            left = frozenset(i for i in ids if rects[i][2] <= c)
            if rec(left) and rec(ids - left):
                ok = True
                break
        if not ok:
            for c in sorted({rects[i][1] for i in ids} | {rects[i][3] for i in ids}):
                if not y0 < c < y1:
                    continue
                if any(rects[i][1] < c < rects[i][3] for i in ids):
                    continue
                below = frozenset(i for i in ids if rects[i][3] <= c)
                if rec(below) and rec(ids - below):
                    ok = True
                    break
        memo[ids] = ok
        return ok

    return rec(frozenset(range(len(rects))))
