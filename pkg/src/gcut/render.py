"""Deterministic SVG rendering of cutting trees and placements.

Placement files are text lines ``id x y l w`` (id ``-`` marks waste);
coordinates use a bottom-left origin and are flipped for SVG.
"""

from __future__ import annotations

from pathlib import Path

from .verify import CuttingTree, PlacedRect, Placement, placement_from_tree

SCALE = 6


def _fill(piece: int) -> str:
    return f"hsl({(piece * 67) % 360},65%,72%)"


def render_svg(obj: CuttingTree | Placement, path: str | Path | None = None) -> str:
    """Render to SVG text, one labelled rectangle per piece; write when path given."""
    placement = placement_from_tree(obj) if isinstance(obj, CuttingTree) else obj
    L, W = placement.plate_length, placement.plate_width
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{L * SCALE}" height="{W * SCALE}" viewBox="0 0 {L} {W}">',
        f'  <rect x="0" y="0" width="{L}" height="{W}" '
        'fill="white" stroke="black" stroke-width="0.4"/>',
    ]
    for r in placement.rects:
        if r.piece is None:
            continue
        y_svg = W - r.y - r.width
        lines.append(
            f'  <rect x="{r.x}" y="{y_svg}" width="{r.length}" height="{r.width}" '
            f'fill="{_fill(r.piece)}" stroke="#333" stroke-width="0.2"/>'
        )
        size = max(1, min(r.length, r.width) // 2)
        lines.append(
            f'  <text x="{r.x + r.length / 2:g}" y="{y_svg + r.width / 2:g}" '
            f'font-size="{size}" text-anchor="middle" dominant-baseline="middle">'
            f"{r.piece}</text>"
        )
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_placement(path: str | Path, plate: tuple[int, int]) -> Placement:
    """Parse 'id x y l w' lines into a validated placement."""
    rects = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ValueError(f"line {lineno}: expected 'id x y l w', got {raw!r}")
        piece = None if fields[0] == "-" else int(fields[0])
        x, y, l, w = (int(f) for f in fields[1:])
        rects.append(PlacedRect(piece=piece, x=x, y=y, length=l, width=w))
    return Placement(plate_length=plate[0], plate_width=plate[1], rects=tuple(rects))


def write_placement(p: Placement, path: str | Path) -> None:
    lines = [
        f"{'-' if r.piece is None else r.piece} {r.x} {r.y} {r.length} {r.width}"
        for r in p.rects
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
