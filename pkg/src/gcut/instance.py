"""Problem instances: one rectangular plate plus a set of rectangular piece types.

Two text layouts are supported.  The ``classic`` layout is the one used by the
cutting-and-packing literature datasets::

    # optional comments
    L W
    m
    l w p u     (m lines)

The ``extended`` layout is directive-based and can carry the rotation flag::

    plate L W
    rotation 1
    piece l w p u
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence


class InstanceError(ValueError):
    """Invalid instance data (dimensions, demands, profits, twin links)."""


class ParseError(InstanceError):
    """Malformed instance file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DimensionError(InstanceError):
    """A piece cannot be cut from the plate in any allowed orientation."""


@dataclass(frozen=True)
class PieceType:
    """One rectangular piece type: size, profit and demand bound."""

    id: int
    length: int
    width: int
    profit: int
    demand: int
    twin_of: int | None = None  # rotation partner, set by expand_rotation

    def __post_init__(self):
        if self.length < 1 or self.width < 1:
            raise InstanceError(f"piece {self.id}: dimensions must be >= 1")
        if self.profit < 1:
            raise InstanceError(f"piece {self.id}: profit must be >= 1")
        if self.demand < 1:
            raise InstanceError(f"piece {self.id}: demand must be >= 1")

    @property
    def area(self) -> int:
        return self.length * self.width

    def fits(self, length: int, width: int) -> bool:
        return self.length <= length and self.width <= width


@dataclass(frozen=True)
class Instance:
    """A validated cutting instance: plate dimensions and piece types."""

    plate_length: int
    plate_width: int
    pieces: tuple[PieceType, ...]
    rotation_allowed: bool = False

    def __post_init__(self):
        if self.plate_length < 1 or self.plate_width < 1:
            raise InstanceError("plate dimensions must be >= 1")
        if not self.pieces:
            raise InstanceError("instance needs at least one piece type")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for i, p in enumerate(self.pieces):
            if p.id != i:
                raise InstanceError(f"piece ids must be 0..{len(self.pieces) - 1}")
            fits = p.fits(self.plate_length, self.plate_width)
            fits_rotated = p.width <= self.plate_length and p.length <= self.plate_width
            if not fits and not (self.rotation_allowed and fits_rotated):
                raise DimensionError(
                    f"piece {p.id} ({p.length}x{p.width}) does not fit the "
                    f"{self.plate_length}x{self.plate_width} plate"
                )
        self._check_twins()

    def _check_twins(self):
        for p in self.pieces:
            if p.twin_of is None:
                continue
            if not 0 <= p.twin_of < len(self.pieces):
                raise InstanceError(f"piece {p.id}: twin id {p.twin_of} out of range")
            t = self.pieces[p.twin_of]
            if t.twin_of != p.id:
                raise InstanceError(f"twin link {p.id}<->{t.id} is not symmetric")
            if (t.length, t.width) != (p.width, p.length):
                raise InstanceError(f"twin {t.id} of piece {p.id} has unswapped dimensions")
            if t.profit != p.profit or t.demand != p.demand:
                raise InstanceError(f"twin {t.id} of piece {p.id} differs in profit or demand")

    @property
    def constrained(self) -> bool:
        """True when some demand is below the trivial per-type packing bound."""
        L, W = self.plate_length, self.plate_width
        return any(
            p.demand < (L // p.length) * (W // p.width)
            for p in self.pieces
            if p.fits(L, W)
        )

    def demand_groups(self) -> tuple[tuple[int, ...], ...]:
        """Piece ids grouped by shared demand: twin pairs joint, others alone."""
        groups: list[tuple[int, ...]] = []
        seen: set[int] = set()
        for p in self.pieces:
            if p.id in seen:
                continue
            if p.twin_of is not None:
                groups.append((p.id, p.twin_of))
                seen.update((p.id, p.twin_of))
            else:
                groups.append((p.id,))
                seen.add(p.id)
        return tuple(groups)


def _meaningful_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _ints(tokens: Sequence[str], lineno: int, expected: int) -> list[int]:
    if len(tokens) != expected:
        raise ParseError(f"expected {expected} integer fields, got {len(tokens)}", lineno)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"non-integer field in {tokens!r}", lineno) from None


def parse_instance_text(
    text: str,
    fmt: str = "classic",
    *,
    rotation_allowed: bool = False,
    unweighted: bool = False,
) -> Instance:
    """Parse instance text in the given format and validate it."""
    if fmt == "classic":
        inst = _parse_classic(text, rotation_allowed)
    elif fmt == "extended":
        inst = _parse_extended(text, rotation_allowed)
    else:
        raise ValueError(f"unknown instance format {fmt!r}")
    if unweighted:
        pieces = tuple(replace(p, profit=p.length * p.width) for p in inst.pieces)
        inst = replace(inst, pieces=pieces)
    return inst


def parse_instance(
    path: str | Path,
    fmt: str = "classic",
    *,
    rotation_allowed: bool = False,
    unweighted: bool = False,
) -> Instance:
    text = Path(path).read_text(encoding="utf-8")
    return parse_instance_text(
        text, fmt, rotation_allowed=rotation_allowed, unweighted=unweighted
    )


def _parse_classic(text: str, rotation_allowed: bool) -> Instance:
    lines = list(_meaningful_lines(text))
    if not lines:
        raise ParseError("empty instance file")
    it = iter(lines)
    lineno, tokens = next(it)
    L, W = _ints(tokens, lineno, 2)
    try:
        lineno, tokens = next(it)
    except StopIteration:
        raise ParseError("missing piece count line", lineno) from None
    (m,) = _ints(tokens, lineno, 1)
    pieces = []
    for i in range(m):
        try:
            lineno, tokens = next(it)
        except StopIteration:
            raise ParseError(f"expected {m} piece lines, found {i}", lineno) from None
        l, w, p, u = _ints(tokens, lineno, 4)
        pieces.append(PieceType(id=i, length=l, width=w, profit=p, demand=u))
    leftover = next(it, None)
    if leftover is not None:
        raise ParseError("trailing data after last piece", leftover[0])
    return Instance(L, W, tuple(pieces), rotation_allowed=rotation_allowed)


def _parse_extended(text: str, rotation_allowed: bool) -> Instance:
    plate: tuple[int, int] | None = None
    rotation = rotation_allowed
    pieces: list[PieceType] = []
    for lineno, tokens in _meaningful_lines(text):
        directive, rest = tokens[0], tokens[1:]
        if directive == "plate":
            plate = tuple(_ints(rest, lineno, 2))  # type: ignore[assignment]
        elif directive == "rotation":
            (flag,) = _ints(rest, lineno, 1)
            rotation = rotation or bool(flag)
        elif directive == "piece":
            l, w, p, u = _ints(rest, lineno, 4)
            pieces.append(PieceType(id=len(pieces), length=l, width=w, profit=p, demand=u))
        else:
            raise ParseError(f"unknown directive {directive!r}", lineno)
    if plate is None:
        raise ParseError("missing 'plate L W' directive")
    return Instance(plate[0], plate[1], tuple(pieces), rotation_allowed=rotation)


def serialize_instance(inst: Instance, fmt: str = "classic") -> str:
    """Render an instance back to text; parse respects the round trip."""
    if fmt == "classic":
        out = [f"{inst.plate_length} {inst.plate_width}", str(len(inst.pieces))]
        out += [f"{p.length} {p.width} {p.profit} {p.demand}" for p in inst.pieces]
        return "\n".join(out) + "\n"
    if fmt == "extended":
        out = [
            f"plate {inst.plate_length} {inst.plate_width}",
            f"rotation {int(inst.rotation_allowed)}",
        ]
        out += [f"piece {p.length} {p.width} {p.profit} {p.demand}" for p in inst.pieces]
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown instance format {fmt!r}")


def expand_rotation(inst: Instance) -> Instance:
    """Duplicate non-square pieces into twin pairs with swapped dimensions.

    Pieces that only fit rotated are replaced by their rotated form.  Squares
    and pieces whose rotated form does not fit are left alone.  No-op when the
    instance disallows rotation or twins are already present (idempotence).
    """
    if not inst.rotation_allowed:
        return inst
    if any(p.twin_of is not None for p in inst.pieces):
        return inst
    L, W = inst.plate_length, inst.plate_width
    base: list[PieceType] = []
    needs_twin: list[int] = []
    for p in inst.pieces:
        fits = p.fits(L, W)
        fits_rotated = p.width <= L and p.length <= W
        if not fits:
            # only the rotated form is usable: store it, no twin
            base.append(replace(p, length=p.width, width=p.length))
        elif p.length != p.width and fits_rotated:
            base.append(p)
            needs_twin.append(p.id)
        else:
            base.append(p)
    twins = {}
    next_id = len(base)
    for pid in needs_twin:
        twins[pid] = next_id
        next_id += 1
    pieces: list[PieceType] = []
    for p in base:
        if p.id in twins:
            pieces.append(replace(p, twin_of=twins[p.id]))
        else:
            pieces.append(p)
    for pid in needs_twin:
        src = inst.pieces[pid]
        pieces.append(
            PieceType(
                id=twins[pid],
                length=src.width,
                width=src.length,
                profit=src.profit,
                demand=src.demand,
                twin_of=pid,
            )
        )
    return replace(inst, pieces=tuple(pieces))
