"""Solver-agnostic integer model assembly and deterministic MPS export.

Variable naming: ``x_<o>_<q>_<plate>`` for basic cuts, ``xh_<cutid>`` for
piece-outlining cuts, ``e_<piece>_<plate>`` for extractions and
``s_<piece>`` for piece-sized plates sold out of piece-outlining cuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .enumeration import BGC, POC, Cut, Extraction, PlateGraph
from .hybridise import HybridisationConfig
from .instance import Instance


class ModelError(ValueError):
    """Inconsistent graph/config combination."""


class MpsNameError(ValueError):
    """Name collision after strict 8-character truncation."""


@dataclass(frozen=True)
class Variable:
    name: str
    lower: int = 0
    upper: int | None = None  # None: unbounded above
    integer: bool = True


@dataclass(frozen=True)
class Constraint:
    name: str
    sense: str  # "L" (<=), "G" (>=), "E" (=)
    rhs: int
    terms: tuple[tuple[int, int], ...]  # (variable index, coefficient)


@dataclass(frozen=True)
class MilpModel:
    """Maximization model over integer variables with sparse rows."""

    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[int, int], ...]

    def variable_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(coef * values.get(self.variables[i].name, 0.0) for i, coef in self.objective)


def cut_var_name(cut: Cut) -> str:
    if cut.kind == POC:
        return f"xh_{cut.id}"
    return f"x_{cut.orientation}_{cut.position}_{cut.parent}"


def extraction_var_name(e: Extraction) -> str:
    return f"e_{e.piece}_{e.plate}"


def sale_var_name(piece: int) -> str:
    return f"s_{piece}"


def build_model(g: PlateGraph, inst: Instance, cfg: HybridisationConfig) -> MilpModel:
    """Assemble objective, plate-conservation, demand and linking rows."""
    hybrid = cfg.mode != "none"
    if not hybrid and any(c.kind == POC for c in g.cuts):
        # without sale variables the outlined pieces could never be sold
        raise ModelError("graph contains piece-outlining cuts but mode is none")

    group_of: dict[int, int] = {}
    groups = inst.demand_groups()
    for gi, members in enumerate(groups):
        for piece in members:
            group_of[piece] = gi
    for c in g.cuts:
        if c.kind == POC and c.poc_piece not in group_of:
            raise ModelError(f"cut {c.id} outlines unknown piece {c.poc_piece}")

    variables: list[Variable] = []
    var_ids: dict[str, int] = {}

    def add_var(name: str, upper: int | None) -> int:
        var_ids[name] = len(variables)
        variables.append(Variable(name=name, upper=upper))
        return var_ids[name]

    for c in g.cuts:
        add_var(cut_var_name(c), None)
    for e in g.extractions:
        add_var(extraction_var_name(e), inst.pieces[e.piece].demand)
    if hybrid:
        for p in inst.pieces:
            add_var(sale_var_name(p.id), p.demand)

    rows: list[Constraint] = []
    outgoing: dict[int, list[int]] = {p.id: [] for p in g.plates}
    incoming: dict[int, list[tuple[int, int]]] = {p.id: [] for p in g.plates}
    for c in g.cuts:
        outgoing[c.parent].append(var_ids[cut_var_name(c)])
        for child, mult in c.children:
            incoming[child].append((var_ids[cut_var_name(c)], mult))
    extr_by_plate: dict[int, list[int]] = {p.id: [] for p in g.plates}
    for e in g.extractions:
        extr_by_plate[e.plate].append(var_ids[extraction_var_name(e)])

    for plate in g.plates:
        terms: dict[int, int] = {}
        for vid in outgoing[plate.id]:
            terms[vid] = terms.get(vid, 0) + 1
        for vid in extr_by_plate[plate.id]:
            terms[vid] = terms.get(vid, 0) + 1
        rhs = 0
        if plate.id == 0:
            rhs = 1  # one copy of the original plate
        else:
            for vid, mult in incoming[plate.id]:
                terms[vid] = terms.get(vid, 0) - mult
        rows.append(
            Constraint(
                name=f"c_{plate.id}",
                sense="L",
                rhs=rhs,
                terms=tuple(sorted(terms.items())),
            )
        )

    extr_by_piece: dict[int, list[int]] = {p.id: [] for p in inst.pieces}
    for e in g.extractions:
        extr_by_piece[e.piece].append(var_ids[extraction_var_name(e)])
    for members in groups:
        terms = {}
        for piece in members:
            for vid in extr_by_piece[piece]:
                terms[vid] = 1
            if hybrid:
                terms[var_ids[sale_var_name(piece)]] = 1
        rows.append(
            Constraint(
                name=f"d_{min(members)}",
                sense="L",
                rhs=inst.pieces[members[0]].demand,
                terms=tuple(sorted(terms.items())),
            )
        )

    if hybrid:
        pocs_by_piece: dict[int, list[int]] = {p.id: [] for p in inst.pieces}
        for c in g.cuts:
            if c.kind == POC:
                pocs_by_piece[c.poc_piece].append(var_ids[cut_var_name(c)])
        for p in inst.pieces:
            terms = {var_ids[sale_var_name(p.id)]: 1}
            for vid in pocs_by_piece[p.id]:
                terms[vid] = terms.get(vid, 0) - 1
            rows.append(
                Constraint(
                    name=f"h_{p.id}",
                    sense="E" if cfg.binding else "L",
                    rhs=0,
                    terms=tuple(sorted(terms.items())),
                )
            )

    objective: dict[int, int] = {}
    for e in g.extractions:
        objective[var_ids[extraction_var_name(e)]] = inst.pieces[e.piece].profit
    if hybrid:
        for p in inst.pieces:
            objective[var_ids[sale_var_name(p.id)]] = p.profit

    return MilpModel(
        variables=tuple(variables),
        constraints=tuple(rows),
        objective=tuple(sorted(objective.items())),
    )


@dataclass(frozen=True)
class ModelStats:
    """Model-size figures mirroring the benchmark report columns."""

    plates: int
    cuts: int
    extractions: int
    variables: int
    constraints: int
    h_pct: float
    k_pct: float


def model_stats(m: MilpModel, g: PlateGraph) -> ModelStats:
    cuts = len(g.cuts)
    hybridised = sum(1 for c in g.cuts if c.kind == POC)
    single_residual = sum(1 for c in g.cuts if c.kind == POC and c.child_count == 1)
    return ModelStats(
        plates=len(g.plates),
        cuts=cuts,
        extractions=len(g.extractions),
        variables=len(m.variables),
        constraints=len(m.constraints),
        h_pct=100.0 * hybridised / cuts if cuts else 0.0,
        k_pct=100.0 * single_residual / cuts if cuts else 0.0,
    )


def _strict_names(names: Iterable[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    seen: dict[str, str] = {}
    for name in names:
        short = name[:8]
        if short in seen and seen[short] != name:
            raise MpsNameError(f"names {seen[short]!r} and {name!r} collide at {short!r}")
        seen[short] = name
        out[name] = short
    return out


def write_mps(m: MilpModel, path: str | Path, *, strict: bool = False) -> None:
    """Write the model in MPS form; output is byte-identical across runs."""
    Path(path).write_text(render_mps(m, strict=strict), encoding="utf-8")


def render_mps(m: MilpModel, *, strict: bool = False) -> str:
    names = [v.name for v in m.variables] + [c.name for c in m.constraints] + ["obj"]
    if strict:
        mapping = _strict_names(names)
    else:
        mapping = {n: n for n in names}
    width = max(len(n) for n in mapping.values())

    def pad(name: str) -> str:
        return mapping[name].ljust(width)

    lines = ["NAME          GCUT", "OBJSENSE", "    MAX", "ROWS", f" N  {mapping['obj']}"]
    for c in m.constraints:
        lines.append(f" {c.sense}  {mapping[c.name]}")

    lines.append("COLUMNS")
    lines.append(f"    MARKER    {'':{width}}  'MARKER'  'INTORG'")
    col_rows: list[list[tuple[str, int]]] = [[] for _ in m.variables]
    for c in m.constraints:
        for vid, coef in c.terms:
            if coef:
                col_rows[vid].append((c.name, coef))
    for vid, coef in m.objective:
        if coef:
            col_rows[vid].append(("obj", coef))
    for v, entries in zip(m.variables, col_rows):
        for row_name, coef in entries:
            lines.append(f"    {pad(v.name)}  {pad(row_name)}  {coef}")
    lines.append(f"    MARKER    {'':{width}}  'MARKER'  'INTEND'")

    lines.append("RHS")
    for c in m.constraints:
        if c.rhs:
            lines.append(f"    RHS{'':{max(width - 3, 0)}}  {pad(c.name)}  {c.rhs}")

    lines.append("BOUNDS")
    for v in m.variables:
        if v.upper is None:
            lines.append(f" PL BND{'':{max(width - 3, 0)}}  {pad(v.name)}")
        else:
            lines.append(f" UP BND{'':{max(width - 3, 0)}}  {pad(v.name)}  {v.upper}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
