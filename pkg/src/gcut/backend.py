"""Bundled MPS solver: reads an MPS file and solves it with HiGHS via scipy.

Exposed on the command line as ``gcut solve-mps IN.mps OUT.sol`` so it can
serve as the default backend for the subprocess solver contract.  Solution
files are ``name value`` lines; ``#`` lines carry status and objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix


class MpsFormatError(ValueError):
    """Unreadable MPS input."""


@dataclass
class MpsProblem:
    name: str = ""
    maximize: bool = False
    objective_row: str = ""
    row_sense: dict[str, str] = field(default_factory=dict)
    row_order: list[str] = field(default_factory=list)
    columns: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    col_order: list[str] = field(default_factory=list)
    rhs: dict[str, float] = field(default_factory=dict)
    integer: set[str] = field(default_factory=set)
    lower: dict[str, float] = field(default_factory=dict)
    upper: dict[str, float] = field(default_factory=dict)


def read_mps(path: str | Path) -> MpsProblem:
    prob = MpsProblem()
    section = ""
    in_integer = False
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0].upper()
            if section == "NAME" and len(head) > 1:
                prob.name = head[1]
            elif section == "OBJSENSE" and len(head) > 1:
                prob.maximize = head[1].upper().startswith("MAX")
            continue
        fields = raw.split()
        if section == "OBJSENSE":
            prob.maximize = fields[0].upper().startswith("MAX")
        elif section == "ROWS":
            sense, name = fields[0].upper(), fields[1]
            if sense == "N":
                if not prob.objective_row:
                    prob.objective_row = name
            elif sense in ("L", "G", "E"):
                prob.row_sense[name] = sense
                prob.row_order.append(name)
            else:
                raise MpsFormatError(f"unknown row sense {sense!r}")
        elif section == "COLUMNS":
            if "'MARKER'" in fields:
                if "'INTORG'" in fields:
                    in_integer = True
                elif "'INTEND'" in fields:
                    in_integer = False
                else:
                    raise MpsFormatError(f"bad marker line {raw!r}")
                continue
            col = fields[0]
            if col not in prob.columns:
                prob.columns[col] = []
                prob.col_order.append(col)
                if in_integer:
                    prob.integer.add(col)
            pairs = fields[1:]
            if len(pairs) % 2:
                raise MpsFormatError(f"odd field count in column line {raw!r}")
            for row, value in zip(pairs[::2], pairs[1::2]):
                prob.columns[col].append((row, float(value)))
        elif section == "RHS":
            pairs = fields[1:]
            for row, value in zip(pairs[::2], pairs[1::2]):
                prob.rhs[row] = float(value)
        elif section == "RANGES":
            raise MpsFormatError("RANGES sections are not supported")
        elif section == "BOUNDS":
            kind = fields[0].upper()
            name = fields[2]
            if kind in ("UP", "UI"):
                prob.upper[name] = float(fields[3])
            elif kind in ("LO", "LI"):
                prob.lower[name] = float(fields[3])
            elif kind == "FX":
                prob.lower[name] = prob.upper[name] = float(fields[3])
            elif kind == "BV":
                prob.lower[name], prob.upper[name] = 0.0, 1.0
                prob.integer.add(name)
            elif kind == "PL":
                prob.upper[name] = np.inf
            elif kind == "MI":
                prob.lower[name] = -np.inf
            elif kind == "FR":
                prob.lower[name], prob.upper[name] = -np.inf, np.inf
            else:
                raise MpsFormatError(f"unsupported bound kind {kind!r}")
        elif section == "ENDATA":
            break
        else:
            raise MpsFormatError(f"data line outside a known section: {raw!r}")
    if not prob.objective_row:
        raise MpsFormatError("no objective (N) row found")
    return prob


STATUS_BY_CODE = {0: "optimal", 1: "feasible", 2: "infeasible"}


def solve_mps(
    path: str | Path, *, mode: str = "mip", time_limit: float | None = None
) -> tuple[dict[str, float], float | None, str]:
    """Solve an MPS file; returns (values, objective, status)."""
    prob = read_mps(path)
    n = len(prob.col_order)
    col_index = {name: i for i, name in enumerate(prob.col_order)}
    c = np.zeros(n)
    rows = {name: i for i, name in enumerate(prob.row_order)}
    entries: list[list[tuple[int, float]]] = [[] for _ in prob.row_order]
    for col, pairs in prob.columns.items():
        j = col_index[col]
        for row, value in pairs:
            if row == prob.objective_row:
                c[j] += value
            elif row in rows:
                entries[rows[row]].append((j, value))
            else:
                raise MpsFormatError(f"column entry references unknown row {row!r}")
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    for name, value in prob.lower.items():
        lo[col_index[name]] = value
    for name, value in prob.upper.items():
        hi[col_index[name]] = value
    integrality = np.zeros(n)
    if mode == "mip":
        for name in prob.integer:
            integrality[col_index[name]] = 1
    elif mode != "lp":
        raise ValueError("mode must be 'mip' or 'lp'")

    constraints = []
    if prob.row_order:
        lb = np.empty(len(prob.row_order))
        ub = np.empty(len(prob.row_order))
        for i, name in enumerate(prob.row_order):
            rhs = prob.rhs.get(name, 0.0)
            sense = prob.row_sense[name]
            lb[i] = -np.inf if sense == "L" else rhs
            ub[i] = np.inf if sense == "G" else rhs
        data: list[float] = []
        indices: list[int] = []
        indptr = [0]
        for row_entries in entries:
            for j, value in row_entries:
                indices.append(j)
                data.append(value)
            indptr.append(len(indices))
        matrix = csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(prob.row_order), n),
        )
        constraints = [LinearConstraint(matrix, lb, ub)]

    sign = -1.0 if prob.maximize else 1.0
    options = {}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = milp(
        c=sign * c,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lo, hi),
        options=options,
    )
    status = STATUS_BY_CODE.get(res.status)
    if status is None or (status == "feasible" and res.x is None):
        if res.status == 1 and res.x is None:
            return {}, None, "timeout"
        raise RuntimeError(f"solver failed: {res.message}")
    if res.x is None:
        return {}, None, status
    values = {
        name: float(res.x[col_index[name]])
        for name in prob.col_order
        if abs(res.x[col_index[name]]) > 1e-9
    }
    objective = float(np.dot(c, res.x))
    return values, objective, status


def write_solution(
    path: str | Path, values: dict[str, float], objective: float | None, status: str
) -> None:
    lines = [f"# status {status}"]
    if objective is not None:
        lines.append(f"# objective {objective!r}")
    lines += [f"{name} {value!r}" for name, value in sorted(values.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def solve_mps_to_file(
    mps_path: str | Path,
    sol_path: str | Path,
    *,
    mode: str = "mip",
    time_limit: float | None = None,
) -> str:
    values, objective, status = solve_mps(mps_path, mode=mode, time_limit=time_limit)
    write_solution(sol_path, values, objective, status)
    return status
