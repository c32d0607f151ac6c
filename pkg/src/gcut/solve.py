"""Running a MILP solver on an exported model and parsing its answer.

Backends are subprocess command templates with ``{mps}`` and ``{sol}``
placeholders (``{seed}`` and ``{time_limit}`` are substituted when present).
The string ``builtin`` selects the bundled HiGHS-based MPS solver in
process.  Solution files contain ``name value`` lines; ``#`` lines are
comments and may declare ``# status ...`` and ``# objective ...``.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .model import MilpModel, render_mps

INTEGER_TOLERANCE = 1e-6
TIMEOUT_GRACE = 5.0

STATUSES = ("optimal", "feasible", "infeasible", "timeout")


class SolveError(RuntimeError):
    """Backend failed: bad exit code, unusable output, or tolerance violation."""


class SolveTimeout(SolveError):
    """Backend exceeded the wall-clock limit plus grace."""


class IntegralityError(SolveError):
    """An integer variable came back fractional beyond tolerance."""


@dataclass(frozen=True)
class VarAssignment:
    values: Mapping[str, float]
    objective: float | None
    status: str

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    def value(self, name: str) -> float:
        return self.values.get(name, 0.0)


def parse_solution_text(text: str) -> tuple[dict[str, float], float | None, str]:
    """Parse 'name value' lines; returns (values, declared objective, status)."""
    values: dict[str, float] = {}
    objective: float | None = None
    status = "optimal"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "status":
                status = fields[1]
            elif len(fields) == 2 and fields[0] == "objective":
                objective = float(fields[1])
            continue
        fields = line.split()
        if len(fields) != 2:
            raise SolveError(f"solution line {lineno}: expected 'name value', got {raw!r}")
        try:
            values[fields[0]] = float(fields[1])
        except ValueError:
            raise SolveError(f"solution line {lineno}: bad value {fields[1]!r}") from None
    if status not in STATUSES:
        raise SolveError(f"unknown solver status {status!r}")
    return values, objective, status


def _finish(
    model: MilpModel,
    values: dict[str, float],
    declared: float | None,
    status: str,
    mode: str,
) -> VarAssignment:
    if status in ("infeasible", "timeout"):
        return VarAssignment(values={}, objective=None, status=status)
    index = model.variable_index()
    for name in values:
        if name not in index:
            raise SolveError(f"solution names unknown variable {name!r}")
    if mode == "mip":
        rounded = {}
        for name, value in values.items():
            if model.variables[index[name]].integer:
                nearest = round(value)
                if abs(value - nearest) > INTEGER_TOLERANCE:
                    raise IntegralityError(f"{name} = {value} is not integral")
                value = float(nearest)
            rounded[name] = value
        values = rounded
    objective = model.objective_value(values)
    if declared is not None and abs(declared - objective) > 1e-6 * max(1.0, abs(objective)):
        raise SolveError(
            f"declared objective {declared} disagrees with recomputed {objective}"
        )
    return VarAssignment(values=values, objective=objective, status=status)


def relax_mps_text(text: str) -> str:
    """Drop integrality markers so any MPS solver returns the LP relaxation."""
    return "\n".join(
        line for line in text.splitlines() if "'MARKER'" not in line
    ) + "\n"


def external_solve(
    mps: str | Path,
    backend: str,
    model: MilpModel,
    *,
    mode: str = "mip",
    time_limit: float | None = None,
    seed: int = 0,
) -> VarAssignment:
    """Run a backend command on an MPS file and parse the solution file."""
    if mode not in ("mip", "lp"):
        raise ValueError("mode must be 'mip' or 'lp'")
    if "{mps}" not in backend or "{sol}" not in backend:
        raise ValueError("backend template needs {mps} and {sol} placeholders")
    mps = Path(mps)
    with tempfile.TemporaryDirectory(prefix="gcut-solve-") as tmp:
        if mode == "lp":
            relaxed = Path(tmp) / (mps.stem + "-lp.mps")
            relaxed.write_text(relax_mps_text(mps.read_text(encoding="utf-8")), "utf-8")
            mps = relaxed
        sol = Path(tmp) / "solution.sol"
        try:
            command = backend.format(
                mps=shlex.quote(str(mps)),
                sol=shlex.quote(str(sol)),
                seed=seed,
                time_limit="" if time_limit is None else time_limit,
            )
        except (KeyError, IndexError) as exc:
            raise ValueError(f"unknown placeholder in backend template: {exc}") from exc
        try:
            proc = subprocess.run(
                shlex.split(command),
                capture_output=True,
                text=True,
                timeout=None if time_limit is None else time_limit + TIMEOUT_GRACE,
            )
        except subprocess.TimeoutExpired as exc:
            raise SolveTimeout(f"backend exceeded {time_limit}s plus grace") from exc
        if proc.returncode != 0:
            raise SolveError(
                f"backend exited with {proc.returncode}: {proc.stderr.strip()[-500:]}"
            )
        if not sol.exists():
            raise SolveError("backend exited cleanly but wrote no solution file")
        values, declared, status = parse_solution_text(sol.read_text(encoding="utf-8"))
    return _finish(model, values, declared, status, mode)


def solve_model(
    model: MilpModel,
    backend: str = "builtin",
    *,
    mode: str = "mip",
    time_limit: float | None = None,
    seed: int = 0,
) -> VarAssignment:
    """Write the model to MPS and solve it with the chosen backend."""
    with tempfile.TemporaryDirectory(prefix="gcut-model-") as tmp:
        mps = Path(tmp) / "model.mps"
        mps.write_text(render_mps(model), encoding="utf-8")
        if backend == "builtin":
            from .backend import solve_mps

            values, declared, status = solve_mps(mps, mode=mode, time_limit=time_limit)
            return _finish(model, values, declared, status, mode)
        return external_solve(
            mps, backend, model, mode=mode, time_limit=time_limit, seed=seed
        )
