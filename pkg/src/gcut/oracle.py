"""Exhaustive small-instance solvers used as ground truth.

Top-down recursion over (plate, remaining demand) with memoization.  Cut
positions come from the demand-bounded discretization (sufficient by the
usual normal-pattern argument) and plate dimensions are normalized on the
way down, which only merges states.  Demand is threaded through cuts by
enumerating how the remaining copies split between the two children, so
the state space is exponential in the total demand; the precondition caps
it and a node budget guards against blowups.
"""

from __future__ import annotations

from dataclasses import replace
from itertools import product
from typing import Sequence

from .discretize import normalize_dim, reachable_sums
from .instance import Instance, PieceType

DEFAULT_DEMAND_BOUND = 10
DEFAULT_BUDGET = 5_000_000


class OracleBudgetError(RuntimeError):
    """Node budget exhausted; the instance is too large for exact search."""


class _Search:
    def __init__(self, inst: Instance, budget: int):
        self.pieces = inst.pieces
        self.groups = inst.demand_groups()
        self.group_of = {}
        for gi, members in enumerate(self.groups):
            for piece in members:
                self.group_of[piece] = gi
        self.budget = budget
        self.nodes = 0
        self.memo: dict[tuple, int] = {}

    def _canonical(self, dims: tuple[int, int], dem: tuple[int, ...]) -> tuple[int, ...]:
        # zero groups with no fitting member: they cannot affect the value
        out = list(dem)
        for gi, members in enumerate(self.groups):
            if out[gi] and not any(self.pieces[p].fits(*dims) for p in members):
                out[gi] = 0
        return tuple(out)

    def _fitting(self, dims: tuple[int, int], dem: tuple[int, ...]) -> list[PieceType]:
        return [
            p for p in self.pieces if dem[self.group_of[p.id]] > 0 and p.fits(*dims)
        ]

    def _normalize(self, dims: tuple[int, int], fit: list[PieceType]) -> tuple[int, int]:
        return (
            normalize_dim(dims[0], [(p.length, p.demand) for p in fit]),
            normalize_dim(dims[1], [(p.width, p.demand) for p in fit]),
        )

    def value(self, dims: tuple[int, int], dem: tuple[int, ...]) -> int:
        self.nodes += 1
        if self.nodes > self.budget:
            raise OracleBudgetError(f"exceeded {self.budget} search nodes")
        fit = self._fitting(dims, dem)
        if not fit:
            return 0
        dims = self._normalize(dims, fit)
        dem = self._canonical(dims, dem)
        key = (dims, dem)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        best = max(p.profit for p in fit)
        for axis in (0, 1):
            dim = dims[axis]
            sizes = [
                ((p.length if axis == 0 else p.width), dem[self.group_of[p.id]])
                for p in fit
            ]
            reach = reachable_sums(dim, sizes)
            for q in range(1, dim):
                if not reach[q]:
                    continue
                if dim - q < q and reach[dim - q]:
                    continue  # the mirrored cut yields the same child pair
                child1 = (q, dims[1]) if axis == 0 else (dims[0], q)
                child2 = (dim - q, dims[1]) if axis == 0 else (dims[0], dim - q)
                best = max(best, self._best_split(child1, child2, dem, best))
        self.memo[key] = best
        return best

    def _best_split(
        self,
        child1: tuple[int, int],
        child2: tuple[int, int],
        dem: tuple[int, ...],
        best: int,
    ) -> int:
        # optimistic bound: both children with the full demand
        full1 = self.value(child1, dem)
        full2 = self.value(child2, dem)
        if full1 + full2 <= best:
            return best
        # groups usable in both children must be split; the rest is forced
        both = [
            gi
            for gi, members in enumerate(self.groups)
            if dem[gi]
            and any(self.pieces[p].fits(*child1) for p in members)
            and any(self.pieces[p].fits(*child2) for p in members)
        ]
        if not both:
            return max(best, full1 + full2)
        ranges = [range(dem[gi] + 1) for gi in both]
        for combo in product(*ranges):
            d1 = list(dem)
            d2 = list(dem)
            for gi, take in zip(both, combo):
                d1[gi] = take
                d2[gi] = dem[gi] - take
            got = self.value(child1, tuple(d1))
            if got + full2 <= best:
                continue
            got += self.value(child2, tuple(d2))
            if got > best:
                best = got
        return best


def _check_preconditions(inst: Instance, demand_bound: int, budget: int) -> None:
    total = sum(inst.pieces[members[0]].demand for members in inst.demand_groups())
    if total > demand_bound:
        raise ValueError(
            f"total demand {total} exceeds the exact-search bound {demand_bound}"
        )
    if budget <= 0:
        raise ValueError("budget must be positive")


def oracle_optimal(
    inst: Instance,
    *,
    budget: int = DEFAULT_BUDGET,
    demand_bound: int = DEFAULT_DEMAND_BOUND,
) -> int:
    """Exact optimum of the guillotine cutting instance (fixed orientation).

    Run after rotation expansion when rotation matters; twin pairs share
    demand.  Raises OracleBudgetError instead of approximating.
    """
    _check_preconditions(inst, demand_bound, budget)
    search = _Search(inst, budget)
    dem = tuple(inst.pieces[members[0]].demand for members in inst.demand_groups())
    return search.value((inst.plate_length, inst.plate_width), dem)


def oracle_feasible(
    pieces: Sequence[PieceType],
    plate: tuple[int, int],
    *,
    budget: int = DEFAULT_BUDGET,
    demand_bound: int = DEFAULT_DEMAND_BOUND,
) -> bool:
    """Can every piece copy be cut from the plate with guillotine cuts?"""
    if any(not p.fits(*plate) for p in pieces):
        return False
    unit = tuple(replace(p, profit=1) for p in pieces)
    inst = Instance(plate[0], plate[1], unit, rotation_allowed=False)
    total = sum(inst.pieces[members[0]].demand for members in inst.demand_groups())
    value = oracle_optimal(inst, budget=budget, demand_bound=demand_bound)
    return value == total
