"""Benchmark harness: model matrices over variants and seeds, CSV and figures.

Each run builds the graph and model for one (instance, variant, seed)
combination and optionally solves it.  Timeout runs are recorded at the
limit value so aggregate times stay comparable.  Stats-only reports zero
the timing fields, which keeps the CSV byte-identical across repeats.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .enumeration import enumerate_bba, enumerate_fmt
from .hybridise import HybridisationConfig
from .instance import Instance
from .model import build_model, model_stats
from .oracle import oracle_optimal
from .solve import SolveTimeout, solve_model

SCHEMA = "gcut-report-v1"

VARIANTS = ("N.H.", "C.H.", "A.H.")
VARIANT_MODES = {"N.H.": "none", "C.H.": "conservative", "A.H.": "aggressive"}

CSV_COLUMNS = (
    "instance",
    "variant",
    "seed",
    "build_time",
    "solve_time",
    "status",
    "objective",
    "extractions",
    "cuts",
    "hybridised",
    "single_residual",
    "h_pct",
    "k_pct",
    "plates",
)


@dataclass(frozen=True)
class RunRecord:
    instance: str
    variant: str
    seed: int
    build_time: float
    solve_time: float
    status: str
    objective: float | None
    extractions: int
    cuts: int
    hybridised: int
    single_residual: int
    plates: int

    @property
    def h_pct(self) -> float:
        return 100.0 * self.hybridised / self.cuts if self.cuts else 0.0

    @property
    def k_pct(self) -> float:
        return 100.0 * self.single_residual / self.cuts if self.cuts else 0.0

    @property
    def time(self) -> float:
        return self.build_time + self.solve_time


@dataclass(frozen=True)
class RunReport:
    records: tuple[RunRecord, ...]
    time_limit: float | None = None


def run_single(
    name: str,
    inst: Instance,
    variant: str,
    seed: int,
    backend: str | None,
    *,
    formulation: str = "bba",
    binding: bool = False,
    time_limit: float | None = None,
) -> RunRecord:
    mode = VARIANT_MODES[variant]
    cfg = HybridisationConfig(mode=mode, binding=binding and mode != "none")
    enumerate_graph = enumerate_bba if formulation == "bba" else enumerate_fmt
    start = time.perf_counter()
    g = enumerate_graph(inst, hybrid=mode)
    m = build_model(g, inst, cfg)
    build_time = time.perf_counter() - start
    stats = g.stats
    record = dict(
        instance=name,
        variant=variant,
        seed=seed,
        extractions=stats["extractions"],
        cuts=stats["cuts"],
        hybridised=stats["hybridised"],
        single_residual=stats["single_residual"],
        plates=stats["plates"],
    )
    if backend is None:
        return RunRecord(
            build_time=0.0, solve_time=0.0, status="stats-only", objective=None, **record
        )
    start = time.perf_counter()
    if backend == "oracle":
        objective: float | None = float(oracle_optimal(inst))
        status = "optimal"
    else:
        try:
            assignment = solve_model(
                m, backend, mode="mip", time_limit=time_limit, seed=seed
            )
            objective, status = assignment.objective, assignment.status
        except SolveTimeout:
            objective, status = None, "timeout"
        except Exception as exc:  # per-run failures are data, not crashes
            objective, status = None, f"error({type(exc).__name__})"
    solve_time = time.perf_counter() - start
    if status == "timeout" and time_limit is not None:
        solve_time = time_limit
    return RunRecord(
        build_time=build_time,
        solve_time=solve_time,
        status=status,
        objective=objective,
        **record,
    )


def _run_task(task) -> tuple[int, RunRecord]:
    index, args, kwargs = task
    return index, run_single(*args, **kwargs)


def run_matrix(
    instances: Sequence[tuple[str, Instance]],
    variants: Sequence[str] = VARIANTS,
    seeds: Sequence[int] = (0,),
    backend: str | None = None,
    *,
    formulation: str = "bba",
    binding: bool = False,
    time_limit: float | None = None,
    jobs: int = 1,
) -> RunReport:
    """One record per (instance, variant, seed), in deterministic order."""
    for variant in variants:
        if variant not in VARIANT_MODES:
            raise ValueError(f"unknown variant {variant!r}")
    kwargs = dict(formulation=formulation, binding=binding, time_limit=time_limit)
    tasks = []
    for name, inst in instances:
        for variant in variants:
            for seed in seeds:
                tasks.append((len(tasks), (name, inst, variant, seed, backend), kwargs))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
        results.sort(key=lambda pair: pair[0])
        records = tuple(record for _, record in results)
    else:
        records = tuple(_run_task(task)[1] for task in tasks)
    return RunReport(records=records, time_limit=time_limit)


def _mean_times(report: RunReport) -> dict[tuple[str, str], list[float]]:
    times: dict[tuple[str, str], list[float]] = {}
    for r in report.records:
        times.setdefault((r.instance, r.variant), []).append(r.time)
    return times


def aggregate(report: RunReport, variants: Sequence[str]) -> dict[str, dict[str, float]]:
    """Per-variant aggregate rows: T.T., delta best time, #b, model totals."""
    times = _mean_times(report)
    instances = list(dict.fromkeys(r.instance for r in report.records))
    means = {
        key: statistics.fmean(values) for key, values in times.items()
    }
    out: dict[str, dict[str, float]] = {
        v: dict(total_time=0.0, delta_best=0.0, best=0) for v in variants
    }
    for name in instances:
        have = [v for v in variants if (name, v) in means]
        best = min(means[(name, v)] for v in have)
        winner = next(v for v in have if means[(name, v)] == best)
        out[winner]["best"] += 1
        for v in have:
            out[v]["total_time"] += means[(name, v)]
            out[v]["delta_best"] += means[(name, v)] - best
    first_seed: dict[tuple[str, str], RunRecord] = {}
    for r in report.records:
        first_seed.setdefault((r.instance, r.variant), r)
    for v in variants:
        rows = [rec for key, rec in first_seed.items() if key[1] == v]
        cuts = sum(r.cuts for r in rows)
        out[v]["extractions"] = sum(r.extractions for r in rows)
        out[v]["cuts"] = cuts
        out[v]["plates"] = sum(r.plates for r in rows)
        out[v]["h_pct"] = 100.0 * sum(r.hybridised for r in rows) / cuts if cuts else 0.0
        out[v]["k_pct"] = (
            100.0 * sum(r.single_residual for r in rows) / cuts if cuts else 0.0
        )
    return out


def objective_mismatches(report: RunReport) -> list[tuple[str, dict[str, float]]]:
    """Instances whose variants disagree on the solved objective."""
    by_instance: dict[str, dict[str, float]] = {}
    for r in report.records:
        if r.objective is not None:
            by_instance.setdefault(r.instance, {})[r.variant] = r.objective
    return [
        (name, values)
        for name, values in by_instance.items()
        if len(set(values.values())) > 1
    ]


def summarize(report: RunReport, variants: Sequence[str] = VARIANTS) -> str:
    """Aggregate table plus per-instance means and coefficients of variation."""
    variants = [v for v in variants if any(r.variant == v for r in report.records)]
    rows = aggregate(report, variants)
    lines = [
        "| Variant | T.T. | d B.T. | #b | #extr. | #cuts | h % | k % | #plates |",
        "|---------|------|--------|----|--------|-------|-----|-----|---------|",
    ]
    for v in variants:
        a = rows[v]
        lines.append(
            f"| {v} | {a['total_time']:.3f} | {a['delta_best']:.3f} | {a['best']:.0f} "
            f"| {a['extractions']:.0f} | {a['cuts']:.0f} | {a['h_pct']:.2f} "
            f"| {a['k_pct']:.2f} | {a['plates']:.0f} |"
        )
    times = _mean_times(report)
    instances = list(dict.fromkeys(r.instance for r in report.records))
    lines.append("")
    lines.append("| Instance | " + " | ".join(f"{v} mean | {v} CV%" for v in variants) + " |")
    lines.append("|" + "---|" * (1 + 2 * len(variants)))
    for name in instances:
        cells = []
        for v in variants:
            values = times.get((name, v), [])
            if not values:
                cells += ["-", "-"]
                continue
            mean = statistics.fmean(values)
            cv = 100.0 * statistics.pstdev(values) / mean if mean > 0 else 0.0
            cells += [f"{mean:.3f}", f"{cv:.1f}"]
        lines.append(f"| {name} | " + " | ".join(cells) + " |")
    mismatches = objective_mismatches(report)
    if mismatches:
        lines.append("")
        lines.append("objective mismatches across variants:")
        for name, values in mismatches:
            parts = ", ".join(f"{v}={values[v]:g}" for v in variants if v in values)
            lines.append(f"  {name}: {parts}")
    return "\n".join(lines) + "\n"


def write_csv(report: RunReport, path: str | Path) -> None:
    lines = [f"# {SCHEMA}", ",".join(CSV_COLUMNS)]
    for r in report.records:
        lines.append(
            ",".join(
                (
                    r.instance,
                    r.variant,
                    str(r.seed),
                    f"{r.build_time:.6f}",
                    f"{r.solve_time:.6f}",
                    r.status,
                    "" if r.objective is None else f"{r.objective:g}",
                    str(r.extractions),
                    str(r.cuts),
                    str(r.hybridised),
                    str(r.single_residual),
                    f"{r.h_pct:.4f}",
                    f"{r.k_pct:.4f}",
                    str(r.plates),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_figures(
    report: RunReport, prefix: str | Path, variants: Sequence[str] = VARIANTS
) -> list[Path]:
    """Bar charts of aggregate times and model sizes next to the CSV output."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    variants = [v for v in variants if any(r.variant == v for r in report.records)]
    rows = aggregate(report, variants)
    prefix = Path(prefix)
    written: list[Path] = []

    if any(rows[v]["total_time"] > 0 for v in variants):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
        ax1.bar(variants, [rows[v]["total_time"] for v in variants], color="#5b8db8")
        ax1.set_ylabel("total time [s]")
        ax1.set_title("T.T.")
        ax2.bar(variants, [rows[v]["delta_best"] for v in variants], color="#b85b5b")
        ax2.set_ylabel("time behind best [s]")
        ax2.set_title("d B.T.")
        fig.tight_layout()
        path = prefix.with_name(prefix.name + "_times.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    width = 0.25
    for offset, key, label in ((-1, "cuts", "#cuts"), (0, "extractions", "#extr."), (1, "plates", "#plates")):
        ax1.bar(
            [i + offset * width for i in range(len(variants))],
            [rows[v][key] for v in variants],
            width=width,
            label=label,
        )
    ax1.set_xticks(range(len(variants)), variants)
    ax1.set_yscale("log")
    ax1.legend(fontsize=8)
    ax1.set_title("model size")
    for offset, key, label in ((-0.5, "h_pct", "h %"), (0.5, "k_pct", "k %")):
        ax2.bar(
            [i + offset * width for i in range(len(variants))],
            [rows[v][key] for v in variants],
            width=width,
            label=label,
        )
    ax2.set_xticks(range(len(variants)), variants)
    ax2.set_ylabel("% of cuts")
    ax2.legend(fontsize=8)
    ax2.set_title("hybridisation share")
    fig.tight_layout()
    path = prefix.with_name(prefix.name + "_model.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
