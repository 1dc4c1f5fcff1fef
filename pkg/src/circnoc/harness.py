"""Batch experiment runner and termination fuzzer.

``run_experiment`` regenerates the comparison datasets (topology metrics,
wrap-count sweeps, efficiency curves, memory and resource tables, chip
capacity) as deterministic CSV or JSON artifacts; re-running a config
reproduces identical bytes.  ``fuzz_termination`` hammers the three
routing algorithms with seeded random tuples and reports any hop-limit
violation with its full reproduction tuple.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .analysis import (
    DEFAULT_RESOURCE_MODEL,
    ChipProfile,
    chip_capacity,
    efficiency_k,
    max_cycle_count,
    memory_report,
    resource_usage,
)
from .errors import LivelockError, ValidationError
from .routing import ALGORITHMS, CORRECTED, AdaptiveMode, RouterConfig, trace_route
from .topology import SELECTION_RULES, compare_topologies, search_best_ring_circulant

__all__ = [
    "FIGURES",
    "REFERENCE_FIRST_N_OVER_TWO_CYCLES",
    "ExperimentConfig",
    "ExperimentResult",
    "FuzzConfig",
    "FuzzReport",
    "run_experiment",
    "fuzz_termination",
    "square_sizes",
]

FIGURES = ("topology_metrics", "cycles", "efficiency", "memory", "resources", "capacity")

# Reference value: first network size whose best ring circulant needs more
# than two wraps on some shortest route.  The cycles experiment logs how
# the sweep under this package's selection rule compares against it.
REFERENCE_FIRST_N_OVER_TWO_CYCLES = 174

_FIGURE_COLUMNS = {
    "topology_metrics": (
        "n", "selection", "s1", "s2", "circ_D", "circ_Lav", "mesh_D", "mesh_Lav",
        "torus_D", "torus_Lav", "redD_vs_mesh", "redD_vs_torus",
        "redLav_vs_mesh", "redLav_vs_torus",
    ),
    "cycles": ("n", "s2", "max_cycles"),
    "efficiency": ("n", "s2", "algorithm", "K"),
    "memory": ("n", "payload_bits", "table_bits", "clockwise_bits", "adaptive_bits"),
    "resources": ("x", "algorithm", "alm", "registers"),
    "capacity": (
        "algorithm", "alm_total", "reg_total", "budget_fraction",
        "max_routers", "binding_resource", "alm_used", "reg_used",
    ),
}


def square_sizes(min_side: int = 3, max_side: int = 23) -> tuple[int, ...]:
    """Square node counts side**2 for side in [min_side, max_side]."""
    return tuple(side * side for side in range(min_side, max_side + 1))


@dataclass(frozen=True)
class ExperimentConfig:
    """One dataset regeneration request.

    ``values`` are sides for ``topology_metrics``, network sizes for
    ``cycles``/``efficiency``/``memory``, router counts for ``resources``,
    and unused for ``capacity``.  Figures that route packets require the
    ``best_ring`` selection rule, since the other rules may pick
    circulants without the unit generatrix.
    """

    figure: str
    values: tuple[int, ...] = ()
    selection: str = "best_ring"
    mode: AdaptiveMode = CORRECTED
    algorithms: tuple[str, ...] = ALGORITHMS
    out_path: str | Path | None = None
    out_format: str = "csv"

    def __post_init__(self) -> None:
        if self.figure not in FIGURES:
            raise ValidationError(f"unknown figure {self.figure!r}; expected one of {FIGURES}")
        if self.figure != "capacity" and not self.values:
            raise ValidationError(f"figure {self.figure!r} needs a non-empty value range")
        if self.selection not in SELECTION_RULES:
            raise ValidationError(
                f"unknown selection rule {self.selection!r}; expected one of {sorted(SELECTION_RULES)}"
            )
        if self.figure in ("cycles", "efficiency") and self.selection != "best_ring":
            raise ValidationError(
                f"figure {self.figure!r} routes packets and requires best_ring selection"
            )
        if self.out_format not in ("csv", "json"):
            raise ValidationError(f"unknown output format {self.out_format!r}")
        if self.figure == "capacity" and self.out_format != "json":
            raise ValidationError("the capacity report is a JSON artifact")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValidationError(f"unknown algorithms {unknown}")


@dataclass(frozen=True)
class ExperimentResult:
    """Rows plus the rendered artifact text of one experiment run."""

    figure: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    meta: Mapping[str, object]
    text: str
    path: Path | None


def _thread_count() -> int:
    raw = os.environ.get("CIRCNOC_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn: Callable, items: Sequence) -> list:
    """Apply fn to items, optionally across threads, preserving order."""
    workers = _thread_count()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _rows_topology_metrics(config: ExperimentConfig) -> list[tuple]:
    def one(side: int) -> tuple:
        row = compare_topologies([side], config.selection)[0]
        s1, s2 = row.circulant.generatrices[0], row.circulant.generatrices[-1]
        return (
            row.n, row.selection, s1, s2,
            row.circulant_metrics.diameter, row.circulant_metrics.avg_distance,
            row.mesh_metrics.diameter, row.mesh_metrics.avg_distance,
            row.torus_metrics.diameter, row.torus_metrics.avg_distance,
            row.diameter_reduction_vs_mesh, row.diameter_reduction_vs_torus,
            row.avg_distance_reduction_vs_mesh, row.avg_distance_reduction_vs_torus,
        )

    return _map_ordered(one, sorted(set(config.values)))


def _best_ring_cfg(n: int) -> RouterConfig:
    return RouterConfig.from_spec(search_best_ring_circulant(n))


def _rows_cycles(config: ExperimentConfig) -> tuple[list[tuple], dict]:
    def one(n: int) -> tuple:
        cfg = _best_ring_cfg(n)
        return (n, cfg.s2, max_cycle_count(cfg))

    rows = _map_ordered(one, sorted(set(config.values)))
    first_n = next((n for n, _, cycles in rows if cycles > 2), None)
    meta = {
        "first_n_exceeding_two": first_n,
        "reference_first_n": REFERENCE_FIRST_N_OVER_TWO_CYCLES,
        "matches_reference": first_n == REFERENCE_FIRST_N_OVER_TWO_CYCLES,
    }
    return rows, meta


def _rows_efficiency(config: ExperimentConfig) -> list[tuple]:
    def one(n: int) -> list[tuple]:
        cfg = _best_ring_cfg(n)
        out = []
        for algorithm in config.algorithms:
            report = efficiency_k(cfg, algorithm, config.mode)
            out.append((n, cfg.s2, algorithm, report.k))
        return out

    nested = _map_ordered(one, sorted(set(config.values)))
    return [row for group in nested for row in group]


def _rows_memory(config: ExperimentConfig) -> list[tuple]:
    rows = []
    for n in sorted(set(config.values)):
        r = memory_report(n)
        rows.append((r.n, r.payload_bits, r.table_bits, r.clockwise_bits, r.adaptive_bits))
    return rows


def _rows_resources(config: ExperimentConfig) -> list[tuple]:
    rows = []
    for x in sorted(set(config.values)):
        for algorithm in config.algorithms:
            rows.append(
                (
                    x,
                    algorithm,
                    resource_usage(DEFAULT_RESOURCE_MODEL, algorithm, "alm", x),
                    resource_usage(DEFAULT_RESOURCE_MODEL, algorithm, "register", x),
                )
            )
    return rows


def _rows_capacity(config: ExperimentConfig) -> list[tuple]:
    rows = []
    for algorithm in config.algorithms:
        r = chip_capacity(DEFAULT_RESOURCE_MODEL, algorithm, ChipProfile())
        rows.append(
            (
                r.algorithm, r.alm_total, r.reg_total, r.budget_fraction,
                r.max_routers, r.binding_resource, r.alm_used, r.reg_used,
            )
        )
    return rows


def _render_csv(columns: tuple[str, ...], rows: Iterable[tuple]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(figure: str, columns: tuple[str, ...], rows: Iterable[tuple], meta: Mapping) -> str:
    payload = {
        "figure": figure,
        "columns": list(columns),
        "rows": [list(row) for row in rows],
        "meta": dict(meta),
    }
    return json.dumps(payload, indent=2) + "\n"


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Build one figure dataset and optionally write it to ``out_path``."""
    meta: dict[str, object] = {}
    if config.figure == "topology_metrics":
        rows = _rows_topology_metrics(config)
    elif config.figure == "cycles":
        rows, meta = _rows_cycles(config)
    elif config.figure == "efficiency":
        rows = _rows_efficiency(config)
    elif config.figure == "memory":
        rows = _rows_memory(config)
    elif config.figure == "resources":
        rows = _rows_resources(config)
    else:
        rows = _rows_capacity(config)

    columns = _FIGURE_COLUMNS[config.figure]
    if config.out_format == "csv":
        text = _render_csv(columns, rows)
    else:
        text = _render_json(config.figure, columns, rows, meta)

    path = None
    if config.out_path is not None:
        path = Path(config.out_path)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write experiment artifact to {path}: {exc}") from exc
    return ExperimentResult(
        figure=config.figure,
        columns=columns,
        rows=tuple(rows),
        meta=meta,
        text=text,
        path=path,
    )


@dataclass(frozen=True)
class FuzzConfig:
    """Seeded random routing workload; identical seeds replay identically."""

    seed: int
    trials: int = 10_000
    n_min: int = 5
    n_max: int = 300
    hop_limit_factor: int = 2

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.n_min < 5:
            raise ValidationError(f"n_min must be >= 5, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ValidationError(f"n_max {self.n_max} below n_min {self.n_min}")
        if self.hop_limit_factor < 1:
            raise ValidationError("hop_limit_factor must be >= 1")


@dataclass(frozen=True)
class FuzzReport:
    """Outcome of a termination fuzz run."""

    seed: int
    trials: int
    n_min: int
    n_max: int
    hop_limit_factor: int
    livelocks: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def livelock_count(self) -> int:
        return len(self.livelocks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "trials": self.trials,
                "n_min": self.n_min,
                "n_max": self.n_max,
                "hop_limit_factor": self.hop_limit_factor,
                "livelock_count": self.livelock_count,
                "livelocks": list(self.livelocks),
            },
            indent=2,
        ) + "\n"


def fuzz_termination(config: FuzzConfig) -> FuzzReport:
    """Route seeded random (n, s2, src, dst, algorithm) tuples to completion.

    Every trace must finish within ``hop_limit_factor * n`` hops; any
    violation is recorded with the tuple needed to reproduce it.
    """
    rng = random.Random(config.seed)
    livelocks = []
    for trial in range(config.trials):
        n = rng.randint(config.n_min, config.n_max)
        s2 = rng.randint(2, (n - 1) // 2)
        src = rng.randrange(n)
        dst = rng.randrange(n)
        algorithm = ALGORITHMS[rng.randrange(len(ALGORITHMS))]
        cfg = RouterConfig(n, 1, s2)
        try:
            trace_route(
                algorithm, src, dst, cfg, CORRECTED,
                hop_limit=config.hop_limit_factor * n,
            )
        except LivelockError:
            livelocks.append(
                {
                    "trial": trial,
                    "n": n,
                    "s2": s2,
                    "src": src,
                    "dst": dst,
                    "algorithm": algorithm,
                }
            )
    return FuzzReport(
        seed=config.seed,
        trials=config.trials,
        n_min=config.n_min,
        n_max=config.n_max,
        hop_limit_factor=config.hop_limit_factor,
        livelocks=tuple(livelocks),
    )
