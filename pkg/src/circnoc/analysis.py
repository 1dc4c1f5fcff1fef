"""Quantitative models: routing efficiency, wrap counting, memory and chip cost.

The efficiency criterion K relates an algorithm's total hop count from a
source to the breadth-first shortest-path total; K == 1.0 means every
route is shortest.  Memory formulas give the per-network storage bits of
each routing strategy, and the quadratic resource curves estimate ALM and
register consumption of synthesized routers, which in turn bounds how
many routers fit on a chip under a budget fraction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .errors import ValidationError
from .routing import (
    ALGORITHMS,
    CORRECTED,
    AdaptiveMode,
    RouteTrace,
    RouterConfig,
    candidate_form_hops,
    payload_bits,
    trace_route,
)
from .topology import bfs_distances, build_circulant, circulant_distance_profile

__all__ = [
    "RESOURCES",
    "EfficiencyReport",
    "MemoryReport",
    "CycleReport",
    "QuadraticCost",
    "ResourceModel",
    "DEFAULT_RESOURCE_MODEL",
    "ChipProfile",
    "CapacityReport",
    "efficiency_k",
    "route_cycle_count",
    "cycle_report",
    "max_cycle_count",
    "table_memory_bits",
    "clockwise_memory_bits",
    "adaptive_memory_bits",
    "memory_report",
    "format_memory_csv",
    "resource_usage",
    "chip_capacity",
]

RESOURCES = ("alm", "register")


@dataclass(frozen=True)
class EfficiencyReport:
    """Ratio of algorithm hops to shortest-path hops from one source."""

    k: float
    hops_algorithm: int
    hops_oracle: int
    source: int


@dataclass(frozen=True)
class MemoryReport:
    """Storage bits required by each routing strategy on an n-node network."""

    n: int
    payload_bits: int
    table_bits: int
    clockwise_bits: int
    adaptive_bits: int


@dataclass(frozen=True)
class CycleReport:
    """Ring wraps needed by shortest routes from node 0 to each destination."""

    n: int
    s2: int
    per_destination: tuple[int, ...]

    @property
    def max_cycles(self) -> int:
        return max(self.per_destination)


def efficiency_k(
    cfg: RouterConfig,
    algorithm: str,
    mode: AdaptiveMode = CORRECTED,
    source: int = 0,
) -> EfficiencyReport:
    """Efficiency criterion K = (algorithm hops) / (shortest-path hops).

    Both totals sum routes from ``source`` to every other node; the
    shortest-path side comes from breadth-first search on the built graph.
    """
    oracle = bfs_distances(build_circulant(cfg.spec), source)
    hops_oracle = sum(oracle)
    hops_algorithm = 0
    for dest in range(cfg.n):
        if dest != source:
            hops_algorithm += trace_route(algorithm, source, dest, cfg, mode).hops
    return EfficiencyReport(
        k=hops_algorithm / hops_oracle,
        hops_algorithm=hops_algorithm,
        hops_oracle=hops_oracle,
        source=source,
    )


def route_cycle_count(trace: RouteTrace, n: int | None = None) -> int:
    """Full ring wraps of a route's net signed displacement.

    Sums the signed generatrix steps along the trace and counts how many
    times the total crosses the ring size.
    """
    if n is None:
        n = trace.n
    steps = (trace.s1, trace.s2, -trace.s1, -trace.s2)
    total = sum(steps[port] for port in trace.ports)
    return abs(total) // n


def cycle_report(cfg: RouterConfig, max_wraps: int | None = None) -> CycleReport:
    """Minimum wraps at which a shortest route exists, per destination.

    For each destination offset the candidate scan of both directions is
    extended wrap by wrap until the closed-form length can no longer reach
    the breadth-first distance; the first wrap count achieving it wins.
    """
    n, s2 = cfg.n, cfg.s2
    profile = circulant_distance_profile(n, (cfg.s1, s2))
    per = [0] * n
    for offset in range(1, n):
        d = profile[offset]
        best_m: int | None = None
        for base in (offset, n - offset):
            m = 0
            while (base + m * n) // s2 <= d:
                if max_wraps is not None and m > max_wraps:
                    break
                first, second = candidate_form_hops(base + m * n, s2)
                if first == d or second == d:
                    if best_m is None or m < best_m:
                        best_m = m
                    break
                m += 1
        if best_m is None:
            raise AssertionError(
                f"no candidate reaches distance {d} for offset {offset} in {cfg}"
            )  # pragma: no cover
        per[offset] = best_m
    return CycleReport(n=n, s2=s2, per_destination=tuple(per))


def max_cycle_count(cfg: RouterConfig) -> int:
    """Largest wrap count any destination needs for a shortest route."""
    return cycle_report(cfg).max_cycles


def _ceil_log2(value: int) -> int:
    return (value - 1).bit_length()


def table_memory_bits(n: int, p: int = 4) -> int:
    """Network-wide table storage: n**2 entries of ceil(log2(p)) bits."""
    if n < 2:
        raise ValidationError(f"need at least 2 nodes, got {n}")
    if p < 2:
        raise ValidationError(f"need at least 2 ports, got {p}")
    return n * n * _ceil_log2(p)


def _generatrix_bits(n: int) -> int:
    # Bits to store a value below n/2: ceil(log2(n/2)) == ceil(log2(n)) - 1,
    # which also covers odd n where n/2 is fractional.
    return _ceil_log2(n) - 1


def clockwise_memory_bits(n: int) -> int:
    """Per-network clockwise storage: node count plus s2 in every router."""
    if n < 4:
        raise ValidationError(f"need at least 4 nodes, got {n}")
    return n * (_ceil_log2(n) + _generatrix_bits(n))


def adaptive_memory_bits(n: int) -> int:
    """Per-network adaptive storage: router id, node count, and s2."""
    if n < 4:
        raise ValidationError(f"need at least 4 nodes, got {n}")
    return n * (2 * _ceil_log2(n) + _generatrix_bits(n))


def memory_report(n: int, p: int = 4) -> MemoryReport:
    """All memory figures for one network size."""
    return MemoryReport(
        n=n,
        payload_bits=payload_bits(n),
        table_bits=table_memory_bits(n, p),
        clockwise_bits=clockwise_memory_bits(n),
        adaptive_bits=adaptive_memory_bits(n),
    )


def format_memory_csv(reports: list[MemoryReport]) -> str:
    """CSV rows ``n,payload_bits,table_bits,clockwise_bits,adaptive_bits``."""
    lines = ["n,payload_bits,table_bits,clockwise_bits,adaptive_bits"]
    for r in reports:
        lines.append(
            f"{r.n},{r.payload_bits},{r.table_bits},{r.clockwise_bits},{r.adaptive_bits}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class QuadraticCost:
    """Quadratic cost curve a0 + a1*x + a2*x**2 over the router count x."""

    a0: float
    a1: float
    a2: float

    def usage(self, x: int) -> float:
        return self.a0 + self.a1 * x + self.a2 * x * x


@dataclass(frozen=True)
class ResourceModel:
    """Per-(algorithm, resource) quadratic cost curves."""

    curves: Mapping[tuple[str, str], QuadraticCost]

    def curve(self, algorithm: str, resource: str) -> QuadraticCost:
        if algorithm not in ALGORITHMS:
            raise ValidationError(
                f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}"
            )
        if resource not in RESOURCES:
            raise ValidationError(
                f"unknown resource {resource!r}; expected one of {RESOURCES}"
            )
        return self.curves[(algorithm, resource)]


# Fitted synthesis cost constants, kept at three decimals as published.
# The adaptive register curve coincides with the table one as printed.
DEFAULT_RESOURCE_MODEL = ResourceModel(
    curves={
        ("table", "alm"): QuadraticCost(-74.354, 15.537, 0.464),
        ("table", "register"): QuadraticCost(1163.150, -9.069, 2.940),
        ("clockwise", "alm"): QuadraticCost(-93.577, 22.553, 0.434),
        ("clockwise", "register"): QuadraticCost(-43.664, 21.039, 0.270),
        ("adaptive", "alm"): QuadraticCost(-6237.760, 684.297, 3.329),
        ("adaptive", "register"): QuadraticCost(1163.150, -9.069, 2.940),
    }
)


@dataclass(frozen=True)
class ChipProfile:
    """Chip resource totals and the fraction granted to the interconnect."""

    alm_total: int = 113560
    reg_total: int = 12492800
    budget_fraction: float = 0.35

    def __post_init__(self) -> None:
        if self.alm_total < 1 or self.reg_total < 1:
            raise ValidationError("chip resource totals must be positive")
        if not 0.0 < self.budget_fraction <= 1.0:
            raise ValidationError(
                f"budget fraction must be in (0, 1], got {self.budget_fraction}"
            )


@dataclass(frozen=True)
class CapacityReport:
    """Largest router count fitting a chip budget, with the binding resource."""

    algorithm: str
    alm_total: int
    reg_total: int
    budget_fraction: float
    max_routers: int
    binding_resource: str
    alm_used: float
    reg_used: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "algorithm": self.algorithm,
                "alm_total": self.alm_total,
                "reg_total": self.reg_total,
                "budget_fraction": self.budget_fraction,
                "max_routers": self.max_routers,
                "binding_resource": self.binding_resource,
                "alm_used": self.alm_used,
                "reg_used": self.reg_used,
            }
        )


def resource_usage(model: ResourceModel, algorithm: str, resource: str, x: int) -> float:
    """Estimated resource units consumed by an x-router network.

    Small x may evaluate negative; the regression is reported as-is.
    """
    if x < 1:
        raise ValidationError(f"router count must be >= 1, got {x}")
    return model.curve(algorithm, resource).usage(x)


_CAPACITY_SCAN_LIMIT = 10_000_000


def chip_capacity(
    model: ResourceModel,
    algorithm: str,
    profile: ChipProfile = ChipProfile(),
) -> CapacityReport:
    """Largest router count whose ALM and register usage both fit the budget.

    The curves increase over the feasible region, so an upward linear scan
    stops at the first infeasible count; that count's worst-overrun
    resource is reported as binding.  No feasible count yields zero.
    """
    alm_curve = model.curve(algorithm, "alm")
    reg_curve = model.curve(algorithm, "register")
    alm_budget = profile.budget_fraction * profile.alm_total
    reg_budget = profile.budget_fraction * profile.reg_total

    def overruns(x: int) -> dict[str, float]:
        out = {}
        alm = alm_curve.usage(x)
        reg = reg_curve.usage(x)
        if alm > alm_budget:
            out["alm"] = alm / alm_budget
        if reg > reg_budget:
            out["register"] = reg / reg_budget
        return out

    x = 1
    while not overruns(x):
        x += 1
        if x > _CAPACITY_SCAN_LIMIT:  # pragma: no cover
            raise RuntimeError(f"capacity scan for {algorithm} did not terminate")
    failed = overruns(x)
    binding = max(failed, key=lambda r: failed[r])
    max_routers = x - 1
    report_x = max_routers if max_routers >= 1 else 1
    return CapacityReport(
        algorithm=algorithm,
        alm_total=profile.alm_total,
        reg_total=profile.reg_total,
        budget_fraction=profile.budget_fraction,
        max_routers=max_routers,
        binding_resource=binding,
        alm_used=alm_curve.usage(report_x),
        reg_used=reg_curve.usage(report_x),
    )
