"""Routing strategies for ring circulants C(n; 1, s2).

Three per-hop strategies share one four-port router model:

* ``table``     -- next hops precomputed from shortest-path distances and
                   stored per (source, destination) pair;
* ``clockwise`` -- one-direction iterative arithmetic on the label
                   difference, cheap to evaluate but not always shortest;
* ``adaptive``  -- bidirectional candidate search that also weighs routes
                   wrapping past the ring's reference point, shortest as
                   long as the needed wrap count stays within its bound.

Ports are numbered clockwise: 0 -> +s1, 1 -> +s2, 2 -> -s1, 3 -> -s2.
Everything here is a pure function of its inputs; tables and traces are
immutable once built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import LivelockError, ValidationError
from .topology import CirculantSpec, circulant_distance_profile

__all__ = [
    "ALGORITHMS",
    "ADAPTIVE_VARIANTS",
    "RouterConfig",
    "AdaptiveMode",
    "CORRECTED",
    "AS_PRINTED",
    "RoutingTable",
    "RouteTrace",
    "HeadFlitAddress",
    "head_flit_address",
    "payload_bits",
    "port_for_step",
    "step_for_port",
    "build_routing_table",
    "table_next_hop",
    "clockwise_step",
    "clockwise_hop_count",
    "step_cycles",
    "adaptive_step",
    "trace_route",
    "candidate_form_hops",
    "candidate_hop_counts",
    "arithmetic_min_hops",
]

ALGORITHMS = ("table", "clockwise", "adaptive")
ADAPTIVE_VARIANTS = ("printed", "corrected")


@dataclass(frozen=True)
class RouterConfig:
    """Ring circulant routing parameters: n nodes, generatrices 1 and s2.

    Routing arithmetic requires the unit first generatrix and s2 strictly
    below n/2 (so s2 fits in the address-difference field).
    """

    n: int
    s1: int
    s2: int

    def __post_init__(self) -> None:
        if self.s1 != 1:
            raise ValidationError(f"first generatrix must be 1, got {self.s1}")
        if self.s2 < 2:
            raise ValidationError(f"second generatrix must be >= 2, got {self.s2}")
        if 2 * self.s2 >= self.n:
            raise ValidationError(
                f"second generatrix {self.s2} must be below n/2 = {self.n / 2}"
            )

    @classmethod
    def from_spec(cls, spec: CirculantSpec) -> "RouterConfig":
        if spec.k != 2 or not spec.is_ring:
            raise ValidationError(f"routing requires a ring circulant C(n; 1, s2), got {spec}")
        return cls(spec.n, spec.generatrices[0], spec.generatrices[1])

    @property
    def spec(self) -> CirculantSpec:
        return CirculantSpec(self.n, (self.s1, self.s2))

    def port_steps(self) -> tuple[int, int, int, int]:
        """Signed node-label steps by port number (clockwise numbering)."""
        return (self.s1, self.s2, -self.s1, -self.s2)

    def __str__(self) -> str:
        return f"C({self.n}; {self.s1}, {self.s2})"


@dataclass(frozen=True)
class AdaptiveMode:
    """Adaptive routing variant and wrap bound.

    ``corrected`` seeds the counter-clockwise candidate scan with n - S;
    ``printed`` keeps the S + n seed of the original listing, preserved
    for fidelity checks (it can pick a wrong-direction first step).
    ``max_cycles`` bounds how many full ring wraps the candidate scan
    considers in each direction; circulants with a large generatrix can
    need well past the default of 2 before every route is shortest.
    """

    variant: str = "corrected"
    max_cycles: int = 2

    def __post_init__(self) -> None:
        if self.variant not in ADAPTIVE_VARIANTS:
            raise ValidationError(
                f"unknown adaptive variant {self.variant!r}; expected one of {ADAPTIVE_VARIANTS}"
            )
        if self.max_cycles < 2:
            raise ValidationError(f"max_cycles must be >= 2, got {self.max_cycles}")

    @property
    def corrected(self) -> bool:
        return self.variant == "corrected"


CORRECTED = AdaptiveMode("corrected", 2)
AS_PRINTED = AdaptiveMode("printed", 2)


@dataclass(frozen=True)
class RoutingTable:
    """N x N next-hop port matrix; the diagonal is undefined (None)."""

    cfg: RouterConfig
    entries: tuple[tuple[int | None, ...], ...]

    @property
    def n(self) -> int:
        return self.cfg.n

    def port(self, current: int, dest: int) -> int:
        _check_node(current, self.n, "current")
        _check_node(dest, self.n, "dest")
        if current == dest:
            raise ValidationError(f"packet already delivered: node {current}")
        port = self.entries[current][dest]
        assert port is not None
        return port

    def to_csv(self) -> str:
        """CSV rows ``from,to,port`` sorted by (from, to)."""
        lines = ["from,to,port"]
        for u in range(self.n):
            for v in range(self.n):
                if u != v:
                    lines.append(f"{u},{v},{self.entries[u][v]}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RouteTrace:
    """Ordered node and port sequence of one routed packet."""

    algorithm: str
    n: int
    s1: int
    s2: int
    src: int
    dst: int
    nodes: tuple[int, ...]
    ports: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.ports)

    def to_json(self) -> str:
        return json.dumps(
            {
                "algorithm": self.algorithm,
                "n": self.n,
                "s1": self.s1,
                "s2": self.s2,
                "src": self.src,
                "dst": self.dst,
                "nodes": list(self.nodes),
                "ports": list(self.ports),
                "hops": self.hops,
            }
        )


def _check_node(value: int, n: int, name: str) -> None:
    if not 0 <= value < n:
        raise ValidationError(f"{name} {value} out of range [0, {n})")


def payload_bits(n: int) -> int:
    """Head-flit address field width: ceil(log2(n)) bits."""
    if n < 2:
        raise ValidationError(f"need at least 2 nodes to address, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class HeadFlitAddress:
    """Address payload carried by a packet's head flit.

    Table and adaptive routing transmit the destination id; clockwise
    routing transmits the residual label difference instead.  Either way
    the value fits the ceil(log2(n))-bit address field.
    """

    algorithm: str
    value: int
    bits: int


def head_flit_address(algorithm: str, src: int, dst: int, cfg: RouterConfig) -> HeadFlitAddress:
    """Initial head-flit payload for a packet from src to dst."""
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    _check_node(src, cfg.n, "src")
    _check_node(dst, cfg.n, "dst")
    value = (dst - src) % cfg.n if algorithm == "clockwise" else dst
    return HeadFlitAddress(algorithm=algorithm, value=value, bits=payload_bits(cfg.n))


def port_for_step(delta: int, cfg: RouterConfig) -> int:
    """Port number that realizes a signed generatrix step."""
    steps = cfg.port_steps()
    try:
        return steps.index(delta)
    except ValueError:
        raise ValidationError(
            f"step {delta} is not one of +-{cfg.s1}, +-{cfg.s2}"
        ) from None


def step_for_port(port: int, cfg: RouterConfig) -> int:
    """Signed generatrix step realized by a port number."""
    if not 0 <= port <= 3:
        raise ValidationError(f"port {port} out of range [0, 3]")
    return cfg.port_steps()[port]


def _shortest_port(profile: tuple[int, ...], steps: tuple[int, int, int, int], offset: int, n: int) -> int:
    """Smallest port whose step moves one hop closer to the given offset."""
    d = profile[offset]
    for port in range(4):
        if profile[(offset - steps[port]) % n] == d - 1:
            return port
    raise AssertionError(f"no descending port at offset {offset}")  # pragma: no cover


def build_routing_table(cfg: RouterConfig) -> RoutingTable:
    """Precompute next-hop ports for every (source, destination) pair.

    Each entry names a port leading one hop closer to the destination;
    among equally short ports the smallest port number wins.
    """
    n = cfg.n
    profile = circulant_distance_profile(n, (cfg.s1, cfg.s2))
    steps = cfg.port_steps()
    rows = []
    for u in range(n):
        row: list[int | None] = []
        for v in range(n):
            if u == v:
                row.append(None)
            else:
                row.append(_shortest_port(profile, steps, (v - u) % n, n))
        rows.append(tuple(row))
    return RoutingTable(cfg=cfg, entries=tuple(rows))


def table_next_hop(table: RoutingTable, current: int, dest: int) -> tuple[int, int]:
    """Follow the table one hop: returns (next node, port taken)."""
    port = table.port(current, dest)
    nxt = (current + step_for_port(port, table.cfg)) % table.n
    return nxt, port


def clockwise_step(current: int, dest: int, cfg: RouterConfig) -> int:
    """One hop of clockwise routing; returns the next node (or current at dest).

    The label difference S = (dest - current) mod n picks the direction:
    forward while S <= n/2, backward otherwise, using the long generatrix
    whenever the residual difference still covers it.
    """
    n = cfg.n
    _check_node(current, n, "current")
    _check_node(dest, n, "dest")
    s = (dest - current) % n
    if s == 0:
        return current
    if 2 * s <= n:
        step = cfg.s2 if s >= cfg.s2 else cfg.s1
    else:
        back = n - s
        step = -cfg.s2 if back >= cfg.s2 else -cfg.s1
    return (current + step) % n


def clockwise_hop_count(src: int, dst: int, cfg: RouterConfig) -> int:
    """Closed-form clockwise route length.

    Forward regime (S <= n/2): floor(S/s2) + S mod s2; backward regime
    mirrors with S' = n - S.  Each hop strictly shrinks the residual, so
    the iterative route has exactly this length.
    """
    n = cfg.n
    _check_node(src, n, "src")
    _check_node(dst, n, "dst")
    s = (dst - src) % n
    if s == 0:
        return 0
    if 2 * s > n:
        s = n - s
    return s // cfg.s2 + s % cfg.s2


def candidate_form_hops(target: int, s2: int) -> tuple[int, int]:
    """Hop counts of the two route shapes covering a displacement ``target``.

    With q, r = divmod(target, s2): either q long steps topped up with r
    unit steps (q + r hops), or q + 1 long steps overshooting and walking
    back s2 - r unit steps (q - r + s2 + 1 hops).
    """
    q, r = divmod(target, s2)
    return q + r, q - r + s2 + 1


def candidate_hop_counts(offset: int, cfg: RouterConfig, max_wraps: int = 4) -> list[tuple[int, int]]:
    """All closed-form candidates for reaching ``offset`` from node 0.

    Enumerates both travel directions and wrap counts m = 0..max_wraps;
    returns (hops, wraps) pairs.  With enough wraps the minimum equals
    the true shortest-path distance.
    """
    n = cfg.n
    if not 1 <= offset < n:
        raise ValidationError(f"offset {offset} out of range [1, {n})")
    out = []
    for base in (offset, n - offset):
        for m in range(max_wraps + 1):
            first, second = candidate_form_hops(base + m * n, cfg.s2)
            out.append((first, m))
            out.append((second, m))
    return out


def arithmetic_min_hops(offset: int, cfg: RouterConfig, max_wraps: int | None = 4) -> int:
    """Minimum closed-form route length to ``offset`` (candidate enumeration).

    With ``max_wraps=None`` wraps are extended until no candidate can beat
    the best found, which makes the result exactly the shortest-path
    distance; a fixed bound may overestimate when large wrap counts win.
    """
    if max_wraps is not None:
        return min(h for h, _ in candidate_hop_counts(offset, cfg, max_wraps))
    n = cfg.n
    if not 1 <= offset < n:
        raise ValidationError(f"offset {offset} out of range [1, {n})")
    best = None
    for base in (offset, n - offset):
        m = 0
        while best is None or (base + m * n) // cfg.s2 <= best:
            first, second = candidate_form_hops(base + m * n, cfg.s2)
            shorter = min(first, second)
            if best is None or shorter < best:
                best = shorter
            m += 1
    return best


def _directional_best(base: int, n: int, s2: int, max_cycles: int) -> tuple[int, bool]:
    """Best candidate length for one travel direction, plus unit-step flag.

    Follows the candidate scan order of the hardware description: the
    unwrapped pair first (where a winning remainder route starts with the
    unit generatrix), then both forms for each extra wrap, replacing the
    best only on strict improvement.  Returns (best length, use unit step).
    """
    q, r = divmod(base, s2)
    first = q + r
    second = q - r + s2 + 1
    if r == 0:
        best, unit = first, False
    elif first < second:
        best, unit = first, True
    else:
        best, unit = second, False
    for m in range(1, max_cycles + 1):
        first, second = candidate_form_hops(base + m * n, s2)
        if first < best:
            best, unit = first, False
        if second < best:
            best, unit = second, False
    return best, unit


def step_cycles(start: int, end: int, cfg: RouterConfig, mode: AdaptiveMode = CORRECTED) -> int:
    """Signed step chosen by the adaptive candidate scan, for start < end.

    Clockwise candidates grow from S = end - start, counter-clockwise ones
    from n - S (or S + n in printed mode), each extended by full wraps up
    to ``mode.max_cycles``.  A clockwise win returns +s1/+s2, otherwise
    the step is negative; ties go counter-clockwise.
    """
    n = cfg.n
    _check_node(start, n, "start")
    _check_node(end, n, "end")
    if start == end:
        raise ValidationError(f"start and end coincide at node {start}")
    if start > end:
        raise ValidationError(f"expects start < end, got {start} > {end}")
    s = end - start
    best_right, unit_right = _directional_best(s, n, cfg.s2, mode.max_cycles)
    left_base = s + n if mode.variant == "printed" else n - s
    best_left, unit_left = _directional_best(left_base, n, cfg.s2, mode.max_cycles)
    if best_right < best_left:
        return cfg.s1 if unit_right else cfg.s2
    return -(cfg.s1 if unit_left else cfg.s2)


def adaptive_step(current: int, dest: int, cfg: RouterConfig, mode: AdaptiveMode = CORRECTED) -> int:
    """One hop of adaptive routing; returns the next node (or current at dest).

    The pair is ordered so the candidate scan works on a positive label
    difference; when the roles are swapped the returned step is applied
    with mirrored sign, then wrapped into [0, n).
    """
    n = cfg.n
    _check_node(current, n, "current")
    _check_node(dest, n, "dest")
    if current == dest:
        return current
    if current > dest:
        return (current - step_cycles(dest, current, cfg, mode)) % n
    return (current + step_cycles(current, dest, cfg, mode)) % n


def _signed_delta(current: int, nxt: int, cfg: RouterConfig) -> int:
    ahead = (nxt - current) % cfg.n
    if ahead == cfg.s1:
        return cfg.s1
    if ahead == cfg.s2:
        return cfg.s2
    if ahead == cfg.n - cfg.s1:
        return -cfg.s1
    if ahead == cfg.n - cfg.s2:
        return -cfg.s2
    raise AssertionError(f"{current} -> {nxt} is not a generatrix step")  # pragma: no cover


def trace_route(
    algorithm: str,
    src: int,
    dst: int,
    cfg: RouterConfig,
    mode: AdaptiveMode = CORRECTED,
    hop_limit: int | None = None,
) -> RouteTrace:
    """Trace a packet from src to dst, recording nodes and ports per hop.

    ``hop_limit`` (default 2n) is a livelock tripwire; exceeding it raises
    ``LivelockError`` naming the algorithm, topology, and pair.
    """
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    n = cfg.n
    _check_node(src, n, "src")
    _check_node(dst, n, "dst")
    if hop_limit is None:
        hop_limit = 2 * n

    if algorithm == "table":
        profile = circulant_distance_profile(n, (cfg.s1, cfg.s2))
        steps = cfg.port_steps()

        def step_fn(cur: int) -> int:
            port = _shortest_port(profile, steps, (dst - cur) % n, n)
            return (cur + steps[port]) % n

    elif algorithm == "clockwise":

        def step_fn(cur: int) -> int:
            return clockwise_step(cur, dst, cfg)

    else:

        def step_fn(cur: int) -> int:
            return adaptive_step(cur, dst, cfg, mode)

    nodes = [src]
    ports = []
    current = src
    while current != dst:
        if len(ports) >= hop_limit:
            raise LivelockError(
                f"{algorithm} routing exceeded hop limit {hop_limit} in {cfg} "
                f"for pair {src} -> {dst}"
            )
        nxt = step_fn(current)
        ports.append(port_for_step(_signed_delta(current, nxt, cfg), cfg))
        nodes.append(nxt)
        current = nxt
    return RouteTrace(
        algorithm=algorithm,
        n=n,
        s1=cfg.s1,
        s2=cfg.s2,
        src=src,
        dst=dst,
        nodes=tuple(nodes),
        ports=tuple(ports),
    )
