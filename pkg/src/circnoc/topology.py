"""Circulant, mesh, and torus graph construction plus distance metrics.

A circulant on ``n`` nodes with generatrices ``(s1, ..., sk)`` links every
node ``v`` to ``(v +- si) mod n``.  Ring circulants (``s1 = 1``) keep the
Hamiltonian ring, which is what the routing layer relies on.  Mesh and
torus builders produce the square-grid baselines the circulants are
measured against, and the comparison sweep quantifies the diameter and
average-distance gains.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import DisconnectedGraphError, ValidationError

__all__ = [
    "CirculantSpec",
    "Graph",
    "TopologyMetrics",
    "ComparisonRow",
    "SELECTION_RULES",
    "build_circulant",
    "build_mesh",
    "build_torus",
    "bfs_distances",
    "metrics",
    "circulant_distance_profile",
    "formula_optimal_circulant",
    "search_best_ring_circulant",
    "search_best_circulant2",
    "compare_topologies",
    "graph_to_dot",
    "graph_to_edge_csv",
    "format_metrics_csv",
]


@dataclass(frozen=True)
class CirculantSpec:
    """Identity of a circulant topology: node count plus ordered generatrices.

    ``C(n; s1, ..., sk)`` requires ``1 <= s1 < ... < sk <= n // 2`` and
    ``gcd(n, s1, ..., sk) == 1`` so the graph is connected.
    """

    n: int
    generatrices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "generatrices", tuple(self.generatrices))
        gens = self.generatrices
        if self.n < 3:
            raise ValidationError(f"circulant needs n >= 3 nodes, got n={self.n}")
        if not gens:
            raise ValidationError("at least one generatrix is required")
        if any(s < 1 for s in gens):
            raise ValidationError(f"generatrices must be >= 1, got {gens}")
        if any(a >= b for a, b in zip(gens, gens[1:])):
            raise ValidationError(f"generatrices must be strictly increasing, got {gens}")
        if gens[-1] > self.n // 2:
            raise ValidationError(
                f"largest generatrix {gens[-1]} exceeds floor(n/2) = {self.n // 2}"
            )
        if math.gcd(self.n, *gens) != 1:
            raise ValidationError(
                f"gcd(n, {', '.join(map(str, gens))}) != 1: graph would be disconnected"
            )

    @property
    def k(self) -> int:
        """Dimension of the circulant (number of generatrices)."""
        return len(self.generatrices)

    @property
    def is_ring(self) -> bool:
        """True when the first generatrix is 1 (unit-step ring present)."""
        return self.generatrices[0] == 1

    def __str__(self) -> str:
        return f"C({self.n}; {', '.join(map(str, self.generatrices))})"


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph as per-node sorted neighbor tuples."""

    n: int
    neighbors: tuple[tuple[int, ...], ...]
    kind: str

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.neighbors)

    @property
    def edge_count(self) -> int:
        """Undirected edge count (each physical link counted once)."""
        return sum(len(nbrs) for nbrs in self.neighbors) // 2

    @property
    def channel_count(self) -> int:
        """Directed channel count: two per undirected link."""
        return 2 * self.edge_count

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield undirected edges as (u, v) with u < v, sorted."""
        for u in range(self.n):
            for v in self.neighbors[u]:
                if u < v:
                    yield (u, v)


@dataclass(frozen=True)
class TopologyMetrics:
    """Distance and size metrics of a connected graph.

    ``avg_distance`` averages shortest-path hops over ordered pairs
    ``u != v`` (identical to the unordered average by symmetry).
    """

    diameter: int
    avg_distance: float
    edge_count: int
    max_degree: int


@dataclass(frozen=True)
class ComparisonRow:
    """Per-size comparison of one circulant against square mesh and torus.

    Reductions are percentages, ``100 * (other - circulant) / other``.
    """

    n: int
    selection: str
    circulant: CirculantSpec
    circulant_metrics: TopologyMetrics
    mesh_metrics: TopologyMetrics
    torus_metrics: TopologyMetrics
    diameter_reduction_vs_mesh: float
    diameter_reduction_vs_torus: float
    avg_distance_reduction_vs_mesh: float
    avg_distance_reduction_vs_torus: float


def build_circulant(spec: CirculantSpec) -> Graph:
    """Build C(n; s1, ..., sk): node v adjacent to (v +- si) mod n.

    Degree is 2k everywhere except that a generatrix equal to n/2
    contributes a single edge (v + n/2 == v - n/2 mod n).
    """
    n = spec.n
    neighbors = []
    for v in range(n):
        near = set()
        for s in spec.generatrices:
            near.add((v + s) % n)
            near.add((v - s) % n)
        neighbors.append(tuple(sorted(near)))
    return Graph(n=n, neighbors=tuple(neighbors), kind="circulant")


def build_mesh(rows: int, cols: int) -> Graph:
    """Build a rows x cols 4-neighbor grid without wraparound."""
    if rows < 1 or cols < 1:
        raise ValidationError(f"mesh dimensions must be >= 1, got {rows}x{cols}")
    if rows * cols < 2:
        raise ValidationError("mesh needs at least 2 nodes")
    n = rows * cols
    neighbors = []
    for r in range(rows):
        for c in range(cols):
            near = []
            if c > 0:
                near.append(r * cols + c - 1)
            if c + 1 < cols:
                near.append(r * cols + c + 1)
            if r > 0:
                near.append((r - 1) * cols + c)
            if r + 1 < rows:
                near.append((r + 1) * cols + c)
            neighbors.append(tuple(sorted(near)))
    return Graph(n=n, neighbors=tuple(neighbors), kind="mesh")


def build_torus(rows: int, cols: int) -> Graph:
    """Build a rows x cols grid with wraparound links; every node has degree 4.

    Dimensions below 3 would duplicate wrap edges, so they are rejected.
    """
    if rows < 3 or cols < 3:
        raise ValidationError(f"torus dimensions must be >= 3, got {rows}x{cols}")
    n = rows * cols
    neighbors = []
    for r in range(rows):
        for c in range(cols):
            near = {
                r * cols + (c - 1) % cols,
                r * cols + (c + 1) % cols,
                ((r - 1) % rows) * cols + c,
                ((r + 1) % rows) * cols + c,
            }
            neighbors.append(tuple(sorted(near)))
    return Graph(n=n, neighbors=tuple(neighbors), kind="torus")


def bfs_distances(graph: Graph, src: int) -> list[int]:
    """Hop distances from ``src`` to every node by breadth-first search."""
    if not 0 <= src < graph.n:
        raise ValidationError(f"source {src} out of range [0, {graph.n})")
    dist = [-1] * graph.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    for v, d in enumerate(dist):
        if d < 0:
            raise DisconnectedGraphError(
                f"node {v} is unreachable from {src}", unreachable=v
            )
    return dist


def metrics(graph: Graph) -> TopologyMetrics:
    """Diameter, average distance, edge count, and max degree of a graph."""
    total = 0
    diameter = 0
    for src in range(graph.n):
        dist = bfs_distances(graph, src)
        total += sum(dist)
        diameter = max(diameter, max(dist))
    pairs = graph.n * (graph.n - 1)
    return TopologyMetrics(
        diameter=diameter,
        avg_distance=total / pairs,
        edge_count=graph.edge_count,
        max_degree=graph.max_degree,
    )


@lru_cache(maxsize=4096)
def circulant_distance_profile(n: int, generatrices: tuple[int, ...]) -> tuple[int, ...]:
    """Hop distances from node 0 to every node of C(n; generatrices).

    Circulants are vertex-transitive: d(u, v) == profile[(v - u) mod n],
    so one profile answers every all-pairs question.
    """
    CirculantSpec(n, generatrices)
    steps = []
    for s in generatrices:
        steps.append(s)
        steps.append(n - s)
    dist = [-1] * n
    dist[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        d = dist[u] + 1
        for s in steps:
            v = (u + s) % n
            if dist[v] < 0:
                dist[v] = d
                queue.append(v)
    return tuple(dist)


def _profile_key(n: int, s1: int, s2: int) -> tuple[int, int]:
    """(diameter, total distance) of C(n; s1, s2); exact integers for ranking."""
    profile = circulant_distance_profile(n, (s1, s2))
    return max(profile), sum(profile)


def formula_optimal_circulant(n: int) -> CirculantSpec:
    """Two-generatrix circulant C(n; d-1, d) with d = round(sqrt(n/2)).

    Rounding is to the nearest integer, ties up.  When d - 1 < 1 the spec
    degenerates, so the result is clamped to the ring C(n; 1, 2) (plain
    ring C(3; 1) for n == 3, where no second generatrix exists).
    """
    if n <= 2:
        raise ValidationError(f"n must exceed 2, got {n}")
    d = math.floor(math.sqrt(n / 2) + 0.5)
    if d - 1 < 1:
        if n == 3:
            return CirculantSpec(3, (1,))
        return CirculantSpec(n, (1, 2))
    return CirculantSpec(n, (d - 1, d))


def search_best_ring_circulant(n: int) -> CirculantSpec:
    """Best ring circulant C(n; 1, s2) by exhaustive search over s2.

    Minimizes (diameter, average distance) lexicographically over
    s2 in [2, ceil(n/2) - 1]; ties go to the smallest s2.
    """
    if n < 5:
        raise ValidationError(f"no valid second generatrix for n={n}; need n >= 5")
    best_key = None
    best_s2 = 0
    for s2 in range(2, (n - 1) // 2 + 1):
        key = _profile_key(n, 1, s2)
        if best_key is None or key < best_key:
            best_key = key
            best_s2 = s2
    return CirculantSpec(n, (1, best_s2))


def search_best_circulant2(n: int) -> CirculantSpec:
    """Best two-generatrix circulant by exhaustive search over (s1, s2).

    Same lexicographic criterion as the ring search, over all connected
    pairs 1 <= s1 < s2 < n/2; ties go to the smallest (s1, s2).
    """
    if n < 5:
        raise ValidationError(f"no valid generatrix pair for n={n}; need n >= 5")
    best_key = None
    best_pair = (0, 0)
    limit = (n - 1) // 2
    for s1 in range(1, limit):
        for s2 in range(s1 + 1, limit + 1):
            if math.gcd(n, s1, s2) != 1:
                continue
            key = _profile_key(n, s1, s2)
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (s1, s2)
    return CirculantSpec(n, best_pair)


SELECTION_RULES = {
    "best_ring": search_best_ring_circulant,
    "formula_eq1": formula_optimal_circulant,
    "best_general": search_best_circulant2,
}


def _reduction(circulant_value: float, other_value: float) -> float:
    return 100.0 * (other_value - circulant_value) / other_value


def compare_topologies(sides: Iterable[int], selection: str = "best_ring") -> list[ComparisonRow]:
    """Compare circulants against square mesh and torus for n = side**2.

    One row per side; the circulant is chosen by ``selection``
    (one of ``best_ring``, ``formula_eq1``, ``best_general``).
    """
    if selection not in SELECTION_RULES:
        raise ValidationError(
            f"unknown selection rule {selection!r}; expected one of {sorted(SELECTION_RULES)}"
        )
    rule = SELECTION_RULES[selection]
    rows = []
    for side in sides:
        if side < 3:
            raise ValidationError(f"side must be >= 3, got {side}")
        n = side * side
        spec = rule(n)
        circ = metrics(build_circulant(spec))
        mesh = metrics(build_mesh(side, side))
        torus = metrics(build_torus(side, side))
        rows.append(
            ComparisonRow(
                n=n,
                selection=selection,
                circulant=spec,
                circulant_metrics=circ,
                mesh_metrics=mesh,
                torus_metrics=torus,
                diameter_reduction_vs_mesh=_reduction(circ.diameter, mesh.diameter),
                diameter_reduction_vs_torus=_reduction(circ.diameter, torus.diameter),
                avg_distance_reduction_vs_mesh=_reduction(circ.avg_distance, mesh.avg_distance),
                avg_distance_reduction_vs_torus=_reduction(circ.avg_distance, torus.avg_distance),
            )
        )
    return rows


def graph_to_dot(graph: Graph) -> str:
    """Render a graph in undirected DOT format with node ids as labels."""
    lines = [f"graph {graph.kind} {{"]
    for v in range(graph.n):
        lines.append(f'  {v} [label="{v}"];')
    for u, v in graph.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_edge_csv(graph: Graph) -> str:
    """Render the undirected edge list as CSV with header ``u,v``."""
    lines = ["u,v"]
    for u, v in graph.edges():
        lines.append(f"{u},{v}")
    return "\n".join(lines) + "\n"


def format_metrics_csv(
    records: Iterable[tuple[int, str, int | None, int | None, TopologyMetrics]],
) -> str:
    """Render metric records as CSV: ``n,topology,s1,s2,diameter,avg_distance,edges``.

    ``s1``/``s2`` are blank for non-circulant topologies.
    """
    lines = ["n,topology,s1,s2,diameter,avg_distance,edges"]
    for n, topology, s1, s2, m in records:
        s1_text = "" if s1 is None else str(s1)
        s2_text = "" if s2 is None else str(s2)
        lines.append(
            f"{n},{topology},{s1_text},{s2_text},{m.diameter},{m.avg_distance!r},{m.edge_count}"
        )
    return "\n".join(lines) + "\n"
