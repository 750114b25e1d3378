"""
Confusability graphs, strong products and exact independence numbers.

Two inputs are confusable when their output supports intersect; a
zero-error code of block length n is an independent set of the n-fold
strong power of the confusability graph.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import List, Tuple

import networkx as nx

from .channel import DEFAULT_SIZE_CAP, Channel, bhattacharyya
from .errors import BudgetExceeded, SizeOverflow
from .game import ExactLogRate

logger = logging.getLogger(__name__)

DEFAULT_VERTEX_CAP = 64


@dataclass(frozen=True)
class ConfusabilityGraph:
    """Simple undirected graph as a symmetric 0/1 matrix with zero diagonal."""
    vertex_count: int
    adjacency: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        for i in range(self.vertex_count):
            if self.adjacency[i][i]:
                raise ValueError(f"self-loop at vertex {i}")
            for j in range(i + 1, self.vertex_count):
                if self.adjacency[i][j] != self.adjacency[j][i]:
                    raise ValueError(f"adjacency not symmetric at ({i}, {j})")

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u][v])

    def degree(self, v: int) -> int:
        return sum(self.adjacency[v])

    @property
    def edge_count(self) -> int:
        return sum(self.degree(v) for v in range(self.vertex_count)) // 2

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        return tuple(
            sum(1 << j for j, bit in enumerate(row) if bit) for row in self.adjacency
        )

    def has_non_edge(self) -> bool:
        """True iff two distinct vertices are non-adjacent."""
        return any(
            not self.adjacency[u][v]
            for u, v in combinations(range(self.vertex_count), 2)
        )

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(
            (u, v) for u, v in combinations(range(self.vertex_count), 2)
            if self.adjacency[u][v]
        )
        return graph

    def adjacency_text(self) -> str:
        """Adjacency-list export, one line per vertex."""
        return "\n".join(nx.generate_adjlist(self.to_networkx()))

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> "ConfusabilityGraph":
        rows = [[0] * vertex_count for _ in range(vertex_count)]
        for u, v in edges:
            if u != v:
                rows[u][v] = rows[v][u] = 1
        return cls(vertex_count, tuple(tuple(r) for r in rows))


def empty_graph(n: int) -> ConfusabilityGraph:
    return ConfusabilityGraph.from_edges(n, [])


def complete_graph(n: int) -> ConfusabilityGraph:
    return ConfusabilityGraph.from_edges(n, combinations(range(n), 2))


def cycle_graph(n: int) -> ConfusabilityGraph:
    return ConfusabilityGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# =============================================================================
# CONSTRUCTION
# =============================================================================

def confusability_graph(w: Channel) -> ConfusabilityGraph:
    """Inputs adjacent iff their output supports overlap."""
    n = w.input_size
    edges = [
        (x, x2) for x, x2 in combinations(range(n), 2)
        if not bhattacharyya(w, x, x2).is_zero
    ]
    return ConfusabilityGraph.from_edges(n, edges)


def strong_product(
    g1: ConfusabilityGraph, g2: ConfusabilityGraph, size_cap: int = DEFAULT_SIZE_CAP
) -> ConfusabilityGraph:
    """
    G1 x G2 (strong): (u1,u2) ~ (v1,v2) iff every coordinate is equal or
    adjacent and the pairs differ. Vertex (i1, i2) has index i1 * |V2| + i2.
    """
    n1, n2 = g1.vertex_count, g2.vertex_count
    if n1 * n2 > size_cap:
        raise SizeOverflow(f"strong product has {n1 * n2} vertices, cap is {size_cap}")

    def close(g: ConfusabilityGraph, a: int, b: int) -> bool:
        return a == b or g.adjacency[a][b]

    rows = []
    for u1 in range(n1):
        for u2 in range(n2):
            row = []
            for v1 in range(n1):
                c1 = close(g1, u1, v1)
                for v2 in range(n2):
                    row.append(
                        1 if c1 and close(g2, u2, v2) and (u1, u2) != (v1, v2) else 0
                    )
            rows.append(tuple(row))
    return ConfusabilityGraph(n1 * n2, tuple(rows))


def strong_power(g: ConfusabilityGraph, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> ConfusabilityGraph:
    if n < 1:
        raise ValueError(f"strong power needs n >= 1, got {n}")
    if g.vertex_count ** n > size_cap:
        raise SizeOverflow(f"G^{n} has {g.vertex_count ** n} vertices, cap is {size_cap}")
    result = g
    for _ in range(n - 1):
        result = strong_product(result, g, size_cap=size_cap)
    return result


# =============================================================================
# INDEPENDENCE NUMBER
# =============================================================================

def _color_sort(candidates: int, masks: List[int]) -> List[Tuple[int, int]]:
    """
    Greedy clique cover of the candidate set, in ascending color order.

    Vertices sharing a color are pairwise adjacent in `masks`' complement,
    so an independent set meets each color at most once: the color number
    bounds how much the set can still grow.
    """
    order = []
    uncolored = candidates
    color = 0
    while uncolored:
        color += 1
        available = uncolored
        while available:
            v = (available & -available).bit_length() - 1
            order.append((v, color))
            uncolored &= ~(1 << v)
            # next member must conflict with v, i.e. be adjacent to it
            available &= masks[v] & ~(1 << v)
    return order


def maximum_independent_set(
    g: ConfusabilityGraph, vertex_cap: int = DEFAULT_VERTEX_CAP
) -> Tuple[int, ...]:
    """
    A maximum independent set, found by branch and bound.

    Candidates are relabelled so that higher-degree vertices come first;
    each node bounds its subtree with a greedy clique cover.

    Raises:
        BudgetExceeded: more than vertex_cap vertices.
    """
    n = g.vertex_count
    if n > vertex_cap:
        raise BudgetExceeded(f"independence search on {n} vertices exceeds cap {vertex_cap}")
    if n == 0:
        return ()

    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    position = {v: i for i, v in enumerate(order)}
    masks = [0] * n
    for v in range(n):
        for u in range(n):
            if g.adjacency[v][u]:
                masks[position[v]] |= 1 << position[u]

    full = (1 << n) - 1
    best: List[int] = []
    nodes = 0

    def expand(current: List[int], candidates: int) -> None:
        nonlocal best, nodes
        nodes += 1
        colored = _color_sort(candidates, masks)
        for v, color in reversed(colored):
            if len(current) + color <= len(best):
                return
            remaining = candidates & ~masks[v] & ~(1 << v)
            current.append(v)
            if remaining:
                expand(current, remaining)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            candidates &= ~(1 << v)

    expand([], full)
    logger.debug("independence search on %d vertices: alpha=%d, %d nodes", n, len(best), nodes)
    return tuple(sorted(order[v] for v in best))


def independence_number(g: ConfusabilityGraph, vertex_cap: int = DEFAULT_VERTEX_CAP) -> int:
    """alpha(G), exact."""
    return len(maximum_independent_set(g, vertex_cap))


# =============================================================================
# ZERO-ERROR CAPACITY
# =============================================================================

def zero_error_rate(
    w: Channel,
    n: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> ExactLogRate:
    """(1/n) log2 alpha(G^n), carried as psi = 1/alpha with blocklength n."""
    graph = strong_power(confusability_graph(w), n, size_cap=size_cap)
    alpha = independence_number(graph, vertex_cap)
    return ExactLogRate(Fraction(1, alpha), blocklength=n)


def c0_lower(
    w: Channel,
    n: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> float:
    """Certified lower bound on C0(W) from zero-error codes of length n."""
    return zero_error_rate(w, n, size_cap, vertex_cap).rate


def c0_positive(w: Channel) -> bool:
    """C0(W) > 0 iff some pair of inputs is non-confusable."""
    return confusability_graph(w).has_non_edge()
