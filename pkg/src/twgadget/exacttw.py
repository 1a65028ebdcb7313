"""Exact treewidth oracles.

The workhorse is a memoized branch-and-bound over elimination orderings:
states are sets of still-alive vertices (the fill-in graph left after
eliminating a set is independent of the elimination order, so the alive
mask is a sound memo key).  Simplicial vertices are eliminated without
branching, whole cliques terminate a state, and branches whose first bag
already meets the cutoff are skipped.  Everything is expressed in the
weighted form (bag cost = total vertex weight, width = max cost - 1); unit
weights recover ordinary treewidth.

The clique-block quotient of a gadget instance contracts each B(x_i)/C(x_i)
block to one vertex weighted by its size.  That the weighted width of the
quotient equals the treewidth of the expanded graph is validated
empirically by the test suite before the fast path is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .errors import BudgetExceededError
from .graph import Graph, GrFormatError, bits, parse_gr
from .reduction import ReductionInstance

DP_VERTEX_BUDGET = 26
BRUTE_FORCE_VERTEX_BUDGET = 9


@dataclass(frozen=True)
class WeightedGraph:
    """A graph with a positive integer weight per vertex (index v-1)."""

    graph: Graph
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.graph.n:
            raise ValueError("need exactly one weight per vertex")
        if any(w < 1 for w in self.weights):
            raise ValueError("weights must be >= 1")

    def weight(self, v: int) -> int:
        return self.weights[v - 1]

    @property
    def total_weight(self) -> int:
        return sum(self.weights)


def _max_bag_weight(n: int, adj: list[int], weights: list[int]) -> int:
    """Minimum over elimination orderings of the heaviest bag created.

    ``adj`` is 0-based; returns 0 for the empty graph.
    """
    if n == 0:
        return 0
    full = (1 << n) - 1

    def wsum(mask: int) -> int:
        return sum(weights[v] for v in bits(mask))

    # greedy seed: always eliminate the lightest prospective bag
    g_adj = list(adj)
    alive = full
    ub = 0
    while alive:
        best_v = -1
        best_bag = None
        for v in bits(alive):
            bag = weights[v] + wsum(g_adj[v] & alive & ~(1 << v))
            if best_bag is None or bag < best_bag:
                best_bag = bag
                best_v = v
        ub = max(ub, best_bag)
        nb = g_adj[best_v] & alive & ~(1 << best_v)
        alive ^= 1 << best_v
        for u in bits(nb):
            g_adj[u] |= nb & ~(1 << u)

    memo: dict[int, tuple[int, bool]] = {}

    def solve(alive: int, adj_now: list[int], cutoff: int) -> int:
        """Exact value when the result is < cutoff, else a lower bound >= cutoff."""
        entry_alive = alive
        hit = memo.get(alive)
        if hit is not None:
            val, exact = hit
            if exact or val >= cutoff:
                return val

        # eliminate simplicial vertices outright; their bag is forced
        floor = 0
        changed = True
        while changed:
            changed = False
            for v in bits(alive):
                nb = adj_now[v] & alive & ~(1 << v)
                clique = True
                for u in bits(nb):
                    if nb & ~adj_now[u] & ~(1 << u):
                        clique = False
                        break
                if clique:
                    floor = max(floor, weights[v] + wsum(nb))
                    alive ^= 1 << v
                    changed = True
        if not alive or floor >= cutoff:
            memo[entry_alive] = (floor, floor < cutoff)
            return floor

        order = sorted(
            bits(alive), key=lambda v: (weights[v] + wsum(adj_now[v] & alive & ~(1 << v)), v)
        )
        beta = cutoff
        best = None
        branch_lb = None
        for v in order:
            bag = weights[v] + wsum(adj_now[v] & alive & ~(1 << v))
            if bag >= beta:
                branch_lb = bag if branch_lb is None else min(branch_lb, bag)
                continue
            nb = adj_now[v] & alive & ~(1 << v)
            child_adj = list(adj_now)
            for u in bits(nb):
                child_adj[u] |= nb & ~(1 << u)
            sub = solve(alive ^ (1 << v), child_adj, beta)
            value = max(bag, sub)
            branch_lb = value if branch_lb is None else min(branch_lb, value)
            if best is None or value < best:
                best = value
                beta = min(beta, best)
                if best <= floor:
                    break

        result = max(floor, branch_lb)
        memo[entry_alive] = (result, result < cutoff)
        return result

    return solve(full, list(adj), ub + 1)


def _shifted_adjacency(g: Graph) -> list[int]:
    # 1-based vertex masks -> 0-based
    return [g.neighbors_mask(v) >> 1 for v in range(1, g.n + 1)]


def treewidth_exact(g: Graph, max_vertices: int = DP_VERTEX_BUDGET) -> int:
    """Exact treewidth; the empty graph has treewidth -1."""
    if g.n > max_vertices:
        raise BudgetExceededError(f"{g.n} vertices exceed the DP budget of {max_vertices}")
    return _max_bag_weight(g.n, _shifted_adjacency(g), [1] * g.n) - 1


def weighted_treewidth_exact(wg: WeightedGraph, max_vertices: int = DP_VERTEX_BUDGET) -> int:
    """Minimum over tree decompositions of (heaviest bag weight - 1); equals
    ``treewidth_exact`` at unit weights."""
    g = wg.graph
    if g.n > max_vertices:
        raise BudgetExceededError(f"{g.n} vertices exceed the DP budget of {max_vertices}")
    return _max_bag_weight(g.n, _shifted_adjacency(g), list(wg.weights)) - 1


def brute_force_ordering_tw(g: Graph, max_vertices: int = BRUTE_FORCE_VERTEX_BUDGET) -> int:
    """Treewidth by exhausting all n! elimination orderings; the DP's oracle."""
    if g.n > max_vertices:
        raise BudgetExceededError(
            f"{g.n} vertices exceed the factorial budget of {max_vertices}"
        )
    if g.n == 0:
        return -1
    base = [g.neighbors_mask(v) for v in range(g.n + 1)]
    best = g.n - 1
    for order in permutations(range(1, g.n + 1)):
        adj = list(base)
        alive = g.full_mask()
        worst = 0
        for v in order:
            nb = adj[v] & alive & ~(1 << v)
            deg = nb.bit_count()
            if deg > worst:
                worst = deg
                if worst >= best:
                    break
            alive ^= 1 << v
            for u in bits(nb):
                adj[u] |= nb & ~(1 << u)
        if worst < best:
            best = worst
    return best


@dataclass(frozen=True)
class Quotient:
    """Gadget graph with each variable block contracted to one weighted vertex.

    Quotient ids keep the clause vertices 1..7m, then put B(x_i) at 7m+i and
    C(x_i) at 7m+n+i.
    """

    weighted: WeightedGraph
    b_vertex: tuple[int, ...]
    c_vertex: tuple[int, ...]

    def original_range(self, r: ReductionInstance, qv: int) -> tuple[int, int]:
        """Expanded-id range a quotient vertex stands for."""
        if qv <= 7 * r.m:
            return qv, qv
        i = qv - 7 * r.m
        if i <= r.n:
            return r.b_ranges[i - 1]
        return r.c_ranges[i - r.n - 1]


def quotient(r: ReductionInstance) -> Quotient:
    n, m = r.n, r.m
    a_count = 7 * m
    qn = a_count + 2 * n
    adj = [0] * (qn + 1)
    a_mask = (1 << (a_count + 1)) - 2
    b_mask = ((1 << (a_count + n + 1)) - 2) & ~a_mask
    c_mask = ((1 << (qn + 1)) - 2) & ~a_mask & ~b_mask
    for v in range(1, a_count + 1):
        adj[v] = a_mask ^ (1 << v)
    for i in range(1, n + 1):
        bq = a_count + i
        cq = a_count + n + i
        adj[bq] = (b_mask ^ (1 << bq)) | (1 << cq)
        adj[cq] = (c_mask ^ (1 << cq)) | (1 << bq)
    for i in range(1, n + 1):
        bq = a_count + i
        cq = a_count + n + i
        for a in bits(r.a_nbrs_of_b[i - 1]):
            adj[a] |= 1 << bq
            adj[bq] |= 1 << a
        for a in bits(r.a_nbrs_of_c[i - 1]):
            adj[a] |= 1 << cq
            adj[cq] |= 1 << a
    weights = [1] * a_count + list(r.gammas.gammas) + list(r.gammas.gammas)
    wg = WeightedGraph(Graph.from_adjacency(qn, adj), tuple(weights))
    return Quotient(
        weighted=wg,
        b_vertex=tuple(a_count + i for i in range(1, n + 1)),
        c_vertex=tuple(a_count + n + i for i in range(1, n + 1)),
    )


def treewidth_via_quotient(r: ReductionInstance, max_vertices: int = DP_VERTEX_BUDGET) -> int:
    """Treewidth of the gadget graph computed on its clique-block quotient."""
    q = quotient(r)
    return weighted_treewidth_exact(q.weighted, max_vertices)


def parse_weighted_gr(text: str | bytes) -> WeightedGraph:
    """Extended .gr: standard header and edges plus one ``w <id> <weight>``
    line per vertex; vertices without a w line default to weight 1."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    plain_lines: list[str] = []
    weight_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.split()[:1] == ["w"]:
            weight_lines.append((lineno, stripped))
        else:
            plain_lines.append(raw)
    g = parse_gr("\n".join(plain_lines))
    weights = [1] * g.n
    seen: set[int] = set()
    for lineno, line in weight_lines:
        parts = line.split()
        if len(parts) != 3:
            raise GrFormatError(f"line {lineno}: expected 'w <id> <weight>', got {line!r}")
        try:
            v, w = int(parts[1]), int(parts[2])
        except ValueError:
            raise GrFormatError(f"line {lineno}: non-integer weight line") from None
        if not 1 <= v <= g.n:
            raise GrFormatError(f"line {lineno}: weight for unknown vertex {v}")
        if v in seen:
            raise GrFormatError(f"line {lineno}: duplicate weight for vertex {v}")
        if w < 1:
            raise GrFormatError(f"line {lineno}: weight must be >= 1")
        seen.add(v)
        weights[v - 1] = w
    return WeightedGraph(g, tuple(weights))


def write_weighted_gr(wg: WeightedGraph) -> str:
    g = wg.graph
    lines = [f"p tw {g.n} {g.edge_count}"]
    for v in range(1, g.n + 1):
        lines.append(f"w {v} {wg.weight(v)}")
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
