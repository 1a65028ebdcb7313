"""Shared generators and independent re-implementations used as oracles."""

from __future__ import annotations

import random

import twgadget as tg


def random_formula(rng: random.Random, n: int, m: int) -> tg.Formula:
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return tg.Formula.from_ints(n, clauses)


def random_graph(rng: random.Random, n: int, p: float) -> tg.Graph:
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if rng.random() < p
    ]
    return tg.Graph(n, edges)


def pervar_instance(f: tg.Formula) -> tg.ReductionInstance:
    return tg.build_graph(f, tg.compute_gammas(f, "pervar"))


def all_patterns_formula() -> tg.Formula:
    """Eight clauses over x1..x3, one per sign pattern; any assignment
    falsifies exactly one of them."""
    clauses = []
    for code in range(8):
        clauses.append(
            [
                (1 if code & 4 else -1),
                (2 if code & 2 else -2),
                (3 if code & 1 else -3),
            ]
        )
    return tg.Formula.from_ints(3, clauses)


def formula_32b() -> tg.Formula:
    """Four clauses on three variables, each variable twice per polarity."""
    return tg.Formula.from_ints(
        3,
        [
            (1, 2, 3),
            (1, -2, -3),
            (-1, 2, -3),
            (-1, -2, 3),
        ],
    )


def blow_up(wg: tg.WeightedGraph) -> tg.Graph:
    """Replace every vertex by a clique of its weight, adjacent blocks fully
    joined; the expansion whose treewidth the weighted width must match."""
    blocks = []
    next_id = 0
    for v in range(1, wg.graph.n + 1):
        w = wg.weight(v)
        blocks.append(list(range(next_id + 1, next_id + 1 + w)))
        next_id += w
    edges = []
    for block in blocks:
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                edges.append((block[i], block[j]))
    for u, v in wg.graph.edges():
        for a in blocks[u - 1]:
            for b in blocks[v - 1]:
                edges.append((a, b))
    return tg.Graph(next_id, edges)


def naive_validate(g: tg.Graph, td: tg.TreeDecomposition) -> bool:
    """Quadratic set-based re-implementation of the decomposition axioms."""
    k = td.node_count
    if td.n != g.n:
        return False
    bag_sets = [td.bag_vertices(t) for t in range(1, k + 1)]
    if any(v < 1 or v > g.n for bag in bag_sets for v in bag):
        return False
    if len(td.edges) != k - 1:
        return False
    parent = list(range(k + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in td.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    if len({find(t) for t in range(1, k + 1)}) != 1:
        return False
    for v in range(1, g.n + 1):
        nodes = {t for t in range(1, k + 1) if v in bag_sets[t - 1]}
        if not nodes:
            return False
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for a, b in td.edges:
                for s, other in ((a, b), (b, a)):
                    if s == t and other in nodes and other not in seen:
                        seen.add(other)
                        stack.append(other)
        if seen != nodes:
            return False
    for u, v in g.edges():
        if not any(u in bag and v in bag for bag in bag_sets):
            return False
    return True
