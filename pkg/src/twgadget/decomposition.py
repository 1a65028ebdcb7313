"""Tree decompositions: model, validation, construction, and PACE .td I/O.

A decomposition is a tree over nodes 1..k with one vertex bag per node,
stored as bitmasks.  ``build_from_assignment`` realizes the constructive
upper bound: a subdivided claw whose center bag drops one clause vertex per
satisfied clause and keeps one block side per variable.
``normalize_to_claw`` is the converse normal form: any valid decomposition
of a gadget graph is restructured, without widening, into a claw whose
center bag is a vertex cover of the incidence graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from heapq import heappush, heappop
from itertools import permutations
from typing import Iterable, Sequence

from . import lowerbound
from .cnf import Assignment, evaluate
from .graph import Graph, bits, mask_of
from .reduction import ReductionInstance


class TdFormatError(ValueError):
    """Malformed .td input."""


class NotAClawError(ValueError):
    """The decomposition tree does not have exactly three leaves."""


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by node id (1-based); ``n`` is the underlying graph's
    vertex count.  The edge list is not required to form a tree here; that
    is one of the properties ``validate`` checks."""

    n: int
    bags: tuple[int, ...]  # bitmask per node, index = node id - 1
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.bags) < 1:
            raise ValueError("decomposition needs at least one node")
        k = len(self.bags)
        for u, v in self.edges:
            if not (1 <= u <= k and 1 <= v <= k):
                raise ValueError(f"tree edge ({u},{v}) references unknown node")

    @property
    def node_count(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(b.bit_count() for b in self.bags) - 1

    def bag(self, node: int) -> int:
        return self.bags[node - 1]

    def bag_vertices(self, node: int) -> set[int]:
        return set(bits(self.bags[node - 1]))

    def node_neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.node_count + 1)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return nbrs

    @classmethod
    def from_bag_sets(
        cls, n: int, bag_sets: Sequence[Iterable[int]], edges: Iterable[tuple[int, int]]
    ) -> "TreeDecomposition":
        bags = []
        for bag in bag_sets:
            mask = mask_of(bag)
            if mask >> (n + 1):
                raise ValueError(f"bag references vertex above {n}")
            if mask & 1:
                raise ValueError("vertex ids are 1-based")
            bags.append(mask)
        return cls(n, tuple(bags), tuple(edges))


@dataclass(frozen=True)
class TdReport:
    valid: bool
    width: int | None
    violation: str | None


def validate(g: Graph, td: TreeDecomposition) -> TdReport:
    """Check the decomposition axioms against g and report the first failure:
    tree shape, bag sanity, non-empty connected traces, edge coverage."""

    def bad(msg: str) -> TdReport:
        return TdReport(False, None, msg)

    if td.n != g.n:
        return bad(f"decomposition is over {td.n} vertices, graph has {g.n}")
    full = g.full_mask()
    for t, bag in enumerate(td.bags, start=1):
        if bag & ~full:
            v = next(bits(bag & ~full))
            return bad(f"bag {t} references unknown vertex {v}")

    k = td.node_count
    if len(td.edges) != k - 1:
        return bad(f"tree on {k} nodes needs {k - 1} edges, found {len(td.edges)}")
    nbrs = td.node_neighbors()
    seen = [False] * (k + 1)
    queue = deque([1])
    seen[1] = True
    count = 0
    while queue:
        t = queue.popleft()
        count += 1
        for u in nbrs[t]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    if count != k:
        return bad("decomposition tree is disconnected or cyclic")

    trace_size = [0] * (g.n + 1)
    covered = [0] * (g.n + 1)
    for bag in td.bags:
        for v in bits(bag):
            trace_size[v] += 1
            covered[v] |= bag
    for v in g.vertices():
        if trace_size[v] == 0:
            return bad(f"vertex {v} appears in no bag")

    # in a tree, a node subset inducing |subset|-1 edges is connected
    joint = [0] * (g.n + 1)
    for s, t in td.edges:
        for v in bits(td.bags[s - 1] & td.bags[t - 1]):
            joint[v] += 1
    for v in g.vertices():
        if joint[v] != trace_size[v] - 1:
            return bad(f"trace of vertex {v} is disconnected")

    for v in g.vertices():
        missing = g.neighbors_mask(v) & ~covered[v]
        if missing:
            u = next(bits(missing))
            return bad(f"edge ({v},{u}) is covered by no bag")

    return TdReport(True, td.width, None)


def build_from_assignment(r: ReductionInstance, assignment: Assignment) -> TreeDecomposition:
    """Subdivided-claw decomposition realized by a truth assignment.

    The center bag keeps the chosen block side of every variable and all
    clause vertices except, per satisfied clause, its fully-satisfied one.
    Three paths then exchange material until the leaves hold exactly A,
    A' + B, and A' + C.  Node ids: center first, then the B path, C path,
    and A path in construction order.
    """
    n = r.n
    if len(assignment) != n:
        raise ValueError(f"assignment has {len(assignment)} values, expected {n}")

    a_prime = r.a_mask
    for j in range(1, r.m + 1):
        v = r.fully_satisfied_a_vertex(j, assignment)
        if v is not None:
            a_prime ^= 1 << v
    b_chosen = 0
    c_chosen = 0
    for i in range(1, n + 1):
        if assignment[i - 1]:
            b_chosen |= r.b_masks[i - 1]
        else:
            c_chosen |= r.c_masks[i - 1]
    center = a_prime | b_chosen | c_chosen

    bags = [center]
    edges = []

    def walk(path_bags: list[int]) -> None:
        prev = 1
        for bag in path_bags:
            bags.append(bag)
            edges.append((prev, len(bags)))
            prev = len(bags)

    # B path: pull in the missing B blocks, drop the matching C blocks
    cur = center
    path = []
    for i in range(1, n + 1):
        if not assignment[i - 1]:
            cur |= r.b_masks[i - 1]
            path.append(cur)
            cur &= ~r.c_masks[i - 1]
            path.append(cur)
    path.append(a_prime | r.b_all_mask)
    walk(path)

    # C path, symmetric
    cur = center
    path = []
    for i in range(1, n + 1):
        if assignment[i - 1]:
            cur |= r.c_masks[i - 1]
            path.append(cur)
            cur &= ~r.b_masks[i - 1]
            path.append(cur)
    path.append(a_prime | r.c_all_mask)
    walk(path)

    # A path: per variable, pull in the clause neighbors of the chosen block,
    # then drop both blocks; ends at exactly A
    cur = center
    path = []
    for i in range(1, n + 1):
        if assignment[i - 1]:
            cur |= r.a_nbrs_of_b[i - 1]
        else:
            cur |= r.a_nbrs_of_c[i - 1]
        path.append(cur)
        cur &= ~(r.b_masks[i - 1] | r.c_masks[i - 1])
        path.append(cur)
    walk(path)

    return TreeDecomposition(r.vertex_count, tuple(bags), tuple(edges))


def find_clique_node(td: TreeDecomposition, vertices: Iterable[int]) -> int:
    """Smallest node whose bag contains all the given vertices.  For a clique
    of the decomposed graph such a node always exists in a valid
    decomposition."""
    mask = mask_of(vertices)
    for t, bag in enumerate(td.bags, start=1):
        if mask & ~bag == 0:
            return t
    raise ValueError(
        "no bag contains the given vertex set; either it is not a clique "
        "or the decomposition is invalid"
    )


def _tree_path(nbrs, start: int, goal: int) -> list[int]:
    """Unique path between two nodes of a tree; nbrs is indexable by node id."""
    parent = {start: 0}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        if t == goal:
            break
        for u in nbrs[t]:
            if u not in parent:
                parent[u] = t
                queue.append(u)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _relabel_claw(
    td_n: int,
    bags: dict[int, int],
    nbrs: dict[int, list[int]],
    center: int,
    leaves: tuple[int, int, int],
) -> TreeDecomposition:
    """Renumber a claw: center = 1, then each branch walked outward, in the
    order B leaf, C leaf, A leaf as passed in ``leaves``."""
    new_bags = [bags[center]]
    new_edges = []
    for leaf in leaves:
        path = _tree_path(nbrs, center, leaf)
        prev = 1
        for node in path[1:]:
            new_bags.append(bags[node])
            new_edges.append((prev, len(new_bags)))
            prev = len(new_bags)
    return TreeDecomposition(td_n, tuple(new_bags), tuple(new_edges))


def normalize_to_claw(r: ReductionInstance, td: TreeDecomposition) -> TreeDecomposition:
    """Restructure a valid decomposition of the gadget graph into a subdivided
    claw without increasing the width.

    A decomposition that already is a claw whose three leaf bags contain B,
    C, and A is only renumbered.  Otherwise the tree is restricted to the
    minimal subtree spanning one node per contained clique, and one
    duplicate-bag leaf is grafted at each of the three nodes; the grafted
    tree is always a subdivided claw.  The degree-3 node's bag of the result
    is a vertex cover of the incidence graph.
    """
    report = validate(r.graph, td)
    if not report.valid:
        raise ValueError(f"invalid tree decomposition: {report.violation}")

    nbrs = td.node_neighbors()
    masks = (r.b_all_mask, r.c_all_mask, r.a_mask)

    degs = [len(nbrs[t]) for t in range(1, td.node_count + 1)]
    leaves = sorted(t for t, d in enumerate(degs, start=1) if d <= 1)
    if len(leaves) == 3 and max(degs) == 3 and degs.count(3) == 1:
        all_bags = {t: td.bags[t - 1] for t in range(1, td.node_count + 1)}
        all_nbrs = {t: nbrs[t] for t in range(1, td.node_count + 1)}
        center = degs.index(3) + 1
        for perm in permutations(leaves):
            if all(masks[k] & ~all_bags[perm[k]] == 0 for k in range(3)):
                return _relabel_claw(td.n, all_bags, all_nbrs, center, perm)

    t_a = find_clique_node(td, bits(r.a_mask))
    t_b = find_clique_node(td, bits(r.b_all_mask))
    t_c = find_clique_node(td, bits(r.c_all_mask))

    keep = set(_tree_path(nbrs, t_a, t_b)) | set(_tree_path(nbrs, t_a, t_c))
    sub_nbrs: dict[int, list[int]] = {t: [] for t in keep}
    for u, v in td.edges:
        if u in keep and v in keep:
            sub_nbrs[u].append(v)
            sub_nbrs[v].append(u)
    sub_bags = {t: td.bags[t - 1] for t in keep}

    # graft a duplicate-bag leaf at each designated node; every leaf of the
    # minimal subtree is one of the designated nodes, so exactly the three
    # new nodes end up as leaves and the result is a subdivided claw
    next_id = max(keep) + 1
    designated = []
    for t in (t_b, t_c, t_a):
        sub_bags[next_id] = sub_bags[t]
        sub_nbrs[next_id] = [t]
        sub_nbrs[t].append(next_id)
        designated.append(next_id)
        next_id += 1
    center = next(t for t in sub_nbrs if len(sub_nbrs[t]) == 3)
    return _relabel_claw(td.n, sub_bags, sub_nbrs, center, tuple(designated))


def claw_center(td: TreeDecomposition) -> int:
    """Node of degree 3 in a tree with exactly three leaves."""
    nbrs = td.node_neighbors()
    degs = [len(nbrs[t]) for t in range(1, td.node_count + 1)]
    leaves = sum(1 for d in degs if d <= 1)
    centers = [t for t, d in enumerate(degs, start=1) if d == 3]
    if leaves != 3 or len(centers) != 1 or max(degs) > 3:
        raise NotAClawError("decomposition tree is not a subdivided claw")
    return centers[0]


def center_cover(r: ReductionInstance, claw: TreeDecomposition) -> set[int]:
    """Bag of the degree-3 node; for a claw produced by ``normalize_to_claw``
    this is a vertex cover of the incidence graph."""
    if claw.n != r.vertex_count:
        raise ValueError("decomposition does not match the instance")
    return claw.bag_vertices(claw_center(claw))


def decode_assignment(r: ReductionInstance, td: TreeDecomposition) -> tuple[Assignment, int]:
    """Extract a truth assignment from any valid decomposition of the gadget
    graph.  The result satisfies at least sum(gamma) + 7m - width - 1
    clauses, where width is the width of ``td``."""
    claw = normalize_to_claw(r, td)
    cover = center_cover(r, claw)
    cert = lowerbound.normalize_cover(r, cover)
    assignment = lowerbound.extract_assignment(r, cert)
    return assignment, evaluate(r.formula, assignment)


def greedy_decomposition(g: Graph) -> TreeDecomposition:
    """Tree decomposition from a min-fill elimination ordering.

    Fill counts are cached in a heap and recomputed when a vertex is popped.
    Eliminating a fill-0 (simplicial) vertex adds no edges, so the exact
    fill decrements it causes are pushed to its neighbors; eliminations with
    positive fill leave other cached counts stale until their next pop.  The
    ordering is therefore min-fill up to that staleness.  No optimality is
    claimed; the output is always a valid decomposition.
    """
    n = g.n
    if n == 0:
        raise ValueError("graph has no vertices")
    adj = [g.neighbors_mask(v) for v in range(n + 1)]
    alive = g.full_mask()

    def fill(v: int) -> int:
        nb = adj[v] & alive
        missing = 0
        rest = nb
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            missing += (nb & ~adj[u] & ~low).bit_count()
        return missing // 2

    heap: list[tuple[int, int]] = []
    fills = [0] * (n + 1)
    for v in range(1, n + 1):
        fills[v] = fill(v)
        heappush(heap, (fills[v], v))

    order: list[int] = []
    elim_nb: list[int] = []
    while len(order) < n:
        est, v = heappop(heap)
        if not alive >> v & 1 or est != fills[v]:
            continue  # dead vertex or superseded heap entry
        f = fill(v)
        if f != est:
            fills[v] = f
            heappush(heap, (f, v))
            continue
        nb = adj[v] & alive
        order.append(v)
        elim_nb.append(nb)
        alive ^= 1 << v
        if f == 0:
            # no fill edges; neighbors only lose their non-edge pairs with v
            for u in bits(nb):
                lost = (adj[u] & alive & ~adj[v] & ~(1 << v)).bit_count()
                if lost:
                    fills[u] -= lost
                    heappush(heap, (fills[u], u))
        else:
            for u in bits(nb):
                adj[u] |= nb & ~(1 << u)

    position = [0] * (n + 1)
    for k, v in enumerate(order):
        position[v] = k
    bags = []
    edges = []
    for k, (v, nb) in enumerate(zip(order, elim_nb)):
        bags.append(nb | (1 << v))
        if k == n - 1:
            continue
        if nb:
            successor = min(bits(nb), key=lambda u: position[u])
            edges.append((k + 1, position[successor] + 1))
        else:
            edges.append((k + 1, k + 2))
    return TreeDecomposition(n, tuple(bags), tuple(edges))


def parse_td(text: str | bytes) -> TreeDecomposition:
    """Parse a PACE .td file: ``s td <bags> <maxbagsize> <n>`` header,
    ``b <id> <vertices...>`` lines, then tree edges."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header: tuple[int, int, int] | None = None
    bag_lines: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise TdFormatError(f"line {lineno}: duplicate solution line")
            if len(parts) != 5 or parts[1] != "td":
                raise TdFormatError(f"line {lineno}: malformed solution line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]), int(parts[4]))
            except ValueError:
                raise TdFormatError(f"line {lineno}: non-integer solution fields") from None
            continue
        if header is None:
            raise TdFormatError(f"line {lineno}: data before 's td' line")
        num_bags, _, n = header
        if parts[0] == "b":
            try:
                bag_id = int(parts[1])
                vertices = [int(t) for t in parts[2:]]
            except (ValueError, IndexError):
                raise TdFormatError(f"line {lineno}: malformed bag line {line!r}") from None
            if not 1 <= bag_id <= num_bags:
                raise TdFormatError(f"line {lineno}: bag id {bag_id} outside 1..{num_bags}")
            if bag_id in bag_lines:
                raise TdFormatError(f"line {lineno}: duplicate bag {bag_id}")
            for v in vertices:
                if not 1 <= v <= n:
                    raise TdFormatError(f"line {lineno}: bag {bag_id} references unknown vertex {v}")
            bag_lines[bag_id] = mask_of(vertices)
            continue
        if len(parts) != 2:
            raise TdFormatError(f"line {lineno}: expected tree edge 'u v', got {line!r}")
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError:
            raise TdFormatError(f"line {lineno}: non-integer tree edge") from None
        if not (1 <= s <= num_bags and 1 <= t <= num_bags):
            raise TdFormatError(f"line {lineno}: tree edge ({s},{t}) references unknown bag")
        edges.append((s, t))
    if header is None:
        raise TdFormatError("missing 's td' line")
    num_bags, _, n = header
    if len(bag_lines) != num_bags:
        raise TdFormatError(f"header declares {num_bags} bags, found {len(bag_lines)}")
    bags = tuple(bag_lines[i] for i in range(1, num_bags + 1))
    return TreeDecomposition(n, bags, tuple(edges))


def write_td(td: TreeDecomposition) -> str:
    max_bag = max(b.bit_count() for b in td.bags)
    lines = [f"s td {td.node_count} {max_bag} {td.n}"]
    for t, bag in enumerate(td.bags, start=1):
        suffix = " ".join(str(v) for v in bits(bag))
        lines.append(f"b {t} {suffix}".rstrip())
    for u, v in td.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
