"""Vertex-cover side of the reduction.

Every vertex cover of the incidence graph I(G) can be reshaped, without
growing, so that it contains exactly one of B(x_i), C(x_i) per variable;
the chosen sides then read off a truth assignment, and the cover size
bounds how many clauses that assignment must satisfy.  An exact minimum
vertex cover of I(G) therefore certifies a treewidth lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnf import Assignment, evaluate
from .errors import BudgetExceededError
from .graph import Graph, bits, mask_of
from .reduction import ReductionInstance, incidence_graph

VC_VERTEX_BUDGET = 400
VC_CORE_BUDGET = 60


class NotACoverError(ValueError):
    """The given vertex set is not a vertex cover of the graph at hand."""


class NotNormalizedError(ValueError):
    """The certificate's cover does not choose one block side per variable."""


@dataclass(frozen=True)
class CoverCertificate:
    """A cover of I(G), its one-side-per-variable normal form, and the truth
    assignment the normal form encodes.

    ``bound`` is ``len(normalized) - 1``; it is a lower bound on the
    treewidth of the gadget graph whenever ``cover`` is a minimum vertex
    cover of I(G).
    """

    cover: frozenset[int]
    normalized: frozenset[int]
    assignment: Assignment
    removed_a: frozenset[int]
    bound: int


def is_vertex_cover(g: Graph, cover: set[int] | frozenset[int]) -> bool:
    mask = 0
    for v in cover:
        if not 1 <= v <= g.n:
            raise ValueError(f"unknown vertex id {v}")
        mask |= 1 << v
    return _covers(g, mask)


def _covers(g: Graph, mask: int) -> bool:
    outside = g.full_mask() & ~mask
    for v in bits(outside):
        if g.neighbors_mask(v) & outside:
            return False
    return True


def _shrink_to_minimal(g: Graph, mask: int) -> int:
    # drop redundant vertices in ascending id order; v is redundant iff all
    # its edges are already covered by the rest
    for v in bits(mask):
        rest = mask & ~(1 << v)
        if g.neighbors_mask(v) & ~rest == 0:
            mask = rest
    return mask


def normalize_cover(r: ReductionInstance, cover: set[int] | frozenset[int]) -> CoverCertificate:
    """Shrink a cover of I(G) to an inclusion-minimal one, then replace every
    doubly-covered variable's C block by that block's clause neighbors.

    The result never grows, keeps exactly one block side per variable, and
    satisfies ``len(normalized) == 7m - len(removed_a) + sum(gamma)``.
    """
    ig = incidence_graph(r)
    smask = 0
    for v in cover:
        if not 1 <= v <= r.vertex_count:
            raise ValueError(f"unknown vertex id {v}")
        smask |= 1 << v
    if not _covers(ig, smask):
        raise NotACoverError("input set is not a vertex cover of the incidence graph")

    smask = _shrink_to_minimal(ig, smask)
    for i in range(1, r.n + 1):
        bm, cm = r.b_masks[i - 1], r.c_masks[i - 1]
        has_b = bm & ~smask == 0
        has_c = cm & ~smask == 0
        if not (has_b or has_c):
            # cannot happen for a cover: the blocks are fully adjacent
            raise NotACoverError(f"neither block of variable x{i} is fully covered")
        if has_b and has_c:
            smask = (smask & ~cm) | r.a_nbrs_of_c[i - 1]

    normalized = frozenset(bits(smask))
    assignment = extract_assignment_from_set(r, smask)
    removed_a = frozenset(bits(r.a_mask & ~smask))
    assert len(normalized) == 7 * r.m - len(removed_a) + r.sum_gamma
    return CoverCertificate(
        cover=frozenset(cover),
        normalized=normalized,
        assignment=assignment,
        removed_a=removed_a,
        bound=len(normalized) - 1,
    )


def extract_assignment_from_set(r: ReductionInstance, smask: int) -> Assignment:
    """Read the truth assignment off a one-side-per-variable cover mask."""
    values = []
    for i in range(1, r.n + 1):
        bm, cm = r.b_masks[i - 1], r.c_masks[i - 1]
        inter = smask & (bm | cm)
        if inter == bm:
            values.append(True)
        elif inter == cm:
            values.append(False)
        else:
            raise NotNormalizedError(
                f"cover holds neither exactly B(x{i}) nor exactly C(x{i})"
            )
    return tuple(values)


def extract_assignment(r: ReductionInstance, cert: CoverCertificate) -> Assignment:
    """Assignment encoded by a normalized certificate: variable true iff the
    B block was chosen.  Guarantees
    ``len(cert.cover) >= sum(gamma) + 7m - evaluate(f, assignment)``."""
    return extract_assignment_from_set(r, mask_of(cert.normalized))


def cover_from_assignment(r: ReductionInstance, assignment: Assignment) -> set[int]:
    """The center bag of the assignment's decomposition, viewed as a cover of
    I(G): all clause vertices except each satisfied clause's fully-satisfied
    one, plus the chosen block side per variable.  Its size is exactly
    sum(gamma) + 7m - evaluate(f, assignment)."""
    if len(assignment) != r.n:
        raise ValueError(f"assignment has {len(assignment)} values, expected {r.n}")
    mask = r.a_mask
    for j in range(1, r.m + 1):
        v = r.fully_satisfied_a_vertex(j, assignment)
        if v is not None:
            mask ^= 1 << v
    for i in range(1, r.n + 1):
        mask |= r.b_masks[i - 1] if assignment[i - 1] else r.c_masks[i - 1]
    return set(bits(mask))


def _twin_classes(g: Graph) -> list[tuple[int, int]]:
    """Group vertices with identical neighborhoods; returns (member_mask,
    neighborhood_mask) per class.  Twins are never adjacent, so each class is
    independent and a minimum cover takes a class entirely or not at all."""
    groups: dict[int, int] = {}
    for v in g.vertices():
        groups.setdefault(g.neighbors_mask(v), 0)
        groups[g.neighbors_mask(v)] |= 1 << v
    return [(members, nbrs) for nbrs, members in sorted(groups.items(), key=lambda kv: kv[1])]


def min_vertex_cover_exact(
    g: Graph,
    max_vertices: int = VC_VERTEX_BUDGET,
    max_core_vertices: int = VC_CORE_BUDGET,
) -> tuple[int, set[int]]:
    """Exact minimum vertex cover by branch and bound.

    Twin classes (equal-neighborhood vertex groups, e.g. blown-up blocks)
    are contracted to single weighted vertices first; branching then picks a
    maximum-degree vertex and explores take-it versus take-its-neighborhood,
    pruned with a greedy matching lower bound.  The returned size is
    deterministic and exact.
    """
    if g.n > max_vertices:
        raise BudgetExceededError(f"{g.n} vertices exceed the cover-solver budget of {max_vertices}")
    classes = _twin_classes(g)
    k = len(classes)
    if k > max_core_vertices:
        raise BudgetExceededError(
            f"{k} twin classes exceed the branching budget of {max_core_vertices}"
        )

    weights = [members.bit_count() for members, _ in classes]
    index_of = {}
    for idx, (members, _) in enumerate(classes):
        for v in bits(members):
            index_of[v] = idx
    adj = [0] * k
    for idx, (members, nbrs) in enumerate(classes):
        for u in bits(nbrs):
            adj[idx] |= 1 << index_of[u]
        adj[idx] &= ~(1 << idx)

    full = (1 << k) - 1

    def weight_of(mask: int) -> int:
        return sum(weights[i] for i in bits(mask))

    def matching_bound(undecided: int) -> int:
        # disjoint edges each force min(w(u), w(v)) into any cover
        bound = 0
        avail = undecided
        for u in bits(undecided):
            if not avail >> u & 1:
                continue
            nb = adj[u] & avail & ~(1 << u)
            if nb:
                v = next(bits(nb))
                avail &= ~(1 << u) & ~(1 << v)
                bound += min(weights[u], weights[v])
        return bound

    def greedy_cover(undecided: int) -> tuple[int, int]:
        chosen = 0
        total = 0
        while True:
            best_v = -1
            best_deg = 0
            for v in bits(undecided):
                deg = (adj[v] & undecided).bit_count()
                if deg > best_deg:
                    best_deg = deg
                    best_v = v
            if best_v < 0:
                return total, chosen
            chosen |= 1 << best_v
            total += weights[best_v]
            undecided &= ~(1 << best_v)

    best_size, best_mask = greedy_cover(full)

    def bnb(undecided: int, acc: int, chosen: int) -> None:
        nonlocal best_size, best_mask
        # peel isolated and pendant vertices
        while True:
            progress = False
            edgeless = True
            pend_v = pend_u = -1
            for v in bits(undecided):
                nb = adj[v] & undecided
                deg = nb.bit_count()
                if deg == 0:
                    undecided &= ~(1 << v)
                    progress = True
                elif deg == 1:
                    edgeless = False
                    u = next(bits(nb))
                    if weights[u] <= weights[v]:
                        pend_v, pend_u = v, u
                        break
                else:
                    edgeless = False
            if pend_v >= 0:
                chosen |= 1 << pend_u
                acc += weights[pend_u]
                undecided &= ~(1 << pend_u) & ~(1 << pend_v)
                if acc >= best_size:
                    return
                continue
            if not progress:
                break
        if not undecided or edgeless:
            if acc < best_size:
                best_size = acc
                best_mask = chosen
            return
        if acc + matching_bound(undecided) >= best_size:
            return
        v = max(bits(undecided), key=lambda u: ((adj[u] & undecided).bit_count(), -u))
        # branch 1: exclude v, take its whole neighborhood
        nb = adj[v] & undecided
        take = weight_of(nb)
        if acc + take < best_size:
            bnb(undecided & ~nb & ~(1 << v), acc + take, chosen | nb)
        # branch 2: take v
        if acc + weights[v] < best_size:
            bnb(undecided & ~(1 << v), acc + weights[v], chosen | (1 << v))

    bnb(full, 0, 0)

    witness: set[int] = set()
    for idx in bits(best_mask):
        witness.update(bits(classes[idx][0]))
    return best_size, witness


def certify_lower_bound(
    r: ReductionInstance,
    max_vertices: int = VC_VERTEX_BUDGET,
    max_core_vertices: int = VC_CORE_BUDGET,
) -> CoverCertificate:
    """Treewidth lower bound from an exact minimum vertex cover of I(G):
    ``bound = minVC(I(G)) - 1``, certificate carrying the witness cover."""
    ig = incidence_graph(r)
    size, witness = min_vertex_cover_exact(ig, max_vertices, max_core_vertices)
    cert = normalize_cover(r, witness)
    assert cert.bound == size - 1
    return cert


def parse_cover(text: str | bytes) -> set[int]:
    """Cover file: one vertex id per line, ``c`` comments allowed."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    cover: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            cover.add(int(line))
        except ValueError:
            raise ValueError(f"line {lineno}: expected a vertex id, got {line!r}") from None
    return cover


def write_cover(cover: set[int] | frozenset[int]) -> str:
    return "\n".join(str(v) for v in sorted(cover)) + "\n"
