"""Compile a 3-CNF formula into its co-tripartite gadget graph.

The graph G built from a formula has vertex set A + B + C, each part a
clique.  Every clause j contributes a block A_j of 7 vertices, one per
assignment of its three variables that satisfies the clause; every variable
i contributes a block B(x_i) of gamma_i vertices (its positive side) and a
block C(x_i) of gamma_i vertices (its negative side), with B(x_i) and
C(x_i) fully adjacent to each other.  A clause vertex is fully adjacent to
the B or C block of each of its three variables according to the polarity
the vertex encodes, and to nothing else outside A.  Each B(x_i)/C(x_i)
block is a module of G.

Vertex numbering is fixed so identical inputs give identical graphs:

* ids 1..7m are clause vertices; the vertex of clause j whose sign pattern
  flips the literals given by the bits of ``code`` (most significant bit =
  first literal, bit set = literal negated, code 7 excluded) has id
  ``7*(j-1) + code + 1``;
* ids 7m+1.. are the B blocks in variable order, then the C blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import Formula, Literal, occurrence_profile
from .graph import Graph, bits

GAMMA_POLICY_KINDS = ("auto", "fixed", "pervar", "occ4")


class GammaConstraintError(ValueError):
    """A gamma value too small for some literal's occurrence counts."""


@dataclass(frozen=True)
class GammaPolicy:
    """How the per-variable block sizes are chosen.

    ``auto``   shared value, smallest feasible;
    ``fixed``  shared value given explicitly and checked for feasibility;
    ``pervar`` per-variable smallest feasible value;
    ``occ4``   per-variable, four times the variable's occurrence count.
    """

    kind: str
    fixed_value: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in GAMMA_POLICY_KINDS:
            raise ValueError(f"unknown gamma policy {self.kind!r}")
        if (self.kind == "fixed") != (self.fixed_value is not None):
            raise ValueError("fixed_value is required for 'fixed' and forbidden otherwise")

    @classmethod
    def parse(cls, text: str) -> "GammaPolicy":
        if text.startswith("fixed:"):
            try:
                value = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad gamma policy {text!r}: expected fixed:<int>") from None
            return cls("fixed", value)
        return cls(text)

    def render(self) -> str:
        return f"fixed:{self.fixed_value}" if self.kind == "fixed" else self.kind


@dataclass(frozen=True)
class GammaProfile:
    """Per-variable block sizes; every value covers both of the variable's
    literals, i.e. gamma_i >= max(4p+3q, 4q+3p) and gamma_i >= 1."""

    gammas: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.gammas)

    @property
    def largest(self) -> int:
        return max(self.gammas)

    def of(self, var: int) -> int:
        return self.gammas[var - 1]


def literal_demand(p: int, q: int) -> int:
    """Smallest feasible gamma for a variable occurring p times positively and
    q times negatively: each of its two literals needs 4*own + 3*other."""
    return max(4 * p + 3 * q, 4 * q + 3 * p)


def check_gammas(f: Formula, profile: GammaProfile) -> None:
    if len(profile.gammas) != f.n:
        raise GammaConstraintError(
            f"profile has {len(profile.gammas)} entries, formula has {f.n} variables"
        )
    prof = occurrence_profile(f)
    for i in range(1, f.n + 1):
        gamma = profile.of(i)
        if gamma < 1:
            raise GammaConstraintError(f"gamma for variable x{i} must be >= 1, got {gamma}")
        p, q = prof.p(i), prof.q(i)
        if 4 * p + 3 * q > gamma:
            raise GammaConstraintError(
                f"gamma={gamma} violated by literal x{i}: 4*{p}+3*{q} = {4 * p + 3 * q}"
            )
        if 4 * q + 3 * p > gamma:
            raise GammaConstraintError(
                f"gamma={gamma} violated by literal ~x{i}: 4*{q}+3*{p} = {4 * q + 3 * p}"
            )


def compute_gammas(f: Formula, policy: GammaPolicy | str) -> GammaProfile:
    if isinstance(policy, str):
        policy = GammaPolicy.parse(policy)
    prof = occurrence_profile(f)
    demands = [literal_demand(prof.p(i), prof.q(i)) for i in range(1, f.n + 1)]
    if policy.kind == "auto":
        shared = max(1, max(demands))
        gammas = (shared,) * f.n
    elif policy.kind == "fixed":
        gammas = (policy.fixed_value,) * f.n
    elif policy.kind == "pervar":
        gammas = tuple(max(1, d) for d in demands)
    else:  # occ4
        gammas = tuple(max(1, 4 * prof.occurrences(i)) for i in range(1, f.n + 1))
    profile = GammaProfile(gammas)
    check_gammas(f, profile)
    return profile


@dataclass(frozen=True)
class ReductionInstance:
    """The gadget graph together with its partition and block layout.

    Mask attributes are adjacency-style bitmasks over vertex ids (bit v for
    vertex v); they drive every downstream computation.
    """

    graph: Graph
    formula: Formula
    gammas: GammaProfile
    a_range: tuple[int, int]
    b_ranges: tuple[tuple[int, int], ...]
    c_ranges: tuple[tuple[int, int], ...]
    a_mask: int = field(repr=False)
    b_masks: tuple[int, ...] = field(repr=False)
    c_masks: tuple[int, ...] = field(repr=False)
    # clause vertices adjacent to B(x_i) / C(x_i); sizes 4p+3q and 4q+3p
    a_nbrs_of_b: tuple[int, ...] = field(repr=False)
    a_nbrs_of_c: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.formula.n

    @property
    def m(self) -> int:
        return self.formula.m

    @property
    def vertex_count(self) -> int:
        return self.graph.n

    @property
    def sum_gamma(self) -> int:
        return self.gammas.total

    @property
    def max_gamma(self) -> int:
        return self.gammas.largest

    @property
    def b_all_mask(self) -> int:
        mask = 0
        for b in self.b_masks:
            mask |= b
        return mask

    @property
    def c_all_mask(self) -> int:
        mask = 0
        for c in self.c_masks:
            mask |= c
        return mask

    def a_vertex(self, j: int, code: int) -> int:
        """Id of the clause-j vertex whose pattern flips the literals selected
        by the bits of code (0 <= code <= 6, MSB = first literal)."""
        if not 0 <= code <= 6:
            raise ValueError("code must be in 0..6")
        return 7 * (j - 1) + code + 1

    def s_triple(self, j: int, code: int) -> tuple[Literal, Literal, Literal]:
        clause = self.formula.clauses[j - 1]
        out = []
        for p, lit in enumerate(clause):
            flip = code >> (2 - p) & 1
            out.append(lit.negated() if flip else lit)
        return tuple(out)

    def fully_satisfied_a_vertex(self, j: int, assignment) -> int | None:
        """The clause-j vertex whose three signs are all satisfied by the
        assignment, or None when the clause is unsatisfied."""
        code = 0
        for p, lit in enumerate(self.formula.clauses[j - 1]):
            if not lit.satisfied_by(assignment):
                code |= 1 << (2 - p)
        return None if code == 7 else self.a_vertex(j, code)

    def owner(self, v: int) -> tuple[str, int]:
        """Which part a vertex belongs to: ('A', clause index) or
        ('B'|'C', variable index)."""
        if v <= self.a_range[1]:
            return "A", (v - 1) // 7 + 1
        for i, (lo, hi) in enumerate(self.b_ranges, start=1):
            if lo <= v <= hi:
                return "B", i
        for i, (lo, hi) in enumerate(self.c_ranges, start=1):
            if lo <= v <= hi:
                return "C", i
        raise ValueError(f"vertex {v} outside 1..{self.vertex_count}")

    def label(self, v: int) -> str:
        part, idx = self.owner(v)
        if part == "A":
            code = (v - 1) % 7
            s = self.s_triple(idx, code)
            return f"a_{idx}({s[0].render()},{s[1].render()},{s[2].render()})"
        lo = (self.b_ranges if part == "B" else self.c_ranges)[idx - 1][0]
        return f"{part.lower()}_{idx}^{v - lo + 1}"


def build_graph(f: Formula, gammas: GammaProfile) -> ReductionInstance:
    """Construct the gadget graph; deterministic down to the edge list."""
    check_gammas(f, gammas)
    n, m = f.n, f.m
    a_count = 7 * m
    b_ranges = []
    c_ranges = []
    pos = a_count + 1
    for i in range(1, n + 1):
        g = gammas.of(i)
        b_ranges.append((pos, pos + g - 1))
        pos += g
    for i in range(1, n + 1):
        g = gammas.of(i)
        c_ranges.append((pos, pos + g - 1))
        pos += g
    total = pos - 1
    assert total == 7 * m + 2 * gammas.total

    def range_mask(lo: int, hi: int) -> int:
        return (1 << (hi + 1)) - (1 << lo)

    a_mask = range_mask(1, a_count)
    b_masks = tuple(range_mask(lo, hi) for lo, hi in b_ranges)
    c_masks = tuple(range_mask(lo, hi) for lo, hi in c_ranges)
    b_all = range_mask(a_count + 1, a_count + gammas.total)
    c_all = range_mask(a_count + gammas.total + 1, total)

    # clause vertex -> the B/C blocks its sign pattern selects
    a_nbrs_of_b = [0] * (n + 1)
    a_nbrs_of_c = [0] * (n + 1)
    for j, clause in enumerate(f.clauses, start=1):
        for code in range(7):
            a_id = 7 * (j - 1) + code + 1
            for p, lit in enumerate(clause):
                flip = code >> (2 - p) & 1
                if lit.positive ^ bool(flip):
                    a_nbrs_of_b[lit.var] |= 1 << a_id
                else:
                    a_nbrs_of_c[lit.var] |= 1 << a_id

    adj = [0] * (total + 1)
    for v in range(1, a_count + 1):
        adj[v] = a_mask ^ (1 << v)
    for lo, hi in b_ranges:
        for v in range(lo, hi + 1):
            adj[v] = b_all ^ (1 << v)
    for lo, hi in c_ranges:
        for v in range(lo, hi + 1):
            adj[v] = c_all ^ (1 << v)
    for i in range(1, n + 1):
        bm, cm = b_masks[i - 1], c_masks[i - 1]
        nb, nc = a_nbrs_of_b[i], a_nbrs_of_c[i]
        for v in range(b_ranges[i - 1][0], b_ranges[i - 1][1] + 1):
            adj[v] |= cm | nb
        for v in range(c_ranges[i - 1][0], c_ranges[i - 1][1] + 1):
            adj[v] |= bm | nc
        for a in bits(nb):
            adj[a] |= bm
        for a in bits(nc):
            adj[a] |= cm

    graph = Graph.from_adjacency(total, adj)
    return ReductionInstance(
        graph=graph,
        formula=f,
        gammas=gammas,
        a_range=(1, a_count),
        b_ranges=tuple(b_ranges),
        c_ranges=tuple(c_ranges),
        a_mask=a_mask,
        b_masks=b_masks,
        c_masks=c_masks,
        a_nbrs_of_b=tuple(a_nbrs_of_b[1:]),
        a_nbrs_of_c=tuple(a_nbrs_of_c[1:]),
    )


def incidence_graph(r: ReductionInstance) -> Graph:
    """The gadget graph with all edges inside the cliques A, B, C removed;
    what remains is tripartite and its vertex covers bound the treewidth."""
    adj = [0] * (r.vertex_count + 1)
    for i in range(1, r.n + 1):
        bm, cm = r.b_masks[i - 1], r.c_masks[i - 1]
        nb, nc = r.a_nbrs_of_b[i - 1], r.a_nbrs_of_c[i - 1]
        lo, hi = r.b_ranges[i - 1]
        for v in range(lo, hi + 1):
            adj[v] = cm | nb
        lo, hi = r.c_ranges[i - 1]
        for v in range(lo, hi + 1):
            adj[v] = bm | nc
        for a in bits(nb):
            adj[a] |= bm
        for a in bits(nc):
            adj[a] |= cm
    return Graph.from_adjacency(r.vertex_count, adj)


def predicted_bounds(r: ReductionInstance, msat: int) -> tuple[int, int]:
    """Treewidth window implied by the best satisfiable clause count msat:
    lower = sum(gamma) + 7m - msat - 1, upper = lower + max(gamma)."""
    if not 0 <= msat <= r.m:
        raise ValueError(f"msat={msat} outside 0..{r.m}")
    lower = r.sum_gamma + 7 * r.m - msat - 1
    return lower, lower + r.max_gamma


METADATA_VERSION = 1
ID_SCHEME_VERSION = 1


def format_metadata(r: ReductionInstance, policy: GammaPolicy | str | None = None) -> str:
    """Key/value sidecar describing the instance layout."""
    lines = [
        f"meta_version {METADATA_VERSION}",
        f"id_scheme {ID_SCHEME_VERSION}",
        f"n {r.n}",
        f"m {r.m}",
    ]
    if policy is not None:
        text = policy.render() if isinstance(policy, GammaPolicy) else policy
        lines.append(f"gamma_policy {text}")
    lines += [
        f"sum_gamma {r.sum_gamma}",
        f"max_gamma {r.max_gamma}",
        f"vertices {r.vertex_count}",
        f"edges {r.graph.edge_count}",
        f"a_range {r.a_range[0]} {r.a_range[1]}",
    ]
    for i in range(1, r.n + 1):
        lines.append(f"gamma {i} {r.gammas.of(i)}")
    for i, (lo, hi) in enumerate(r.b_ranges, start=1):
        lines.append(f"b_range {i} {lo} {hi}")
    for i, (lo, hi) in enumerate(r.c_ranges, start=1):
        lines.append(f"c_range {i} {lo} {hi}")
    for j, clause in enumerate(r.formula.clauses, start=1):
        lits = " ".join(str(lit.to_int()) for lit in clause)
        lines.append(f"clause {j} {lits}")
    return "\n".join(lines) + "\n"
