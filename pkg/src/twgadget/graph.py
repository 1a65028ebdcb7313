"""Undirected simple graphs on 1-based vertex ids, with PACE-style .gr I/O.

Adjacency is stored as one Python integer bitmask per vertex (bit v set in
``adj[u]`` iff uv is an edge); set algebra on whole neighborhoods is then a
single big-int operation, which is what keeps the blown-up gadget graphs
cheap to build and check.
"""

from __future__ import annotations

from typing import Iterable, Iterator


class GrFormatError(ValueError):
    """Malformed .gr graph input."""


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Simple undirected graph on vertices 1..n."""

    __slots__ = ("n", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self._adj = [0] * (n + 1)
        for u, v in edges:
            self.add_edge_unchecked(u, v)

    def add_edge_unchecked(self, u: int, v: int) -> None:
        # construction-time only; instances are treated as immutable afterwards
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError(f"edge ({u},{v}) outside 1..{self.n}")
        self._adj[u] |= 1 << v
        self._adj[v] |= 1 << u

    @classmethod
    def from_adjacency(cls, n: int, adj: list[int]) -> "Graph":
        """Adopt a prebuilt adjacency mask list (index 0 unused)."""
        g = cls.__new__(cls)
        g.n = n
        g._adj = adj
        return g

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def neighbors_mask(self, v: int) -> int:
        return self._adj[v]

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self._adj[v]))

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self._adj) // 2

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(1, self.n + 1):
            for v in bits(self._adj[u] >> u << u):
                yield u, v

    def full_mask(self) -> int:
        return (1 << (self.n + 1)) - 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def parse_gr(text: str | bytes) -> Graph:
    """Parse a PACE .gr file: ``p tw N M`` header then one ``u v`` line per edge."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = m = None
    g: Graph | None = None
    seen_edges = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if g is not None:
                raise GrFormatError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "tw":
                raise GrFormatError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GrFormatError(f"line {lineno}: non-integer header fields") from None
            if n < 0 or m < 0:
                raise GrFormatError(f"line {lineno}: negative counts in header")
            g = Graph(n)
            continue
        if g is None:
            raise GrFormatError(f"line {lineno}: edge data before header")
        if len(parts) != 2:
            raise GrFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GrFormatError(f"line {lineno}: non-integer edge endpoints") from None
        try:
            if g.adjacent(u, v):
                raise GrFormatError(f"line {lineno}: duplicate edge {u} {v}")
            g.add_edge_unchecked(u, v)
        except ValueError as exc:
            raise GrFormatError(f"line {lineno}: {exc}") from None
        seen_edges += 1
    if g is None:
        raise GrFormatError("missing 'p tw' header")
    if seen_edges != m:
        raise GrFormatError(f"header declares {m} edges but file has {seen_edges}")
    return g


def write_gr(g: Graph) -> str:
    lines = [f"p tw {g.n} {g.edge_count}"]
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
