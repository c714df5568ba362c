"""Weighted social graphs, named families, and exact cutwidth.

A social graph is a connected undirected graph on players 0..n-1 with
positive decimal edge weights. Weights are stored as integers scaled by
10^precision_k so that every cut and potential comparison downstream is exact.

The (weighted) cutwidth is the minimum over vertex orderings of the maximum
weight crossing any prefix of the ordering; it is computed exactly by a
dynamic program over vertex subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import LimitExceededError, SchemaError
from .exact import decimal_precision, format_decimal, to_fraction

CUTWIDTH_N_LIMIT = 20  # 2^n DP table; override per call


@dataclass(frozen=True)
class SocialGraph:
    """Connected weighted graph with weights stored as scaled integers.

    ``edges`` holds (i, j, w_scaled) with i < j and w_scaled = w * 10^precision_k.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    precision_k: int

    def __post_init__(self):
        if self.n < 1:
            raise SchemaError(f"need at least one player, got n={self.n}")
        seen = set()
        for idx, (i, j, w) in enumerate(self.edges):
            if not (0 <= i < j < self.n):
                raise SchemaError(f"edges[{idx}]: bad endpoints ({i}, {j}) for n={self.n}")
            if w <= 0:
                raise SchemaError(f"edges[{idx}]: weight must be positive")
            if (i, j) in seen:
                raise SchemaError(f"edges[{idx}]: duplicate edge ({i}, {j})")
            seen.add((i, j))
        if not self._connected():
            raise SchemaError("graph is not connected")

    def _connected(self) -> bool:
        if self.n == 1:
            return True
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_weights(cls, n: int, weighted_edges) -> "SocialGraph":
        """Build from (i, j, weight) triples; weights as exact decimals."""
        fracs = []
        for i, j, w in weighted_edges:
            wf = to_fraction(w)
            if wf <= 0:
                raise SchemaError(f"edge ({i}, {j}): weight must be positive, got {wf}")
            a, b = (i, j) if i < j else (j, i)
            if a == b:
                raise SchemaError(f"self-loop at vertex {a}")
            fracs.append((a, b, wf))
        k = max((decimal_precision(w) for _, _, w in fracs), default=0)
        pow10 = 10**k
        scaled = tuple(sorted((i, j, int(w * pow10)) for i, j, w in fracs))
        return cls(n=n, edges=scaled, precision_k=k)

    # -- derived structure ----------------------------------------------------

    @cached_property
    def pow10(self) -> int:
        return 10**self.precision_k

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-vertex tuple of (neighbor, scaled weight)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def strength(self) -> tuple[int, ...]:
        """Total scaled weight incident to each vertex (W_i * 10^k)."""
        s = [0] * self.n
        for i, j, w in self.edges:
            s[i] += w
            s[j] += w
        return tuple(s)

    @cached_property
    def total_weight_scaled(self) -> int:
        return sum(w for _, _, w in self.edges)

    @cached_property
    def max_weight_scaled(self) -> int:
        return max((w for _, _, w in self.edges), default=0)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @cached_property
    def max_degree(self) -> int:
        return max((self.degree(i) for i in range(self.n)), default=0)

    def weight(self, i: int, j: int) -> Fraction:
        a, b = (i, j) if i < j else (j, i)
        for x, y, w in self.edges:
            if (x, y) == (a, b):
                return Fraction(w, self.pow10)
        return Fraction(0)

    def weights(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, Fraction(w, self.pow10)) for i, j, w in self.edges]

    # -- cuts -----------------------------------------------------------------

    def cut_weight_scaled(self, mask: int) -> int:
        """Scaled total weight of edges with exactly one endpoint in ``mask``."""
        total = 0
        for i, j, w in self.edges:
            if ((mask >> i) ^ (mask >> j)) & 1:
                total += w
        return total

    def cut_weight(self, subset) -> Fraction:
        """Total weight of edges crossing the vertex set (mask or iterable)."""
        mask = subset if isinstance(subset, int) else _mask_of(subset, self.n)
        return Fraction(self.cut_weight_scaled(mask), self.pow10)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [
                [i, j, format_decimal(Fraction(w, self.pow10))] for i, j, w in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SocialGraph":
        if not isinstance(data, dict) or "n" not in data or "edges" not in data:
            raise SchemaError("graph object must have fields 'n' and 'edges'")
        n = data["n"]
        if not isinstance(n, int) or n < 1:
            raise SchemaError(f"n: expected positive integer, got {n!r}")
        triples = []
        for idx, item in enumerate(data["edges"]):
            if not isinstance(item, (list, tuple)) or len(item) != 3:
                raise SchemaError(f"edges[{idx}]: expected [i, j, weight-string]")
            i, j, w = item
            try:
                triples.append((int(i), int(j), to_fraction(w)))
            except SchemaError as exc:
                raise SchemaError(f"edges[{idx}]: {exc}") from exc
        return cls.from_weights(n, triples)


def _mask_of(vertices, n: int) -> int:
    mask = 0
    for v in vertices:
        if not 0 <= v < n:
            raise SchemaError(f"vertex {v} out of range for n={n}")
        mask |= 1 << v
    return mask


def cut_weight(graph: SocialGraph, subset) -> Fraction:
    return graph.cut_weight(subset)


# -- named families -----------------------------------------------------------

def make_clique(n: int, w) -> SocialGraph:
    """Complete graph on n >= 2 vertices, all edges weighted w."""
    if n < 2:
        raise SchemaError(f"a clique needs n >= 2, got {n}")
    edges = [(i, j, w) for i in range(n) for j in range(i + 1, n)]
    return SocialGraph.from_weights(n, edges)


def make_complete_bipartite(m: int, w) -> SocialGraph:
    """K_{m,m} with sides {0..m-1} and {m..2m-1}, all cross edges weighted w."""
    if m < 1:
        raise SchemaError(f"side size must be >= 1, got {m}")
    edges = [(i, m + j, w) for i in range(m) for j in range(m)]
    return SocialGraph.from_weights(2 * m, edges)


def make_star(leaves: int, w) -> SocialGraph:
    """Star with center 0 and ``leaves`` external vertices, edges weighted w."""
    if leaves < 1:
        raise SchemaError(f"a star needs at least one leaf, got {leaves}")
    edges = [(0, i, w) for i in range(1, leaves + 1)]
    return SocialGraph.from_weights(leaves + 1, edges)


@dataclass(frozen=True)
class GadgetChain:
    """Chain of six-player widgets joined by switch players.

    Player 0 is the outermost switch. Widget g (1-based) occupies players
    1 + 6(g-1) .. 6g with roles A..F; the A player of widget g acts as the
    switch for widget g+1. ``roles`` maps player -> (widget index, role letter),
    with the outer switch labeled (0, 'A').
    """

    graph: SocialGraph
    roles: dict[int, tuple[int, str]]
    epsilons: tuple[Fraction, ...]

    @property
    def gadgets(self) -> int:
        return len(self.epsilons)

    def player(self, gadget: int, role: str) -> int:
        if gadget == 0 and role == "A":
            return 0
        base = 1 + 6 * (gadget - 1)
        return base + "ABCDEF".index(role)


def make_gadget_chain(g: int, eps_last, ratio: int) -> GadgetChain:
    """Build the chain of g widgets whose weights shrink by ``ratio`` per level.

    Each widget {A,B,C,D,E,F} has edges (A,B), (B,C), (C,D) weighted e, 2e, 3e
    and (D,E), (B,F), (D,F) weighted 4e. The previous level's A player is wired
    to B and D of the next widget with weight 4e of that widget. The weight of
    widget i is eps_last * ratio^(g-i); ratio must exceed 8 so that each A
    player's in-widget edge dominates its two outgoing switch edges.
    """
    if g < 1:
        raise SchemaError(f"need at least one widget, got {g}")
    if ratio <= 8:
        raise SchemaError(f"weight ratio must exceed 8, got {ratio}")
    eps_last = to_fraction(eps_last)
    if eps_last <= 0:
        raise SchemaError("eps_last must be positive")
    eps = tuple(eps_last * ratio ** (g - i) for i in range(1, g + 1))

    roles: dict[int, tuple[int, str]] = {0: (0, "A")}
    edges = []
    for gi in range(1, g + 1):
        base = 1 + 6 * (gi - 1)
        a, b, c, d, e, f = range(base, base + 6)
        for p, r in zip((a, b, c, d, e, f), "ABCDEF"):
            roles[p] = (gi, r)
        w = eps[gi - 1]
        edges += [(a, b, w), (b, c, 2 * w), (c, d, 3 * w),
                  (d, e, 4 * w), (b, f, 4 * w), (d, f, 4 * w)]
        switch = 0 if gi == 1 else 1 + 6 * (gi - 2)  # A player of previous widget
        edges += [(switch, b, 4 * w), (switch, d, 4 * w)]

    graph = SocialGraph.from_weights(6 * g + 1, edges)
    return GadgetChain(graph=graph, roles=roles, epsilons=eps)


# -- exact cutwidth -----------------------------------------------------------

@dataclass(frozen=True)
class CutwidthResult:
    value: Fraction
    value_scaled: int
    ordering: tuple[int, ...]


def cutwidth_exact(graph: SocialGraph, n_limit: int = CUTWIDTH_N_LIMIT) -> CutwidthResult:
    """Exact cutwidth via subset DP: f(S) = min over last vertices v of
    max(f(S \\ v), cut(S)), with the smallest-index vertex breaking ties so the
    returned ordering is deterministic.
    """
    n = graph.n
    if n > n_limit:
        raise LimitExceededError(f"cutwidth DP limited to n <= {n_limit}, got n={n}")

    size = 1 << n
    adj_masks = [0] * n
    wrow = [dict() for _ in range(n)]
    for i, j, w in graph.edges:
        adj_masks[i] |= 1 << j
        adj_masks[j] |= 1 << i
        wrow[i][j] = w
        wrow[j][i] = w
    strength = graph.strength

    cut = [0] * size
    f = [0] * size
    last = [0] * size
    for s in range(1, size):
        v = (s & -s).bit_length() - 1
        rest = s ^ (1 << v)
        inner = 0
        common = adj_masks[v] & rest
        while common:
            u = (common & -common).bit_length() - 1
            inner += wrow[v][u]
            common &= common - 1
        cut[s] = cut[rest] + strength[v] - 2 * inner

        c = cut[s]
        best = None
        best_v = -1
        t = s
        while t:
            u = (t & -t).bit_length() - 1
            cand = f[s ^ (1 << u)]
            if cand < c:
                cand = c
            if best is None or cand < best:
                best = cand
                best_v = u
            t &= t - 1
        f[s] = best
        last[s] = best_v

    ordering = []
    s = size - 1
    while s:
        v = last[s]
        ordering.append(v)
        s ^= 1 << v
    ordering.reverse()
    value_scaled = f[size - 1]
    return CutwidthResult(
        value=Fraction(value_scaled, graph.pow10),
        value_scaled=value_scaled,
        ordering=tuple(ordering),
    )
