"""Shared instance factories and independent reference implementations.

The ``ref_*`` functions recompute costs and potentials straight from the
definitions using Fractions and the public weight list; they never touch the
package's scaled-integer internals, so they can serve as oracles."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from opiniondyn import OpinionGame, SocialGraph, opinion_game


# -- random instances ---------------------------------------------------------

def random_connected_graph(
    rng: random.Random, n: int, precision_k: int = 0, extra_edges: int | None = None
) -> SocialGraph:
    """Random spanning tree plus extra edges; weights have <= precision_k
    decimal digits (unit weights when precision_k == 0 and rng says so)."""

    def weight():
        if precision_k == 0:
            return rng.randint(1, 5)
        scale = 10**precision_k
        return Fraction(rng.randint(1, 4 * scale), scale)

    edges = {}
    for v in range(1, n):
        u = rng.randrange(v)
        edges[(u, v)] = weight()
    if extra_edges is None:
        extra_edges = rng.randint(0, n)
    tries = 0
    while len(edges) < n - 1 + extra_edges and tries < 10 * n:
        tries += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key not in edges:
            edges[key] = weight()
    return SocialGraph.from_weights(n, [(i, j, w) for (i, j), w in edges.items()])


def random_unit_graph(rng: random.Random, n: int) -> SocialGraph:
    edges = {}
    for v in range(1, n):
        edges[(rng.randrange(v), v)] = 1
    extra = rng.randint(0, n)
    tries = 0
    while len(edges) < n - 1 + extra and tries < 10 * n:
        tries += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.setdefault((min(u, v), max(u, v)), 1)
    return SocialGraph.from_weights(n, [(i, j, w) for (i, j), w in edges.items()])


def random_beliefs(rng: random.Random, n: int) -> list[Fraction]:
    """Beliefs on denominators {1, 2, 4, 5, 10, 20} to keep the lcm small."""
    out = []
    for _ in range(n):
        den = rng.choice([1, 2, 4, 5, 10, 20])
        out.append(Fraction(rng.randint(0, den), den))
    return out


def random_game(
    rng: random.Random, n: int, precision_k: int = 0, extra_edges: int | None = None
) -> OpinionGame:
    graph = random_connected_graph(rng, n, precision_k, extra_edges)
    return opinion_game(graph, random_beliefs(rng, n))


# -- reference implementations (oracles) ---------------------------------------

def ref_cost(game: OpinionGame, x: int, i: int) -> Fraction:
    xi = (x >> i) & 1
    cost = (Fraction(xi) - game.beliefs[i]) ** 2
    for a, b, w in game.graph.weights():
        if i in (a, b):
            j = b if a == i else a
            if ((x >> j) & 1) != xi:
                cost += w
    return cost


def ref_potential(game: OpinionGame, x: int) -> Fraction:
    phi = sum(
        (Fraction((x >> i) & 1) - game.beliefs[i]) ** 2 for i in range(game.n)
    )
    for a, b, w in game.graph.weights():
        if ((x >> a) & 1) != ((x >> b) & 1):
            phi += w
    return phi


def ref_social_cost(game: OpinionGame, x: int) -> Fraction:
    return sum(ref_cost(game, x, i) for i in range(game.n))


def ref_is_nash(game: OpinionGame, x: int) -> bool:
    return all(
        ref_cost(game, x, i) <= ref_cost(game, x ^ (1 << i), i)
        for i in range(game.n)
    )


def brute_force_cutwidth(graph: SocialGraph):
    """Minimum over all n! orderings of the max prefix cut (scaled units);
    returns (value, set of optimal orderings). Only for small n. The cut is
    maintained incrementally: appending v adds its strength and removes twice
    the weight already crossing into the prefix."""
    import itertools

    adjacency = graph.adjacency
    strength = graph.strength
    best = None
    optimal = set()
    for perm in itertools.permutations(range(graph.n)):
        placed = 0
        cut = 0
        worst = 0
        for v in perm[:-1]:
            inner = 0
            for u, w in adjacency[v]:
                if (placed >> u) & 1:
                    inner += w
            cut += strength[v] - 2 * inner
            placed |= 1 << v
            if cut > worst:
                worst = cut
        if best is None or worst < best:
            best = worst
            optimal = {perm}
        elif worst == best:
            optimal.add(perm)
    return best, optimal


@pytest.fixture
def rng():
    return random.Random(20260810)
