"""Graph construction, named families, cuts, and exact cutwidth."""

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opiniondyn import (
    SchemaError,
    SocialGraph,
    cut_weight,
    cutwidth_exact,
    make_clique,
    make_complete_bipartite,
    make_gadget_chain,
    make_star,
)
from opiniondyn.errors import LimitExceededError

from conftest import brute_force_cutwidth, random_connected_graph


class TestFamilies:
    def test_clique_triangle(self):
        g = make_clique(3, 1)
        assert {(i, j) for i, j, _ in g.edges} == {(0, 1), (0, 2), (1, 2)}

    def test_clique_two_players_half_weight(self):
        g = make_clique(2, 0.5)
        assert len(g.edges) == 1
        assert g.precision_k == 1
        assert g.weight(0, 1) == Fraction(1, 2)

    def test_clique_edge_count(self):
        assert len(make_clique(4, 1).edges) == 6

    def test_clique_too_small(self):
        with pytest.raises(SchemaError):
            make_clique(1, 1)

    @pytest.mark.parametrize("m,count", [(2, 4), (3, 9), (1, 1)])
    def test_bipartite_edge_counts(self, m, count):
        assert len(make_complete_bipartite(m, 1).edges) == count

    def test_bipartite_sides(self):
        g = make_complete_bipartite(2, 1)
        assert {(i, j) for i, j, _ in g.edges} == {(0, 2), (0, 3), (1, 2), (1, 3)}

    def test_star_shape(self):
        g = make_star(5, 0.2)
        assert g.precision_k == 1
        assert {(i, j) for i, j, _ in g.edges} == {(0, i) for i in range(1, 6)}

    def test_star_single_leaf(self):
        assert len(make_star(1, 1).edges) == 1

    def test_gadget_chain_single(self):
        chain = make_gadget_chain(1, 1, 9)
        assert chain.graph.n == 7
        assert len(chain.graph.edges) == 8  # 6 in-widget + 2 switch edges
        weights = [w for _, _, w in chain.graph.weights()]
        assert max(weights) / min(weights) == 4  # 4e vs e inside one widget

    def test_gadget_chain_two_levels(self):
        chain = make_gadget_chain(2, 1, 9)
        assert chain.graph.n == 13
        assert chain.epsilons == (Fraction(9), Fraction(1))
        weights = [w for _, _, w in chain.graph.weights()]
        assert max(weights) == 36
        assert min(weights) == 1

    def test_gadget_chain_roles(self):
        chain = make_gadget_chain(2, 1, 9)
        assert chain.roles[0] == (0, "A")
        assert chain.roles[chain.player(2, "F")] == (2, "F")

    def test_gadget_ratio_guard(self):
        with pytest.raises(SchemaError):
            make_gadget_chain(2, 1, 8)


class TestCuts:
    def test_clique_cut(self):
        g = make_clique(4, 1)
        assert cut_weight(g, {0, 1}) == 4

    def test_empty_cut(self):
        g = make_star(3, 1)
        assert cut_weight(g, set()) == 0

    def test_bipartite_mixed_pair(self):
        g = make_complete_bipartite(3, 1)
        assert cut_weight(g, {0, 3}) == 4  # one vertex per side

    @given(mask=st.integers(min_value=0, max_value=(1 << 6) - 1), seed=st.integers(0, 500))
    @settings(max_examples=60, deadline=None)
    def test_cut_complement_symmetry(self, mask, seed):
        g = random_connected_graph(random.Random(seed), 6, precision_k=1)
        full = (1 << 6) - 1
        assert g.cut_weight(mask) == g.cut_weight(full ^ mask)


class TestCutwidth:
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_bipartite_formula(self, m):
        result = cutwidth_exact(make_complete_bipartite(m, 1))
        assert result.value == -(-(m * m) // 2)  # ceil(m^2 / 2)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
    def test_clique_formula(self, n):
        assert cutwidth_exact(make_clique(n, 1)).value == (n * n) // 4

    def test_path_three(self):
        g = SocialGraph.from_weights(3, [(0, 1, 1), (1, 2, 1)])
        assert cutwidth_exact(g).value == 1

    def test_star_three_leaves(self):
        g = make_star(3, 1)
        oracle, _ = brute_force_cutwidth(g)
        result = cutwidth_exact(g)
        assert result.value_scaled == oracle == 2

    def test_bipartite_ordering_alternates(self):
        result = cutwidth_exact(make_complete_bipartite(3, 1))
        sides = [0 if v < 3 else 1 for v in result.ordering]
        assert sides in ([0, 1, 0, 1, 0, 1], [1, 0, 1, 0, 1, 0])

    def test_matches_brute_force_random(self, rng):
        for n in (4, 5, 6):
            for k in (0, 1):
                g = random_connected_graph(rng, n, precision_k=k)
                oracle, optimal = brute_force_cutwidth(g)
                result = cutwidth_exact(g)
                assert result.value_scaled == oracle
                assert tuple(result.ordering) in optimal

    def test_ordering_achieves_value(self, rng):
        g = random_connected_graph(rng, 7, precision_k=1)
        result = cutwidth_exact(g)
        placed = 0
        worst = 0
        for v in result.ordering[:-1]:
            placed |= 1 << v
            worst = max(worst, g.cut_weight_scaled(placed))
        assert worst == result.value_scaled

    def test_scaling_invariance(self, rng):
        g = random_connected_graph(rng, 6, precision_k=0)
        scaled = SocialGraph.from_weights(
            g.n, [(i, j, 3 * w) for i, j, w in g.weights()]
        )
        a = cutwidth_exact(g)
        b = cutwidth_exact(scaled)
        assert b.value == 3 * a.value
        assert b.ordering == a.ordering  # tie structure is scale-invariant

    def test_deterministic(self, rng):
        g = random_connected_graph(rng, 6, precision_k=1)
        assert cutwidth_exact(g) == cutwidth_exact(g)

    def test_limit(self):
        g = make_clique(5, 1)
        with pytest.raises(LimitExceededError):
            cutwidth_exact(g, n_limit=4)

    def test_single_vertex(self):
        g = SocialGraph(n=1, edges=(), precision_k=0)
        result = cutwidth_exact(g)
        assert result.value == 0
        assert result.ordering == (0,)


class TestValidationAndJson:
    def test_disconnected_rejected(self):
        with pytest.raises(SchemaError, match="connected"):
            SocialGraph.from_weights(4, [(0, 1, 1), (2, 3, 1)])

    def test_self_loop_rejected(self):
        with pytest.raises(SchemaError):
            SocialGraph.from_weights(2, [(0, 0, 1)])

    def test_duplicate_rejected(self):
        with pytest.raises(SchemaError):
            SocialGraph.from_weights(2, [(0, 1, 1), (1, 0, 2)])

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(SchemaError):
            SocialGraph.from_weights(2, [(0, 1, 0)])

    def test_non_decimal_weight_rejected(self):
        with pytest.raises(SchemaError):
            SocialGraph.from_weights(2, [(0, 1, Fraction(1, 3))])

    def test_round_trip_exact(self, rng):
        g = random_connected_graph(rng, 6, precision_k=2)
        again = SocialGraph.from_dict(json.loads(json.dumps(g.to_dict())))
        assert again == g

    def test_weights_preserved_as_strings(self):
        g = SocialGraph.from_weights(2, [(0, 1, "0.07")])
        data = g.to_dict()
        assert data["edges"][0][2] == "0.07"
        assert SocialGraph.from_dict(data).weight(0, 1) == Fraction(7, 100)
