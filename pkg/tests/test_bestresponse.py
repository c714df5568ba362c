"""Best-response dynamics, drop certification, and the adversarial schedule."""

import random
from fractions import Fraction

import pytest

from opiniondyn import (
    FixedSequence,
    InvariantError,
    RoundRobin,
    SchemaError,
    SocialGraph,
    UniformRandom,
    adversarial_schedule,
    best_response,
    canonicalize_beliefs,
    certify_drop,
    enumerate_nash,
    greedy_nash,
    integer_version,
    make_clique,
    make_gadget_chain,
    opinion_game,
    run_best_response,
    validate_schedule,
)

from conftest import random_beliefs, random_game, random_unit_graph

HALF = Fraction(1, 2)


class TestBestResponse:
    def test_single_edge_follow_neighbor(self):
        g = SocialGraph.from_weights(2, [(0, 1, 1)])
        game = opinion_game(g, 0)
        assert best_response(game, 0b10, 1) == 0  # cost 2 -> 0

    def test_indifference_stays(self):
        g = SocialGraph.from_weights(2, [(0, 1, 1)])
        game = opinion_game(g, [0, 1])
        x = 0b10  # each player at their belief, one discording edge: all ties
        assert best_response(game, x, 0) is None
        assert best_response(game, x, 1) is None

    def test_gadget_first_teardown_move(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        game = opinion_game(chain.graph, HALF)
        a1 = chain.player(1, "A")
        assert schedule.sequence[0] == a1
        assert best_response(game, schedule.start, a1) == 1


class TestRunDynamics:
    def test_start_at_equilibrium_no_flips(self):
        game = opinion_game(make_clique(3, 1), 0)
        trace = run_best_response(game, 0b111, RoundRobin())
        assert trace.flips == 0
        assert trace.converged

    def test_round_robin_reaches_enumerated_equilibrium(self, rng):
        for _ in range(8):
            n = rng.randint(3, 8)
            game = random_game(rng, n, precision_k=rng.choice([0, 1]))
            start = rng.randrange(1 << n)
            trace = run_best_response(game, start, RoundRobin())
            assert trace.converged
            assert trace.final in enumerate_nash(game)

    def test_potential_strictly_decreases(self, rng):
        game = random_game(rng, 8, precision_k=1)
        trace = run_best_response(game, (1 << 8) - 1, UniformRandom(seed=7))
        values = [game.potential(trace.start)] + [s.potential for s in trace.steps]
        assert all(a > b for a, b in zip(values, values[1:]))
        # no profile can repeat along a strictly decreasing potential
        seen = set()
        x = trace.start
        seen.add(x)
        for s in trace.steps:
            x ^= 1 << s.mover
            assert x not in seen
            seen.add(x)

    def test_unit_weight_flip_budget(self, rng):
        for _ in range(10):
            n = rng.randint(4, 10)
            graph = random_unit_graph(rng, n)
            game = opinion_game(graph, random_beliefs(rng, n))
            start = rng.randrange(1 << n)
            trace = run_best_response(game, start, RoundRobin())
            assert trace.converged
            assert trace.flips <= 2 * (len(graph.edges) + n)

    def test_random_scheduler_reproducible(self, rng):
        game = random_game(rng, 7, precision_k=1)
        a = run_best_response(game, 0b1010101, UniformRandom(seed=123))
        b = run_best_response(game, 0b1010101, UniformRandom(seed=123))
        assert a == b
        c = run_best_response(game, 0b1010101, UniformRandom(seed=124))
        assert c.converged  # different stream, same guarantee

    def test_fixed_sequence_order_decides_outcome(self):
        # both players want to end the strong disagreement; whoever is
        # scheduled first moves, after which the other is content
        g = SocialGraph.from_weights(2, [(0, 1, 2)])
        game = opinion_game(g, 0)
        first0 = run_best_response(game, 0b10, FixedSequence(players=(0, 1)))
        assert [(s.mover, s.old, s.new) for s in first0.steps] == [(0, 0, 1)]
        assert first0.final == 0b11 and first0.converged
        first1 = run_best_response(game, 0b10, FixedSequence(players=(1, 0)))
        assert [(s.mover, s.old, s.new) for s in first1.steps] == [(1, 1, 0)]
        assert first1.final == 0b00 and first1.converged

    def test_max_steps_cap(self, rng):
        game = opinion_game(make_clique(6, "0.1"), 1)
        trace = run_best_response(game, 0, RoundRobin(), max_steps=2)
        assert trace.flips == 2
        assert not trace.converged

    def test_bad_max_steps(self):
        game = opinion_game(make_clique(2, 1), 0)
        with pytest.raises(SchemaError):
            run_best_response(game, 0, RoundRobin(), max_steps=0)


class TestCertifyDrop:
    def test_empty_trace_certifies(self):
        game = opinion_game(make_clique(3, 1), 0)
        trace = run_best_response(game, 0, RoundRobin())
        assert certify_drop(game, trace)

    def test_canonicalized_unit_games_certify(self, rng):
        for _ in range(10):
            n = rng.randint(4, 9)
            game = opinion_game(random_unit_graph(rng, n), random_beliefs(rng, n))
            reduced = canonicalize_beliefs(game)
            trace = run_best_response(
                reduced, rng.randrange(1 << n), UniformRandom(seed=rng.randrange(10**6))
            )
            assert trace.converged
            assert certify_drop(reduced, trace)

    def test_raw_beliefs_can_drop_below_half(self):
        # even-degree center with belief just under 1/2 and split neighbors:
        # flipping 1 -> 0 improves by only 2|x-b| - 1 = 0.02
        g = SocialGraph.from_weights(3, [(0, 1, 1), (1, 2, 1)])
        game = opinion_game(g, [0, "0.49", 1])
        start = 0b110
        trace = run_best_response(game, start, FixedSequence(players=(1,)))
        assert trace.flips == 1
        drop = game.potential(start) - trace.steps[0].potential
        assert drop == Fraction(1, 50)
        assert not certify_drop(game, trace)

    def test_integer_version_certifies_fractional_weights(self, rng):
        for k in (1, 2):
            for _ in range(4):
                n = rng.randint(4, 8)
                game = random_game(rng, n, precision_k=k)
                reduced = canonicalize_beliefs(game)
                scaled = integer_version(reduced)
                trace = run_best_response(
                    scaled, rng.randrange(1 << n), UniformRandom(seed=rng.randrange(10**6))
                )
                assert trace.converged
                assert certify_drop(scaled, trace)
                budget = 2 * 10**k * (
                    sum(w for _, _, w in game.graph.weights()) + n
                )
                assert trace.flips <= budget

    def test_doctored_trace_rejected(self, rng):
        from dataclasses import replace

        game = opinion_game(make_clique(4, "0.2"), 1)
        trace = run_best_response(game, 0, RoundRobin())
        assert trace.flips > 0
        doctored = replace(
            trace, steps=(replace(trace.steps[0], potential=Fraction(0)),) + trace.steps[1:]
        )
        assert not certify_drop(game, doctored)


class TestAdversarialSchedule:
    def test_single_widget_is_the_ten_move_cycle(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        roles = [chain.roles[p][1] for p in schedule.sequence]
        assert roles == list("ABACBADCBA")
        assert schedule.cycle_counts == {1: (0, 1)}

    def test_switch_discovered_off(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        assert schedule.start & 1 == 0  # outer switch sits at 0

    def test_a_player_alternates_during_teardown(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        game = opinion_game(chain.graph, HALF)
        trace = validate_schedule(game, schedule)
        a1 = chain.player(1, "A")
        opinions = [0] + [s.new for s in trace.steps if s.mover == a1]
        assert opinions == [0, 1, 0, 1, 0]

    def test_two_widgets_cycle_counts(self):
        schedule = adversarial_schedule(make_gadget_chain(2, 1, 9))
        assert schedule.cycle_counts[2] == (2, 2)
        assert schedule.moves_in_gadget(2) == 2 * (10 + 2)

    def test_three_widgets_deep_flips(self):
        schedule = adversarial_schedule(make_gadget_chain(3, 1, 9))
        assert schedule.moves_in_gadget(3) == 4 * (10 + 2) == 48

    def test_every_move_strict_and_replayable(self):
        chain = make_gadget_chain(2, 1, 9)
        schedule = adversarial_schedule(chain)
        game = opinion_game(chain.graph, HALF)
        trace = validate_schedule(game, schedule)
        assert trace.flips == schedule.total_moves
        values = [game.potential(trace.start)] + [s.potential for s in trace.steps]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_corrupted_schedule_fails_loudly(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        game = opinion_game(chain.graph, HALF)
        from dataclasses import replace

        e1 = chain.player(1, "E")
        bad = replace(schedule, sequence=(e1,) + schedule.sequence[1:])
        with pytest.raises(InvariantError, match="no strict improvement"):
            validate_schedule(game, bad)

    def test_requires_half_beliefs(self):
        chain = make_gadget_chain(1, 1, 9)
        schedule = adversarial_schedule(chain)
        game = opinion_game(chain.graph, [HALF] * 6 + [Fraction(1, 4)])
        with pytest.raises(SchemaError):
            validate_schedule(game, schedule)

    def test_greedy_still_fast_on_chain(self):
        # adversarial order is what makes it slow; the greedy stays polynomial
        chain = make_gadget_chain(3, 1, 9)
        game = opinion_game(chain.graph, HALF)
        assert game.is_nash(greedy_nash(game, fill=0))
