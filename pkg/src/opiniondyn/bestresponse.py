"""Best-response dynamics: schedulers, traces, drop certification, and the
adversarial widget schedule with exponentially many strict improvements.

A step is an actual opinion flip; scheduler probes that find no strict
improvement are not counted. Ties never move (best response at exact
indifference is "stay"), so the exact potential strictly decreases along any
trace and no profile can repeat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantError, SchemaError
from .exact import bit, flip
from .games import OpinionGame, ScaledUtilityGame
from .graphs import GadgetChain

HALF = Fraction(1, 2)


# -- schedulers ---------------------------------------------------------------

@dataclass(frozen=True)
class RoundRobin:
    """Probe players 0..n-1 cyclically; converged after a clean full pass."""


@dataclass(frozen=True)
class UniformRandom:
    """Probe a uniformly random player each time. The stream is PCG64 with an
    explicit seed, so traces are reproducible from (game, start, seed)."""

    seed: int


@dataclass(frozen=True)
class FixedSequence:
    """Probe exactly the given players in order (the adversarial mode)."""

    players: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(int(p) for p in self.players))


Scheduler = RoundRobin | UniformRandom | FixedSequence


# -- traces -------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    t: int
    mover: int
    old: int
    new: int
    potential: Fraction  # exact potential after the flip


@dataclass(frozen=True)
class Trace:
    start: int
    steps: tuple[TraceStep, ...]
    final: int
    converged: bool

    @property
    def flips(self) -> int:
        return len(self.steps)


def best_response(game, x: int, i: int):
    """The strictly improving opinion for player i, or None to stay put."""
    if game.improves(x, i):
        return 1 - bit(x, i)
    return None


def run_best_response(game, x0: int, scheduler: Scheduler, max_steps: int = 10**6) -> Trace:
    """Run the dynamics from ``x0`` until an explicit all-player check finds no
    strict improvement, the scheduler's sequence is exhausted, or ``max_steps``
    flips have happened. Works on plain and utility-scaled games alike."""
    if max_steps < 1:
        raise SchemaError(f"max_steps must be >= 1, got {max_steps}")
    x = x0
    steps: list[TraceStep] = []

    def record(i: int, new: int):
        nonlocal x
        old = bit(x, i)
        x = flip(x, i)
        steps.append(TraceStep(len(steps) + 1, i, old, new, game.potential(x)))

    if isinstance(scheduler, RoundRobin):
        n = game.n
        while len(steps) < max_steps:
            moved = False
            for i in range(n):
                s = best_response(game, x, i)
                if s is not None:
                    record(i, s)
                    moved = True
                    if len(steps) >= max_steps:
                        break
            if not moved:
                break
    elif isinstance(scheduler, UniformRandom):
        rng = np.random.Generator(np.random.PCG64(scheduler.seed))
        while len(steps) < max_steps:
            if game.is_nash(x):
                break
            i = int(rng.integers(game.n))
            s = best_response(game, x, i)
            if s is not None:
                record(i, s)
    elif isinstance(scheduler, FixedSequence):
        for i in scheduler.players:
            if not 0 <= i < game.n:
                raise SchemaError(f"scheduled player {i} out of range")
            if len(steps) >= max_steps:
                break
            s = best_response(game, x, i)
            if s is not None:
                record(i, s)
    else:
        raise SchemaError(f"unknown scheduler {scheduler!r}")

    return Trace(start=x0, steps=tuple(steps), final=x, converged=game.is_nash(x))


def certify_drop(game, trace: Trace, min_drop: Fraction = HALF) -> bool:
    """Replay a trace and certify that every flip decreased the potential by at
    least ``min_drop`` (1/2 in the units of the game the trace ran on; use the
    utility-scaled game for fractional weights). Also re-derives each recorded
    potential, so a doctored trace fails."""
    x = trace.start
    prev = game.potential(x)
    for step in trace.steps:
        if bit(x, step.mover) != step.old:
            return False
        x = flip(x, step.mover)
        phi = game.potential(x)
        if phi != step.potential:
            return False
        if prev - phi < min_drop:
            return False
        prev = phi
    return x == trace.final


# -- adversarial widget schedule ---------------------------------------------

# Movers of the 10-flip teardown cycle, by role letter. The build-up cycle is
# [B, D]. During a teardown the A player leaves 0 at flips 1 and 6 (enabling a
# build-up of the next widget) and returns to 0 at flips 3 and 10 (enabling a
# teardown), so one teardown of widget i induces 2 of each cycle in widget i+1.
_TEARDOWN_ROLES = "ABACBADCBA"
_TEARDOWN_SUBCYCLE = {1: "on", 3: "off", 6: "on", 10: "off"}


@dataclass(frozen=True)
class GadgetSchedule:
    chain: GadgetChain
    start: int
    sequence: tuple[int, ...]
    cycle_counts: dict[int, tuple[int, int]] = field(hash=False)  # widget -> (on, off)

    @property
    def total_moves(self) -> int:
        return len(self.sequence)

    def moves_in_gadget(self, gadget: int) -> int:
        players = {p for p, (g, _) in self.chain.roles.items() if g == gadget}
        return sum(1 for p in self.sequence if p in players)


def _expand_teardown(chain: GadgetChain, gadget: int, seq: list[int], counts: dict):
    on, off = counts.get(gadget, (0, 0))
    counts[gadget] = (on, off + 1)
    deeper = gadget + 1 <= chain.gadgets
    for pos, role in enumerate(_TEARDOWN_ROLES, start=1):
        seq.append(chain.player(gadget, role))
        if deeper and pos in _TEARDOWN_SUBCYCLE:
            if _TEARDOWN_SUBCYCLE[pos] == "on":
                o, f = counts.get(gadget + 1, (0, 0))
                counts[gadget + 1] = (o + 1, f)
                seq.append(chain.player(gadget + 1, "B"))
                seq.append(chain.player(gadget + 1, "D"))
            else:
                _expand_teardown(chain, gadget + 1, seq, counts)


def _start_profile(chain: GadgetChain, switch_value: int) -> int:
    x = switch_value  # player 0 is the outer switch
    x |= 1 << chain.player(1, "B")
    x |= 1 << chain.player(1, "D")
    for g in range(1, chain.gadgets + 1):
        x |= 1 << chain.player(g, "F")
    return x


def adversarial_schedule(chain: GadgetChain) -> GadgetSchedule:
    """Build the fixed player sequence driving widget g through 2^(g-1)
    teardown (and, for g >= 2, build-up) cycles, and verify by replay that
    every scheduled move is a strict best response. The outer switch's initial
    opinion is discovered by validation rather than assumed."""
    seq: list[int] = []
    counts: dict[int, tuple[int, int]] = {}
    _expand_teardown(chain, 1, seq, counts)

    game = OpinionGame(
        graph=chain.graph, beliefs=tuple(HALF for _ in range(chain.graph.n))
    )
    last_error = None
    for switch_value in (0, 1):
        start = _start_profile(chain, switch_value)
        schedule = GadgetSchedule(
            chain=chain, start=start, sequence=tuple(seq), cycle_counts=counts
        )
        try:
            validate_schedule(game, schedule)
            return schedule
        except InvariantError as exc:
            last_error = exc
    raise InvariantError(f"no switch setting makes the schedule valid: {last_error}")


def validate_schedule(game, schedule: GadgetSchedule) -> Trace:
    """Replay the schedule move by move, requiring a strict improvement at
    every scheduled player; raises InvariantError on the first refusal."""
    for i, b in enumerate(game.beliefs):
        if b != HALF:
            raise SchemaError(f"beliefs[{i}]: widget schedules need belief 1/2")
    x = schedule.start
    steps = []
    for t, i in enumerate(schedule.sequence, start=1):
        s = best_response(game, x, i)
        if s is None:
            raise InvariantError(
                f"move {t}: player {i} has no strict improvement at {x:#x}"
            )
        old = bit(x, i)
        x = flip(x, i)
        steps.append(TraceStep(t, i, old, s, game.potential(x)))
    return Trace(start=schedule.start, steps=tuple(steps), final=x,
                 converged=game.is_nash(x))
