"""Binary opinion games: utilities, potential, equilibria, belief reduction.

Players sit on a weighted social graph, hold an internal belief b_i in [0, 1],
and choose an opinion in {0, 1}. The cost of player i in profile x is

    c_i(x) = (x_i - b_i)^2 + sum over neighbors j with x_j != x_i of w_ij,

and the game admits the exact potential

    Phi(x) = sum_i (x_i - b_i)^2 + D(x),

where D(x) is the total weight of discording edges. Every quantity here is an
exact rational; internally costs and potentials are integers in units of
1 / (q^2 * 10^k), with q the common denominator of the beliefs and k the
weight precision, so equilibrium and threshold comparisons are never subject
to rounding.

Profiles are n-bit masks (bit i = player i's opinion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InvariantError, LimitExceededError, SchemaError
from .exact import bit, flip, format_decimal, to_fraction
from .graphs import SocialGraph

ENUMERATION_N_LIMIT = 22
DEGREE_CAP = 20  # threshold-belief subset sums cost 2^degree

_INT64_SAFE = 1 << 62

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class OpinionGame:
    graph: SocialGraph
    beliefs: tuple[Fraction, ...]

    def __post_init__(self):
        beliefs = tuple(to_fraction(b) for b in self.beliefs)
        object.__setattr__(self, "beliefs", beliefs)
        if len(beliefs) != self.graph.n:
            raise SchemaError(
                f"expected {self.graph.n} beliefs, got {len(beliefs)}"
            )
        for i, b in enumerate(beliefs):
            if not 0 <= b <= 1:
                raise SchemaError(f"beliefs[{i}]: {b} is outside [0, 1]")

    # -- integer scaling ------------------------------------------------------

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def belief_denominator(self) -> int:
        """Common denominator q of all beliefs."""
        q = 1
        for b in self.beliefs:
            q = math.lcm(q, b.denominator)
        return q

    @cached_property
    def scale(self) -> int:
        """Costs and potentials are integers in units of 1/scale."""
        return self.belief_denominator**2 * self.graph.pow10

    @cached_property
    def _sq(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Scaled squared belief distances: q^2*(s - b_i)^2 for s in {0, 1}."""
        q = self.belief_denominator
        sq0 = tuple(int(q * b) ** 2 for b in self.beliefs)
        sq1 = tuple((q - int(q * b)) ** 2 for b in self.beliefs)
        return sq0, sq1

    # -- exact per-profile quantities -----------------------------------------

    def _discord_scaled(self, x: int) -> int:
        """Discording weight in w*10^k units."""
        total = 0
        for i, j, w in self.graph.edges:
            if ((x >> i) ^ (x >> j)) & 1:
                total += w
        return total

    def _player_discord_scaled(self, x: int, i: int) -> int:
        xi = (x >> i) & 1
        total = 0
        for j, w in self.graph.adjacency[i]:
            if ((x >> j) & 1) != xi:
                total += w
        return total

    def _cost_scaled(self, x: int, i: int) -> int:
        sq0, sq1 = self._sq
        q2 = self.belief_denominator**2
        sq = sq1[i] if (x >> i) & 1 else sq0[i]
        return self.graph.pow10 * sq + q2 * self._player_discord_scaled(x, i)

    def _potential_scaled(self, x: int) -> int:
        sq0, sq1 = self._sq
        q2 = self.belief_denominator**2
        belief = sum(sq1[i] if (x >> i) & 1 else sq0[i] for i in range(self.n))
        return self.graph.pow10 * belief + q2 * self._discord_scaled(x)

    def cost_drop_scaled(self, x: int, i: int) -> int:
        """c_i(x) - c_i(x with i flipped), in 1/scale units; > 0 means the
        flip strictly improves player i."""
        sq0, sq1 = self._sq
        q2 = self.belief_denominator**2
        d_cur = self._player_discord_scaled(x, i)
        w_all = self.graph.strength[i]
        if (x >> i) & 1:
            dsq = sq1[i] - sq0[i]
        else:
            dsq = sq0[i] - sq1[i]
        return self.graph.pow10 * dsq + q2 * (2 * d_cur - w_all)

    # -- public exact API -----------------------------------------------------

    def cost(self, x: int, i: int) -> Fraction:
        return Fraction(self._cost_scaled(x, i), self.scale)

    def utility(self, x: int, i: int) -> Fraction:
        return -self.cost(x, i)

    def discord_weight(self, x: int) -> Fraction:
        """D(x): total weight of edges whose endpoints disagree."""
        return Fraction(self._discord_scaled(x), self.graph.pow10)

    def player_discord(self, x: int, i: int) -> Fraction:
        """D_i(x): weight from i to neighbors playing the opposite opinion."""
        return Fraction(self._player_discord_scaled(x, i), self.graph.pow10)

    def belief_cost(self, x: int) -> Fraction:
        """Sum of (x_i - b_i)^2, the belief part of the potential."""
        sq0, sq1 = self._sq
        q2 = self.belief_denominator**2
        total = sum(sq1[i] if (x >> i) & 1 else sq0[i] for i in range(self.n))
        return Fraction(total, q2)

    def potential(self, x: int) -> Fraction:
        return Fraction(self._potential_scaled(x), self.scale)

    def social_cost(self, x: int) -> Fraction:
        return self.potential(x) + self.discord_weight(x)

    def incident_weight(self, i: int) -> Fraction:
        """W_i: total weight incident to player i."""
        return Fraction(self.graph.strength[i], self.graph.pow10)

    def incident_weight_playing(self, x: int, i: int, s: int) -> Fraction:
        """W_i^s(x): weight from i to neighbors currently playing s."""
        total = 0
        for j, w in self.graph.adjacency[i]:
            if ((x >> j) & 1) == s:
                total += w
        return Fraction(total, self.graph.pow10)

    def nearest_integer_belief(self, i: int) -> int:
        """0 if b_i <= 1/2, else 1."""
        return 0 if self.beliefs[i] <= HALF else 1

    def belief_margin(self, i: int) -> Fraction:
        """1/2 - |B_i - b_i|: slack before neighbors overrule the belief."""
        b = self.beliefs[i]
        return HALF - abs(self.nearest_integer_belief(i) - b)

    # -- per-edge potential ---------------------------------------------------

    def edge_potential_cases(self, edge_index: int) -> tuple[Fraction, ...]:
        """The four values of the per-edge potential for (x_i, x_j) in
        {(0,0), (0,1), (1,0), (1,1)}; belief terms are split by degree."""
        i, j, w = self.graph.edges[edge_index]
        wf = Fraction(w, self.graph.pow10)
        di, dj = self.graph.degree(i), self.graph.degree(j)
        bi, bj = self.beliefs[i], self.beliefs[j]
        both0 = bi**2 / di + bj**2 / dj
        zero_one = bi**2 / di + (1 - bj) ** 2 / dj + wf
        one_zero = (1 - bi) ** 2 / di + bj**2 / dj + wf
        both1 = (1 - bi) ** 2 / di + (1 - bj) ** 2 / dj
        return both0, zero_one, one_zero, both1

    def edge_potential(self, x: int, edge_index: int) -> Fraction:
        i, j, _ = self.graph.edges[edge_index]
        cases = self.edge_potential_cases(edge_index)
        return cases[2 * bit(x, i) + bit(x, j)]

    # -- equilibrium checks ---------------------------------------------------

    def improves(self, x: int, i: int) -> bool:
        """True iff flipping player i strictly reduces their cost."""
        return self.cost_drop_scaled(x, i) > 0

    def is_nash(self, x: int) -> bool:
        return all(self.cost_drop_scaled(x, i) <= 0 for i in range(self.n))

    def nash_violations(self, x: int) -> list[int]:
        """Players that can strictly improve by flipping (empty iff Nash)."""
        return [i for i in range(self.n) if self.cost_drop_scaled(x, i) > 0]

    def majority_condition_holds(self, x: int, i: int) -> bool:
        """Weighted-majority characterization for a single player: i plays its
        nearest-integer belief iff at least W_i/2 - delta of its neighborhood
        does, with delta the belief margin; the boundary admits either opinion.
        """
        target = self.nearest_integer_belief(i)
        thr = self.incident_weight(i) / 2 - self.belief_margin(i)
        w_target = self.incident_weight_playing(x, i, target)
        if bit(x, i) == target:
            return w_target >= thr
        return w_target <= thr

    def is_nash_by_majority(self, x: int) -> bool:
        """Equilibrium test via the weighted-majority characterization; must
        agree with the direct one-flip test on every profile."""
        return all(self.majority_condition_holds(x, i) for i in range(self.n))

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        data = self.graph.to_dict()
        try:
            data["beliefs"] = [format_decimal(b) for b in self.beliefs]
        except SchemaError as exc:
            raise SchemaError(f"beliefs are not decimal-representable: {exc}") from exc
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "OpinionGame":
        graph = SocialGraph.from_dict(data)
        raw = data.get("beliefs")
        if not isinstance(raw, list):
            raise SchemaError("game object must have a 'beliefs' list")
        beliefs = []
        for i, item in enumerate(raw):
            try:
                beliefs.append(to_fraction(item))
            except SchemaError as exc:
                raise SchemaError(f"beliefs[{i}]: {exc}") from exc
        return cls(graph=graph, beliefs=tuple(beliefs))


def opinion_game(graph: SocialGraph, beliefs) -> OpinionGame:
    """Convenience constructor; a scalar belief is broadcast to all players."""
    if isinstance(beliefs, (int, float, str, Fraction)):
        beliefs = [beliefs] * graph.n
    return OpinionGame(graph=graph, beliefs=tuple(to_fraction(b) for b in beliefs))


class ScaledUtilityGame:
    """View of a game with all utilities multiplied by 10^k (k = weight
    precision), making every edge weight an integer. Best responses coincide
    with the base game; the potential scales by the same factor, and after
    belief canonicalization every improving flip drops it by at least 1/2.
    """

    def __init__(self, base: OpinionGame):
        self.base = base
        self.factor = base.graph.pow10

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def graph(self) -> SocialGraph:
        return self.base.graph

    @property
    def beliefs(self) -> tuple[Fraction, ...]:
        return self.base.beliefs

    def cost(self, x: int, i: int) -> Fraction:
        return self.factor * self.base.cost(x, i)

    def utility(self, x: int, i: int) -> Fraction:
        return -self.cost(x, i)

    def potential(self, x: int) -> Fraction:
        return self.factor * self.base.potential(x)

    def social_cost(self, x: int) -> Fraction:
        return self.factor * self.base.social_cost(x)

    def cost_drop_scaled(self, x: int, i: int) -> int:
        return self.base.cost_drop_scaled(x, i)

    def improves(self, x: int, i: int) -> bool:
        return self.base.improves(x, i)

    def is_nash(self, x: int) -> bool:
        return self.base.is_nash(x)


def integer_version(game: OpinionGame) -> ScaledUtilityGame:
    return ScaledUtilityGame(game)


# -- vectorized profile sweeps ------------------------------------------------

def _fits_int64(game: OpinionGame) -> bool:
    sq0, sq1 = game._sq
    q2 = game.belief_denominator**2
    bound = game.graph.pow10 * sum(map(max, sq0, sq1))
    bound += 3 * q2 * max(game.graph.total_weight_scaled, 1)
    return bound < _INT64_SAFE


def discord_scaled_array(game: OpinionGame) -> np.ndarray:
    """Discording weight (w*10^k units) for every profile, int64."""
    size = 1 << game.n
    states = np.arange(size, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    for i, j, w in game.graph.edges:
        out += w * (((states >> i) ^ (states >> j)) & 1)
    return out


def potential_scaled_array(game: OpinionGame) -> np.ndarray:
    """Potential (1/scale units) for every profile, int64."""
    if not _fits_int64(game):
        raise LimitExceededError(
            "weights/beliefs too large for vectorized exact arithmetic"
        )
    size = 1 << game.n
    states = np.arange(size, dtype=np.int64)
    sq0, sq1 = game._sq
    belief = np.zeros(size, dtype=np.int64)
    for i in range(game.n):
        b = (states >> i) & 1
        belief += sq0[i] + (sq1[i] - sq0[i]) * b
    q2 = game.belief_denominator**2
    return game.graph.pow10 * belief + q2 * discord_scaled_array(game)


def social_cost_scaled_array(game: OpinionGame) -> np.ndarray:
    q2 = game.belief_denominator**2
    return potential_scaled_array(game) + q2 * discord_scaled_array(game)


def improvement_array(game: OpinionGame, i: int) -> np.ndarray:
    """cost drop of flipping player i, for every profile (1/scale units)."""
    if not _fits_int64(game):
        raise LimitExceededError(
            "weights/beliefs too large for vectorized exact arithmetic"
        )
    size = 1 << game.n
    states = np.arange(size, dtype=np.int64)
    sq0, sq1 = game._sq
    q2 = game.belief_denominator**2
    w1 = np.zeros(size, dtype=np.int64)
    for j, w in game.graph.adjacency[i]:
        w1 += w * ((states >> j) & 1)
    w_all = game.graph.strength[i]
    bit_i = (states >> i) & 1
    d_cur = np.where(bit_i == 1, w_all - w1, w1)
    dsq = np.where(bit_i == 1, sq1[i] - sq0[i], sq0[i] - sq1[i])
    return game.graph.pow10 * dsq + q2 * (2 * d_cur - w_all)


def nash_mask_array(game: OpinionGame) -> np.ndarray:
    """Boolean mask over all 2^n profiles: True where no player can improve."""
    if not _fits_int64(game):
        return np.array([game.is_nash(x) for x in range(1 << game.n)], dtype=bool)
    size = 1 << game.n
    improv = np.zeros(size, dtype=bool)
    for i in range(game.n):
        improv |= improvement_array(game, i) > 0
    return ~improv


# -- equilibrium computation --------------------------------------------------

def _check_enum_limit(game: OpinionGame, n_limit: int):
    if game.n > n_limit:
        raise LimitExceededError(
            f"profile enumeration limited to n <= {n_limit}, got n={game.n}"
        )


def greedy_nash(game: OpinionGame, fill: int = 0) -> int:
    """Greedy equilibrium: start with everyone at ``fill`` and repeatedly flip
    players that strictly prefer the other opinion, re-scanning 0..n-1 until a
    fixpoint. The result maximizes the number of players at ``fill``."""
    if fill not in (0, 1):
        raise SchemaError(f"fill must be 0 or 1, got {fill!r}")
    n = game.n
    x = 0 if fill == 0 else (1 << n) - 1
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if bit(x, i) == fill and game.improves(x, i):
                x = flip(x, i)
                changed = True
    if not game.is_nash(x):
        raise InvariantError("greedy fixpoint is not an equilibrium")
    return x


def enumerate_nash(game: OpinionGame, n_limit: int = ENUMERATION_N_LIMIT) -> list[int]:
    """All equilibrium profiles, as sorted bitmasks."""
    _check_enum_limit(game, n_limit)
    mask = nash_mask_array(game)
    return [int(x) for x in np.flatnonzero(mask)]


def optimum_profile(
    game: OpinionGame, n_limit: int = ENUMERATION_N_LIMIT
) -> tuple[int, Fraction]:
    """Social-cost minimizer (ties -> smallest bitmask) and its exact cost."""
    _check_enum_limit(game, n_limit)
    if _fits_int64(game):
        sc = social_cost_scaled_array(game)
        idx = int(np.argmin(sc))
        return idx, Fraction(int(sc[idx]), game.scale)
    best, best_x = None, 0
    for x in range(1 << game.n):
        c = game._potential_scaled(x) + game.belief_denominator**2 * game._discord_scaled(x)
        if best is None or c < best:
            best, best_x = c, x
    return best_x, Fraction(best, game.scale)


@dataclass(frozen=True)
class EquilibriumReport:
    nash_profiles: tuple[int, ...]
    optimum: int
    optimum_cost: Fraction
    best_nash_cost: Fraction
    worst_nash_cost: Fraction
    poa: object  # Fraction, or math.inf when the optimum has cost 0
    pos: object

    def to_dict(self) -> dict:
        from .exact import format_rational

        def ratio(r):
            return "inf" if r == math.inf else format_rational(r)

        return {
            "nash_profiles": [f"{x:x}" for x in self.nash_profiles],
            "nash_count": len(self.nash_profiles),
            "optimum": f"{self.optimum:x}",
            "optimum_cost": format_rational(self.optimum_cost),
            "best_nash_cost": format_rational(self.best_nash_cost),
            "worst_nash_cost": format_rational(self.worst_nash_cost),
            "poa": ratio(self.poa),
            "pos": ratio(self.pos),
        }


def _cost_ratio(cost: Fraction, optimum: Fraction):
    if optimum == 0:
        return Fraction(1) if cost == 0 else math.inf
    return cost / optimum


def poa_pos(game: OpinionGame, n_limit: int = ENUMERATION_N_LIMIT) -> EquilibriumReport:
    """Price of anarchy / stability by exhaustive enumeration."""
    _check_enum_limit(game, n_limit)
    nash = enumerate_nash(game, n_limit)
    if not nash:
        raise InvariantError("no equilibrium found; the potential argument guarantees one")
    opt, opt_cost = optimum_profile(game, n_limit)
    costs = [game.social_cost(x) for x in nash]
    best = min(costs)
    worst = max(costs)
    return EquilibriumReport(
        nash_profiles=tuple(nash),
        optimum=opt,
        optimum_cost=opt_cost,
        best_nash_cost=best,
        worst_nash_cost=worst,
        poa=_cost_ratio(worst, opt_cost),
        pos=_cost_ratio(best, opt_cost),
    )


# -- threshold beliefs and canonicalization -----------------------------------

def threshold_beliefs(
    game: OpinionGame, i: int, degree_cap: int = DEGREE_CAP
) -> set[Fraction]:
    """Belief values in [0, 1] at which player i is exactly indifferent for
    some opponent profile: 1/2 - W_i/2 + s over achievable zero-side weights s
    (subset sums of the incident weights)."""
    adj = game.graph.adjacency[i]
    if len(adj) > degree_cap:
        raise LimitExceededError(
            f"degree {len(adj)} exceeds the subset-sum cap {degree_cap}"
        )
    sums = {0}
    for _, w in adj:
        sums |= {s + w for s in sums}
    pow10 = game.graph.pow10
    w_all = game.graph.strength[i]
    out = set()
    for s in sums:
        t = Fraction(pow10 - w_all + 2 * s, 2 * pow10)
        if 0 <= t <= 1:
            out.add(t)
    return out


def belief_levels(game: OpinionGame, i: int, degree_cap: int = DEGREE_CAP) -> tuple[Fraction, ...]:
    """Sorted threshold set extended with the endpoints 0 and 1."""
    levels = threshold_beliefs(game, i, degree_cap) | {Fraction(0), Fraction(1)}
    return tuple(sorted(levels))


def canonicalize_beliefs(game: OpinionGame, degree_cap: int = DEGREE_CAP) -> OpinionGame:
    """Replace each non-threshold belief by the midpoint of its enclosing pair
    of consecutive threshold levels; threshold beliefs are kept. The resulting
    game has the same best-response correspondence on every profile."""
    new_beliefs = []
    for i, b in enumerate(game.beliefs):
        levels = belief_levels(game, i, degree_cap)
        if b in levels:
            new_beliefs.append(b)
            continue
        lo = max(t for t in levels if t < b)
        hi = min(t for t in levels if t > b)
        new_beliefs.append((lo + hi) / 2)
    return OpinionGame(graph=game.graph, beliefs=tuple(new_beliefs))
