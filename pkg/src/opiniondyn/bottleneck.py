"""Bottleneck-ratio lower bounds on the mixing time.

The candidate bottleneck set is built around a consensus profile: starting
from all-zeros (or all-ones), collect every profile reachable on the Hamming
graph through profiles whose potential stays strictly below b* + CW, where CW
is the weighted cutwidth and b* the smallest belief cost among profiles whose
discording weight is exactly CW. The stationary flow out of that set is
provably small, giving t_mix >= 1/(4 B(R)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvariantError, LimitExceededError, SchemaError
from .games import discord_scaled_array, potential_scaled_array
from .graphs import cutwidth_exact
from .logit import LogitChain, gibbs

BOTTLENECK_N_LIMIT = 20


def _subset_mask(chain: LogitChain, subset) -> np.ndarray:
    if isinstance(subset, np.ndarray) and subset.dtype == bool:
        if subset.shape != (chain.size,):
            raise SchemaError(f"mask must have length {chain.size}")
        return subset
    mask = np.zeros(chain.size, dtype=bool)
    for x in subset:
        if not 0 <= x < chain.size:
            raise SchemaError(f"state {x} out of range")
        mask[x] = True
    return mask


def _boundary_flow(chain: LogitChain, in_set: np.ndarray, pi: np.ndarray):
    """(boundary mask, boundary edge count, stationary flow out of the set)."""
    states = np.arange(chain.size)
    flip_table = chain.flip_table
    boundary = np.zeros(chain.size, dtype=bool)
    edges = 0
    flow = 0.0
    for i in range(chain.n):
        crossing = in_set & ~in_set[states ^ (1 << i)]
        boundary |= crossing
        edges += int(crossing.sum())
        flow += float((pi[crossing] * flip_table[i][crossing]).sum()) / chain.n
    return boundary, edges, flow


def bottleneck_lower_bound(chain: LogitChain, subset) -> float:
    """t_mix >= 1/(4 B(L)) for any L with pi(L) <= 1/2, where B(L) is the
    stationary flow out of L divided by pi(L)."""
    in_set = _subset_mask(chain, subset)
    if not in_set.any():
        raise SchemaError("subset must be non-empty")
    pi = gibbs(chain)
    pi_mass = float(pi[in_set].sum())
    if pi_mass > 0.5:
        raise SchemaError(f"subset has stationary mass {pi_mass:.6g} > 1/2")
    _, _, flow = _boundary_flow(chain, in_set, pi)
    if flow <= 0.0:
        raise InvariantError("no flow out of the subset; chain not ergodic?")
    return pi_mass / (4.0 * flow)


@dataclass(frozen=True, eq=False)
class BottleneckReport:
    side: int                    # 0: grown from all-zeros, 1: from all-ones
    states: np.ndarray           # bool mask of the set R
    boundary: np.ndarray         # bool mask of profiles in R with an outside neighbor
    boundary_edge_count: int     # Hamming edges leaving R
    pi_mass: float               # pi(R)
    flow_out: float              # Q(R, complement)
    ratio: float                 # B(R) = flow_out / pi_mass
    mixing_lower_bound: float    # 1 / (4 B(R))
    ratio_upper_bound: float     # n * |boundary| * exp(-beta*(CW + b* - b(base)))
    cutwidth: Fraction
    barrier_cost: Fraction       # b*: min belief cost at discording weight CW
    barrier_exact: bool          # False if the [CW, CW + w_max) fallback fired
    base_cost: Fraction          # belief cost of the chosen consensus profile
    applicable: bool             # pi(R) <= 1/2 and R non-empty

    @property
    def size(self) -> int:
        return int(self.states.sum())

    @property
    def boundary_size(self) -> int:
        return int(self.boundary.sum())

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "set_size": self.size,
            "boundary_size": self.boundary_size,
            "boundary_edge_count": self.boundary_edge_count,
            "pi_mass": f"{self.pi_mass:.17g}",
            "flow_out": f"{self.flow_out:.17g}",
            "bottleneck_ratio": f"{self.ratio:.17g}",
            "mixing_lower_bound": f"{self.mixing_lower_bound:.17g}",
            "ratio_upper_bound": f"{self.ratio_upper_bound:.17g}",
            "cutwidth": str(self.cutwidth),
            "barrier_cost": str(self.barrier_cost),
            "barrier_exact": self.barrier_exact,
            "applicable": self.applicable,
        }


def _reachable(size: int, n: int, allowed: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(size, dtype=bool)
    if not allowed[start]:
        return seen
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    while frontier.size:
        nxt = []
        for i in range(n):
            cand = frontier ^ (1 << i)
            fresh = cand[allowed[cand] & ~seen[cand]]
            if fresh.size:
                seen[fresh] = True
                nxt.append(fresh)
        frontier = np.unique(np.concatenate(nxt)) if nxt else np.array([], dtype=np.int64)
    return seen


def bottleneck_set(chain: LogitChain, n_limit: int = BOTTLENECK_N_LIMIT) -> BottleneckReport:
    """Build the low-potential set around a consensus profile and report its
    bottleneck ratio, the implied mixing lower bound, and the analytic upper
    estimate n*|boundary|*e^(-beta*(CW + b* - b(base)))."""
    n = chain.n
    if n > n_limit:
        raise LimitExceededError(f"bottleneck construction limited to n <= {n_limit}")
    game = chain.game
    size = chain.size
    q2 = game.belief_denominator**2
    phi = potential_scaled_array(game)          # 1/scale units
    discord = discord_scaled_array(game)        # w*10^k units
    belief = phi - q2 * discord                 # 1/scale units

    cw = cutwidth_exact(game.graph)
    at_barrier = discord == cw.value_scaled
    barrier_exact = bool(at_barrier.any())
    if not barrier_exact:
        # weighted fallback window; flagged in the report
        window = (discord >= cw.value_scaled) & (
            discord < cw.value_scaled + game.graph.max_weight_scaled
        )
        if not window.any():
            raise InvariantError("no profile realizes the cutwidth barrier")
        at_barrier = window
    barrier_scaled = int(belief[at_barrier].min())

    threshold = barrier_scaled + q2 * cw.value_scaled  # strict: Phi < b* + CW
    allowed = phi < threshold
    ones = size - 1
    r0 = _reachable(size, n, allowed, 0)
    r1 = _reachable(size, n, allowed, ones)
    pi = gibbs(chain)
    mass0 = float(pi[r0].sum())
    mass1 = float(pi[r1].sum())

    if mass0 <= 0.5 and mass1 <= 0.5:
        side = 0 if phi[0] <= phi[ones] else 1
    elif mass0 <= 0.5:
        side = 0
    elif mass1 <= 0.5:
        side = 1
    else:
        side = 0 if phi[0] <= phi[ones] else 1  # reported as not applicable
    in_set = r0 if side == 0 else r1
    pi_mass = mass0 if side == 0 else mass1
    base = 0 if side == 0 else ones

    boundary, edge_count, flow = _boundary_flow(chain, in_set, pi)
    applicable = bool(in_set.any()) and pi_mass <= 0.5
    ratio = flow / pi_mass if pi_mass > 0 else math.inf
    lower = pi_mass / (4.0 * flow) if flow > 0 else math.inf

    scale = game.scale
    barrier_cost = Fraction(barrier_scaled, scale)
    base_cost = Fraction(int(belief[base]), scale)
    exponent = float(cw.value) + float(barrier_cost) - float(base_cost)
    upper = n * int(boundary.sum()) * math.exp(-chain.beta * exponent)

    return BottleneckReport(
        side=side,
        states=in_set,
        boundary=boundary,
        boundary_edge_count=edge_count,
        pi_mass=pi_mass,
        flow_out=flow,
        ratio=ratio,
        mixing_lower_bound=lower,
        ratio_upper_bound=upper,
        cutwidth=cw.value,
        barrier_cost=barrier_cost,
        barrier_exact=barrier_exact,
        base_cost=base_cost,
        applicable=applicable,
    )
