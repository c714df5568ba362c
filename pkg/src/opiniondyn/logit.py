"""Logit dynamics for opinion games: noisy single-player updates, the exact
transition matrix, the Gibbs stationary distribution, total-variation mixing
time, simulation, and the coordinatewise coupling.

One step of the chain picks a player uniformly at random and resamples their
opinion from the two-point Boltzmann distribution with rationality beta over
their utilities; the chain is reversible with respect to pi(x) ~ e^(-beta*Phi(x)).
Probabilities are doubles computed through a stable logistic of the exact
utility difference, so large beta never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvariantError, LimitExceededError, SchemaError
from .exact import bit
from .games import OpinionGame, potential_scaled_array

TRANSITION_N_LIMIT = 14
TABLE_N_LIMIT = 20       # per-player update tables: n * 2^n doubles
MIXING_N_LIMIT = 12
GIBBS_N_LIMIT = 22
SCAN_STEP_LIMIT = 2048   # sequential d(t) scan before switching strategies
LADDER_STATE_LIMIT = 256  # doubling ladder kept only for small state spaces


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _sigmoid_array(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass(frozen=True)
class LogitChain:
    """The logit-dynamics Markov chain of a game at rationality beta >= 0."""

    game: OpinionGame
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        if not self.beta >= 0:
            raise SchemaError(f"beta must be >= 0, got {self.beta}")

    @property
    def n(self) -> int:
        return self.game.n

    @property
    def size(self) -> int:
        return 1 << self.game.n

    def _z_one(self, x: int, i: int) -> float:
        """beta * (u_i(1) - u_i(0)) at the opponent profile of x, exact diff."""
        game = self.game
        c1 = game._cost_scaled(x | (1 << i), i)
        c0 = game._cost_scaled(x & ~(1 << i), i)
        return self.beta * float(c0 - c1) / game.scale

    @cached_property
    def potentials(self) -> np.ndarray:
        """Potential of every profile as float64 (exact integer scaled down)."""
        if self.n > GIBBS_N_LIMIT:
            raise LimitExceededError(
                f"state-space vectors limited to n <= {GIBBS_N_LIMIT}, got {self.n}"
            )
        phi = potential_scaled_array(self.game)
        return phi.astype(np.float64) / float(self.game.scale)

    @cached_property
    def prob_one_table(self) -> np.ndarray:
        """sigma_i(1 | x_{-i}) for every player i and profile x, shape (n, 2^n).

        Depends only on the opponents' opinions, never on bit i of x.
        """
        if self.n > TABLE_N_LIMIT:
            raise LimitExceededError(
                f"per-player update tables limited to n <= {TABLE_N_LIMIT}"
            )
        game = self.game
        size = self.size
        states = np.arange(size, dtype=np.int64)
        sq0, sq1 = game._sq
        q2 = game.belief_denominator**2
        pow10 = game.graph.pow10
        scale = float(game.scale)
        table = np.empty((self.n, size), dtype=np.float64)
        for i in range(self.n):
            w1 = np.zeros(size, dtype=np.int64)
            for j, w in game.graph.adjacency[i]:
                w1 += w * ((states >> j) & 1)
            diff = pow10 * (sq0[i] - sq1[i]) + q2 * (2 * w1 - game.graph.strength[i])
            table[i] = _sigmoid_array(self.beta * diff.astype(np.float64) / scale)
        return table

    @cached_property
    def flip_table(self) -> np.ndarray:
        """Probability that player i, once selected, flips profile x."""
        states = np.arange(self.size, dtype=np.int64)
        table = self.prob_one_table.copy()
        for i in range(self.n):
            ones = ((states >> i) & 1) == 1
            table[i, ones] = 1.0 - table[i, ones]
        return table


def update_prob(chain: LogitChain, x: int, i: int, s: int) -> float:
    """sigma_i(s | x_{-i}): Boltzmann probability of opinion s for player i."""
    if s not in (0, 1):
        raise SchemaError(f"opinion must be 0 or 1, got {s!r}")
    p1 = _sigmoid(chain._z_one(x, i))
    return p1 if s == 1 else 1.0 - p1


def transition_matrix(chain: LogitChain, n_limit: int = TRANSITION_N_LIMIT) -> np.ndarray:
    """Dense row-stochastic matrix with nonzeros only on Hamming-1 moves; the
    diagonal is 1 minus the off-diagonal row sum to enforce stochasticity."""
    if chain.n > n_limit:
        raise LimitExceededError(f"transition matrix limited to n <= {n_limit}")
    size = chain.size
    states = np.arange(size)
    flips = chain.flip_table / chain.n
    P = np.zeros((size, size), dtype=np.float64)
    for i in range(chain.n):
        P[states, states ^ (1 << i)] = flips[i]
    P[states, states] = 1.0 - flips.sum(axis=0)
    return P


def gibbs(chain: LogitChain, n_limit: int = GIBBS_N_LIMIT) -> np.ndarray:
    """Stationary distribution pi(x) ~ e^(-beta*Phi(x)), normalized stably by
    shifting out the minimum potential before exponentiation."""
    if chain.n > n_limit:
        raise LimitExceededError(f"stationary vector limited to n <= {n_limit}")
    phi = chain.potentials
    w = np.exp(-chain.beta * (phi - phi.min()))
    return w / w.sum()


def check_reversibility(chain: LogitChain, n_limit: int = TRANSITION_N_LIMIT) -> float:
    """Max detailed-balance violation |pi(x)P(x,y) - pi(y)P(y,x)| over pairs."""
    P = transition_matrix(chain, n_limit)
    pi = gibbs(chain)
    Q = pi[:, None] * P
    return float(np.abs(Q - Q.T).max())


def tv_distance(mu, nu) -> float:
    """Total variation distance, the half-L1 form."""
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if mu.shape != nu.shape:
        raise SchemaError(f"length mismatch: {mu.shape} vs {nu.shape}")
    return 0.5 * float(np.abs(mu - nu).sum())


# -- exact mixing time --------------------------------------------------------

def _rows_step(chain: LogitChain, M: np.ndarray) -> np.ndarray:
    """One chain step applied to a bank of row distributions, using only the
    per-player flip probabilities (never the dense matrix)."""
    states = np.arange(chain.size)
    flips = chain.flip_table / chain.n
    out = M * (1.0 - flips.sum(axis=0))[None, :]
    for i in range(chain.n):
        out += (M * flips[i][None, :])[:, states ^ (1 << i)]
    return out


def _worst_row_tv(M: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(M - pi[None, :]).sum(axis=1).max())


def mixing_time_exact(
    chain: LogitChain,
    eps: float = 0.25,
    n_limit: int = MIXING_N_LIMIT,
    scan_limit: int = SCAN_STEP_LIMIT,
) -> int:
    """Smallest t with max-start total variation d(t) <= eps.

    Scans t = 1, 2, ... over a bank holding all 2^n start rows (d(t) is
    non-increasing, so the first crossing is the answer). Slowly mixing chains
    that outlive the scan switch to repeated squaring of the dense matrix plus
    a binary search on the monotone d(t); the squaring ladder is only kept for
    state spaces of at most LADDER_STATE_LIMIT profiles.
    """
    if not 0 < eps < 0.5:
        raise SchemaError(f"eps must be in (0, 1/2), got {eps}")
    if chain.n > n_limit:
        raise LimitExceededError(f"exact mixing limited to n <= {n_limit}")
    pi = gibbs(chain)
    M = np.eye(chain.size, dtype=np.float64)
    for t in range(1, scan_limit + 1):
        M = _rows_step(chain, M)
        if _worst_row_tv(M, pi) <= eps:
            return t

    if chain.size > LADDER_STATE_LIMIT:
        raise LimitExceededError(
            f"d(t) still above {eps} after {scan_limit} steps and the state "
            f"space is too large ({chain.size}) for the squaring ladder"
        )
    P = transition_matrix(chain)
    ladder = [P]
    while _worst_row_tv(ladder[-1], pi) > eps:
        if len(ladder) > 200:
            raise InvariantError("mixing time exceeds 2^200 steps; chain ergodic?")
        ladder.append(ladder[-1] @ ladder[-1])
    j = len(ladder) - 1
    if j == 0:
        return 1
    lo, hi = 1 << (j - 1), 1 << j  # d(lo) > eps, d(hi) <= eps

    def power(t: int) -> np.ndarray:
        acc = None
        k = 0
        while t:
            if t & 1:
                acc = ladder[k] if acc is None else acc @ ladder[k]
            t >>= 1
            k += 1
        return acc

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _worst_row_tv(power(mid), pi) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def mixing_time_matrix_power(
    chain: LogitChain,
    eps: float = 0.25,
    n_limit: int = MIXING_N_LIMIT,
    t_limit: int = 10**5,
) -> int:
    """Independent brute-force oracle: accumulate dense powers P^t one multiply
    at a time and report the first t with d(t) <= eps."""
    if not 0 < eps < 0.5:
        raise SchemaError(f"eps must be in (0, 1/2), got {eps}")
    if chain.n > n_limit:
        raise LimitExceededError(f"exact mixing limited to n <= {n_limit}")
    P = transition_matrix(chain)
    pi = gibbs(chain)
    M = P.copy()
    for t in range(1, t_limit + 1):
        if _worst_row_tv(M, pi) <= eps:
            return t
        M = M @ P
    raise LimitExceededError(f"no mixing within {t_limit} steps at eps={eps}")


# -- simulation ---------------------------------------------------------------

@dataclass(frozen=True)
class SimulationResult:
    start: int
    states: tuple[int, ...]   # visited states, including the start
    counts: dict

    @property
    def steps(self) -> int:
        return len(self.states) - 1


def simulate(chain: LogitChain, x0: int, steps: int, seed: int) -> SimulationResult:
    """Run the dynamics for ``steps`` single-player updates (any n). The
    trajectory is a pure function of (game, beta, x0, seed); the player pick
    and the opinion draw consume one PCG64 variate each."""
    if steps < 0:
        raise SchemaError(f"steps must be >= 0, got {steps}")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = x0
    visited = [x]
    counts: dict[int, int] = {x: 1}
    n = chain.n
    for _ in range(steps):
        i = int(rng.integers(n))
        p1 = _sigmoid(chain._z_one(x, i))
        s = 1 if rng.random() < p1 else 0
        x = (x | (1 << i)) if s else (x & ~(1 << i))
        visited.append(x)
        counts[x] = counts.get(x, 0) + 1
    return SimulationResult(start=x0, states=tuple(visited), counts=counts)


# -- coordinatewise coupling --------------------------------------------------

def coupling_joint(chain: LogitChain, x: int, y: int, i: int) -> dict:
    """Joint law of the coupled update of player i from (x, y): mass on the
    agreeing pairs is the pointwise minimum of the two update distributions,
    the leftover goes to the single disagreeing pair."""
    px = _sigmoid(chain._z_one(x, i))  # sigma_i(1 | x_{-i})
    py = _sigmoid(chain._z_one(y, i))
    p00 = min(1.0 - px, 1.0 - py)
    p11 = min(px, py)
    p01 = (1.0 - px) - p00
    p10 = px - p11
    return {(0, 0): p00, (1, 1): p11, (0, 1): p01, (1, 0): p10}


def coupled_update(chain: LogitChain, x: int, y: int, i: int, u: float) -> tuple[int, int]:
    """Deterministic core of the coupling given the shared uniform draw u."""
    joint = coupling_joint(chain, x, y, i)
    acc = 0.0
    outcome = (1, 0)
    for pair in ((0, 0), (1, 1), (0, 1), (1, 0)):
        acc += joint[pair]
        if u < acc:
            outcome = pair
            break
    sx, sy = outcome
    mask = 1 << i
    x = (x | mask) if sx else (x & ~mask)
    y = (y | mask) if sy else (y & ~mask)
    return x, y


def coupling_step(chain: LogitChain, x: int, y: int, rng: np.random.Generator) -> tuple[int, int]:
    """One coupled step: shared uniformly random player, then the joint draw.
    Marginals are each one logit step; once x = y the chains never split."""
    i = int(rng.integers(chain.n))
    return coupled_update(chain, x, y, i, float(rng.random()))


def contraction_check(chain: LogitChain, n_limit: int = MIXING_N_LIMIT) -> float:
    """Exact max over Hamming-adjacent pairs of the expected coupled distance
    after one step: (n-1)/n plus the averaged update-probability gaps of the
    differing player's neighbors. Below 1 the coupling contracts."""
    if chain.n > n_limit:
        raise LimitExceededError(f"contraction check limited to n <= {n_limit}")
    table = chain.prob_one_table
    states = np.arange(chain.size)
    n = chain.n
    worst = 0.0
    for j in range(n):
        paired = states ^ (1 << j)
        gap = np.zeros(chain.size, dtype=np.float64)
        for i, _w in chain.game.graph.adjacency[j]:
            gap += np.abs(table[i] - table[i][paired])
        worst = max(worst, float(((n - 1) + gap).max() / n))
    return worst


def path_coupling_mixing_bound(chain: LogitChain, eps: float = 0.25,
                               contraction: float | None = None) -> float | None:
    """Mixing upper bound (log diam + log 1/eps)/alpha from a contracting
    coupling; None when the one-step expected distance does not contract."""
    if contraction is None:
        contraction = contraction_check(chain)
    if contraction >= 1.0:
        return None
    alpha = -math.log(contraction)
    return (math.log(chain.n) + math.log(1.0 / eps)) / alpha
