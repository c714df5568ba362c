"""Spectral bounds for the logit chain: relaxation time, the canonical-path
congestion bound driven by a cutwidth ordering, and the two-sided mixing
bounds from the spectral gap.

The chain is reversible, so conjugating by sqrt(pi) symmetrizes the transition
matrix; elementwise sqrt(P * P^T) builds that symmetric matrix directly from
detailed balance without forming stationary ratios (stable at large beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LimitExceededError, SchemaError
from .games import potential_scaled_array
from .logit import LogitChain, gibbs, transition_matrix

SPECTRAL_N_LIMIT = 12


@dataclass(frozen=True)
class SpectralResult:
    t_rel: float
    lambda_2: float
    lambda_min: float

    @property
    def lambda_star(self) -> float:
        return max(abs(self.lambda_2), abs(self.lambda_min))


def relaxation_time(chain: LogitChain, n_limit: int = SPECTRAL_N_LIMIT) -> SpectralResult:
    """1/(1 - lambda*) with lambda* the largest non-top eigenvalue modulus,
    from a dense symmetric eigendecomposition."""
    if chain.n > n_limit:
        raise LimitExceededError(f"spectral analysis limited to n <= {n_limit}")
    P = transition_matrix(chain)
    S = np.sqrt(P * P.T)
    np.fill_diagonal(S, np.diag(P))
    eigs = np.linalg.eigvalsh(S)
    lam2 = float(eigs[-2])
    lam_min = float(eigs[0])
    lam_star = max(abs(lam2), abs(lam_min))
    return SpectralResult(t_rel=1.0 / (1.0 - lam_star), lambda_2=lam2, lambda_min=lam_min)


# -- canonical paths ----------------------------------------------------------

class _CanonicalPaths:
    """Canonical paths on the profile hypercube for a fixed vertex ordering:
    the path from x to y flips the differing vertices in ordering order."""

    def __init__(self, n: int, ordering, phi_scaled, beta: float):
        ordering = list(ordering)
        if sorted(ordering) != list(range(n)):
            raise SchemaError("ordering must be a permutation of the vertices")
        self.ordering = ordering
        self.phi = phi_scaled
        self.beta = beta
        # prefix_mask[p]: vertices placed strictly before position p
        self.prefix_mask = [0] * (n + 1)
        for p, v in enumerate(ordering):
            self.prefix_mask[p + 1] = self.prefix_mask[p] | (1 << v)
        self.position = {v: p for p, v in enumerate(ordering)}

    def edges(self, x: int, y: int):
        """Yield (cur, nxt, bottom, complement) per path edge; ``bottom`` is
        the lower-probability endpoint and ``complement`` the profile that,
        with bottom, splits the coordinates of x and y (injectivity device)."""
        xor = x ^ y
        cur = x
        for v in self.ordering:
            if not (xor >> v) & 1:
                continue
            vbit = 1 << v
            nxt = (cur & ~vbit) | (y & vbit)
            low_first = self.beta == 0 or self.phi[cur] >= self.phi[nxt]
            if low_first:
                keep = self.prefix_mask[self.position[v]]
                bottom = cur
            else:
                keep = self.prefix_mask[self.position[v]] | vbit
                bottom = nxt
            comp = (x & keep) | (y & ~keep)
            yield cur, nxt, bottom, comp
            cur = nxt


def congestion_upper_bound(
    chain: LogitChain, ordering, n_limit: int = SPECTRAL_N_LIMIT
) -> float:
    """Evaluate the multicommodity-flow bound on the relaxation time:
    2n * max over Hamming edges of (path load through the edge) / pi(lighter
    endpoint), with one canonical path per ordered profile pair flipping the
    differing coordinates in the given (cutwidth) vertex order."""
    n = chain.n
    if n > n_limit:
        raise LimitExceededError(f"congestion bound limited to n <= {n_limit}")
    paths = _CanonicalPaths(n, ordering, potential_scaled_array(chain.game), chain.beta)
    pi = gibbs(chain)
    size = chain.size
    load: dict[tuple[int, int], float] = {}
    for x in range(size):
        px = pi[x]
        for y in range(size):
            if x == y:
                continue
            weight = px * pi[y] * bin(x ^ y).count("1")
            for a, b, _bottom, _comp in paths.edges(x, y):
                load[(a, b)] = load.get((a, b), 0.0) + weight
    worst = 0.0
    for (a, b), total in load.items():
        worst = max(worst, total / min(pi[a], pi[b]))
    return 2.0 * n * worst


def canonical_path_margin(
    chain: LogitChain, ordering, cutwidth_scaled: int, n_limit: int = SPECTRAL_N_LIMIT
) -> Fraction:
    """Exact minimum over all pairs and path edges of
    Phi(x) + Phi(y) - Phi(bottom) - Phi(complement) + 2*CW;
    nonnegative when the canonical-path potential inequality holds."""
    n = chain.n
    if n > n_limit:
        raise LimitExceededError(f"path margin check limited to n <= {n_limit}")
    game = chain.game
    phi = potential_scaled_array(game)
    paths = _CanonicalPaths(n, ordering, phi, chain.beta)
    cw_phi_units = game.belief_denominator**2 * cutwidth_scaled
    best = None
    for x in range(chain.size):
        for y in range(chain.size):
            if x == y:
                continue
            for _a, _b, bottom, comp in paths.edges(x, y):
                margin = int(phi[x]) + int(phi[y]) - int(phi[bottom]) - int(phi[comp])
                margin += 2 * cw_phi_units
                if best is None or margin < best:
                    best = margin
    return Fraction(0) if best is None else Fraction(best, game.scale)


@dataclass(frozen=True)
class RelaxationBounds:
    lower: float            # (t_rel - 1) * ln 2
    upper: float            # ln(4 / pi_min) * t_rel
    surrogate_upper: float  # (n + 2 + beta * Phi_max) * t_rel
    t_rel: float


def mixing_bounds_from_relaxation(
    chain: LogitChain, n_limit: int = SPECTRAL_N_LIMIT
) -> RelaxationBounds:
    """Sandwich the mixing time between relaxation-time bounds. log(4/pi_min)
    is evaluated in the log domain so large beta cannot underflow; the
    surrogate replaces it by the analytic n + 2 + beta*Phi_max."""
    spec = relaxation_time(chain, n_limit)
    phi = chain.potentials
    phi_min = float(phi.min())
    phi_max = float(phi.max())
    log_inv_pi_min = chain.beta * (phi_max - phi_min) + math.log(
        float(np.exp(-chain.beta * (phi - phi_min)).sum())
    )
    upper = (math.log(4.0) + log_inv_pi_min) * spec.t_rel
    surrogate = (chain.n + 2 + chain.beta * phi_max) * spec.t_rel
    lower = (spec.t_rel - 1.0) * math.log(2.0)
    return RelaxationBounds(lower=lower, upper=upper, surrogate_upper=surrogate,
                            t_rel=spec.t_rel)
