"""Rejection-based FPRAS for constrained likelihoods of ambiguous grammars.

Proposals come from the exact ancestral sampler, whose string marginal is
f_G(w) * f_A(w) / Z; accepting each proposal with probability exactly
1 / f_G(w) makes the acceptance rate Z-normalized constrained likelihood,
so Z * (accepted / N) estimates f_A(L_G intersect Sigma^L).  The Bernoulli
draw is carried out over big integers, never via a floating-point
reciprocal, since derivation counts can exceed 2^53.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grammar import CnfGrammar, derivation_count
from .hmm import Hmm
from .inference import forward_table, weighted_mass
from .sampling import RngSeed, Sampler

__all__ = [
    "ApproxError",
    "FprasReport",
    "sample_size",
    "exact_bernoulli",
    "fpras_likelihood",
]

DEFAULT_FAILURE_PROB = 0.25


class ApproxError(ValueError):
    pass


@dataclass(frozen=True)
class FprasReport:
    estimate: float
    z_weighted: float
    samples: int
    accepted: int
    epsilon: float
    bound_value: int
    seed: RngSeed


def sample_size(bound: int, epsilon: float, confidence_failure: float = DEFAULT_FAILURE_PROB) -> int:
    """Smallest Hoeffding sample count for |p_hat - p| <= epsilon / bound.

    N = ceil(ln(2/failure) * bound^2 / (2 * epsilon^2)); with the default
    failure probability 1/4 this is ceil(ln(8) * bound^2 / (2 epsilon^2)).
    """
    if bound < 1:
        raise ApproxError("ambiguity bound must be >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ApproxError("epsilon must be in (0, 1)")
    if not 0.0 < confidence_failure < 1.0:
        raise ApproxError("failure probability must be in (0, 1)")
    return math.ceil(math.log(2.0 / confidence_failure) * bound * bound / (2.0 * epsilon * epsilon))


def exact_bernoulli(count: int, rng: np.random.Generator) -> bool:
    """True with probability exactly 1/count, via big-integer rejection.

    Draws uniform bit blocks of width count.bit_length() until one lands in
    [0, count), then tests it against 0; no floating point is involved.
    """
    if count < 1:
        raise ApproxError("count must be >= 1")
    if count == 1:
        return True
    bits = count.bit_length()
    nbytes = (bits + 7) // 8
    shift = 8 * nbytes - bits
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "big") >> shift
        if x < count:
            return x == 0


def fpras_likelihood(
    g: CnfGrammar,
    model: Hmm,
    L: int,
    epsilon: float,
    bound: int | Callable[[int], int],
    seed: RngSeed | int,
    confidence_failure: float = DEFAULT_FAILURE_PROB,
) -> FprasReport:
    """Randomized estimate of the constrained likelihood for a polynomially
    ambiguous grammar.

    ``bound`` is either a constant or a function of the length upper-bounding
    the derivation count of any length-L string; with probability at least
    1 - confidence_failure the estimate is within relative error epsilon of
    the true value.  A zero weighted mass short-circuits to estimate 0.
    """
    if isinstance(seed, int):
        seed = RngSeed(seed)
    bound_value = bound(L) if callable(bound) else int(bound)
    n_samples = sample_size(bound_value, epsilon, confidence_failure)

    table = forward_table(g, model, L)
    z = weighted_mass(g, model, L, table=table).value
    if z == 0.0:
        return FprasReport(
            estimate=0.0, z_weighted=0.0, samples=0, accepted=0,
            epsilon=epsilon, bound_value=bound_value, seed=seed,
        )
    sampler = Sampler(table)
    rng = seed.generator()
    accepted = 0
    for _ in range(n_samples):
        trace = sampler.draw(L, rng)
        f_w = derivation_count(g, trace.string)
        if exact_bernoulli(f_w, rng):
            accepted += 1
    return FprasReport(
        estimate=z * accepted / n_samples,
        z_weighted=z,
        samples=n_samples,
        accepted=accepted,
        epsilon=epsilon,
        bound_value=bound_value,
        seed=seed,
    )
