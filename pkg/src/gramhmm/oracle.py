"""Brute-force reference computations over exhaustive string enumeration.

Everything here enumerates Sigma^L directly (guarded by the shared
enumeration limit) and serves as ground truth for the dynamic programs, so
summation uses math.fsum in fixed lexicographic order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grammar import CnfGrammar, _all_strings, derivation_count
from .hmm import Hmm, string_likelihood

__all__ = [
    "OracleError",
    "ExactDistribution",
    "brute_force_weighted_mass",
    "brute_force_likelihood",
    "exact_distribution",
    "tv_distance",
]


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class ExactDistribution:
    """Normalized proposal distribution f_G(w) f_A(w) / Z plus its summary masses."""

    probabilities: dict[str, float]
    z: float
    member_likelihood: float  # membership-weighted mass f_A(L_G intersect Sigma^L)


def brute_force_weighted_mass(g: CnfGrammar, model: Hmm, L: int) -> float:
    """Sum over all length-L strings of derivation count times HMM probability."""
    return math.fsum(
        derivation_count(g, w) * string_likelihood(model, w)
        for w in _all_strings(g.alphabet, L)
    )


def brute_force_likelihood(g: CnfGrammar, model: Hmm, L: int) -> float:
    """Membership-weighted mass: sum of HMM probabilities of language members."""
    return math.fsum(
        string_likelihood(model, w)
        for w in _all_strings(g.alphabet, L)
        if derivation_count(g, w) >= 1
    )


def exact_distribution(g: CnfGrammar, model: Hmm, L: int) -> ExactDistribution:
    """Full table of the constrained proposal distribution at length L."""
    weights: dict[str, float] = {}
    member_terms: list[float] = []
    for w in _all_strings(g.alphabet, L):
        f = derivation_count(g, w)
        if f >= 1:
            p = string_likelihood(model, w)
            weights[w] = f * p
            member_terms.append(p)
    z = math.fsum(weights.values())
    if z <= 0.0:
        raise OracleError("empty constrained support")
    return ExactDistribution(
        probabilities={w: v / z for w, v in weights.items()},
        z=z,
        member_likelihood=math.fsum(member_terms),
    )


def tv_distance(empirical: dict[str, float], exact: ExactDistribution) -> float:
    """Half the L1 distance between an empirical frequency map and the exact law."""
    support = set(empirical) | set(exact.probabilities)
    return 0.5 * math.fsum(
        abs(empirical.get(w, 0.0) - exact.probabilities.get(w, 0.0)) for w in sorted(support)
    )
