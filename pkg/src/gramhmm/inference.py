"""Forward-table dynamic program for grammar-constrained HMM likelihoods.

Layer l of the table holds, for each grammar nonterminal a, the matrix
F_l[a][s,t] = sum over length-l strings w of (#derivation trees of w rooted
at a) * (A_{w1} ... A_{wl})[s,t].  Contracting the top layer with the start
symbol and the initial distribution gives the weighted mass
Z = sum_w f_G(w) * f_A(w), which is the exact constrained likelihood when
the grammar is unambiguous.

The combine step is the Kronecker/permutation recursion in unrolled index
form: the permutation is an index shuffle, the state-pairing tensor is the
middle-state contraction, and the rule tensor is iteration over the binary
rules, so nothing of size n'^4 n^2 is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grammar import CnfGrammar
from .hmm import Hmm

__all__ = [
    "InferenceError",
    "AttestationError",
    "ForwardTable",
    "LikelihoodResult",
    "forward_table",
    "weighted_mass",
    "ucfg_likelihood",
    "likelihood_upto",
    "pair_shuffle",
]

AMBIGUITY_SLACK = 1e-9


class InferenceError(ValueError):
    pass


class AttestationError(InferenceError):
    """The unambiguity attestation is missing or contradicted by the result."""


@dataclass(frozen=True)
class ForwardTable:
    length: int
    layers: tuple[np.ndarray, ...]  # layers[l-1] has shape (n, n', n')
    grammar: CnfGrammar
    model: Hmm

    def layer(self, l: int) -> np.ndarray:
        if not 1 <= l <= self.length:
            raise InferenceError(f"layer index {l} out of range [1, {self.length}]")
        return self.layers[l - 1]

    def contract(self, l: int) -> float:
        """Weighted mass at length l: sum_{s,t} pi'[s] F_l[S][s,t]."""
        f = self.layer(l)[self.grammar.start]
        return float(self.model.initial @ f.sum(axis=1))


@dataclass(frozen=True)
class LikelihoodResult:
    value: float
    length: int
    mode: str  # weighted-mass | ucfg-exact | upto-L


def pair_shuffle(coord: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    """Index map of the block permutation: (i, j, k, l) -> (i, k, j, l).

    Swapping the two middle blocks interleaves (grammar, state-pair) factors;
    applying it twice is the identity.
    """
    i, j, k, l = coord
    return (i, k, j, l)


def _check_alphabets(g: CnfGrammar, model: Hmm) -> None:
    if set(g.alphabet) != set(model.alphabet):
        raise InferenceError(
            f"alphabet mismatch: grammar {sorted(g.alphabet)} vs HMM {sorted(model.alphabet)}"
        )


def forward_table(g: CnfGrammar, model: Hmm, L: int) -> ForwardTable:
    """Build all layers 1..L bottom-up.

    Base case: F_1[a] = sum of A_sigma over lexical rules a -> sigma.
    Combine:   F_l[a] += F_m[b] @ F_{l-m}[c] for each rule a -> b c and
    split m, accumulated in fixed order (ascending m, then rule index) so
    results are bit-reproducible.  Cost is O(l * |G| * n'^3) per layer.
    """
    _check_alphabets(g, model)
    if L < 1:
        raise InferenceError("length must be >= 1")
    n, np_ = g.nonterminal_count, model.state_count
    base = np.zeros((n, np_, np_))
    for a, s in g.lexical_rules:
        base[a] += model.matrices[s]
    layers = [base]
    for l in range(2, L + 1):
        cur = np.zeros((n, np_, np_))
        for m in range(1, l):
            lo, hi = layers[m - 1], layers[l - m - 1]
            for a, b, c in g.binary_rules:
                cur[a] += lo[b] @ hi[c]
        layers.append(cur)
    for arr in layers:
        arr.setflags(write=False)
    return ForwardTable(length=L, layers=tuple(layers), grammar=g, model=model)


def weighted_mass(
    g: CnfGrammar, model: Hmm, L: int, table: ForwardTable | None = None
) -> LikelihoodResult:
    """Z = sum over length-L strings of f_G(w) * f_A(w); valid for any CFG."""
    if table is None:
        table = forward_table(g, model, L)
    elif table.length < L:
        raise InferenceError("forward table too short for requested length")
    return LikelihoodResult(value=table.contract(L), length=L, mode="weighted-mass")


def ucfg_likelihood(
    g: CnfGrammar,
    model: Hmm,
    L: int,
    unambiguity_attested: bool = False,
    table: ForwardTable | None = None,
) -> LikelihoodResult:
    """Exact constrained likelihood, valid when the caller attests the grammar unambiguous.

    Unambiguity is undecidable in general, so it is the caller's promise;
    a result above 1 proves the promise broken and raises.
    """
    if not unambiguity_attested:
        raise AttestationError(
            "ucfg likelihood requires the caller to attest the grammar is unambiguous"
        )
    z = weighted_mass(g, model, L, table=table)
    if z.value > 1.0 + AMBIGUITY_SLACK:
        raise AttestationError(
            f"ambiguity attestation violated: weighted mass {z.value} exceeds 1 at length {L}"
        )
    return LikelihoodResult(value=z.value, length=L, mode="ucfg-exact")


def likelihood_upto(
    g: CnfGrammar, model: Hmm, L: int, unambiguity_attested: bool = False
) -> LikelihoodResult:
    """Sum of per-length exact likelihoods for l = 1..L off one shared table.

    The >1 sanity check applies per length; the sum itself may legitimately
    exceed 1 (each length carries its own distribution).
    """
    if not unambiguity_attested:
        raise AttestationError(
            "upto-L likelihood requires the caller to attest the grammar is unambiguous"
        )
    table = forward_table(g, model, L)
    total = 0.0
    for l in range(1, L + 1):
        total += ucfg_likelihood(g, model, l, unambiguity_attested=True, table=table).value
    return LikelihoodResult(value=total, length=L, mode="upto-L")
