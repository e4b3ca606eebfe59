"""Exact ancestral sampling of grammar-constrained HMM strings.

Draws strings w of length L with probability f_G(w) * f_A(w) / Z by sampling
a derivation top-down from the forward table: the root state pair, then at
each node a (rule, split, middle state) choice proportional to the product
of the two child table entries, then a terminal at each leaf.  For an
unambiguous grammar the string marginal is the constrained distribution;
for an ambiguous one it is exactly the proposal the rejection estimator
needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grammar import CnfGrammar
from .hmm import Hmm
from .inference import ForwardTable, forward_table

__all__ = [
    "SamplingError",
    "RngSeed",
    "DerivationNode",
    "SampleTrace",
    "Sampler",
    "sample",
    "sample_many",
]

UNDERFLOW_FLOOR = 1e-300


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class RngSeed:
    """Seed plus worker stream index; equal pairs give identical sequences."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.stream])


@dataclass(frozen=True)
class DerivationNode:
    nonterminal: str
    start: int               # span [start, end) into the sampled string
    end: int
    states: tuple[int, int]  # HMM state pair carried across the span
    terminal: str | None = None
    children: tuple["DerivationNode", ...] = ()


@dataclass(frozen=True)
class SampleTrace:
    string: str
    tree: DerivationNode
    weight: float  # pi'[root s] times the product of leaf operator entries


def _draw(rng: np.random.Generator, cum: np.ndarray) -> int:
    """Inverse-CDF draw over an unnormalized cumulative weight array."""
    total = cum[-1]
    if total < UNDERFLOW_FLOOR:
        raise SamplingError("numerical underflow at node")
    r = rng.random() * total
    return min(int(np.searchsorted(cum, r, side="right")), len(cum) - 1)


class Sampler:
    """Reusable sampler over one forward table.

    Per-node categorical weights are precomputed lazily as cumulative arrays
    in the table's fixed accumulation order (ascending split, then rule
    index, then middle state), so each decision costs one uniform deviate
    and one binary search.
    """

    def __init__(self, table: ForwardTable):
        self.table = table
        self.grammar = table.grammar
        self.model = table.model
        self._internal: dict[tuple[int, int], tuple[list, np.ndarray]] = {}
        self._leaf: dict[int, tuple[list[str], np.ndarray]] = {}
        self._root: dict[int, np.ndarray] = {}

    def _root_cum(self, L: int) -> np.ndarray:
        if L not in self._root:
            f = self.table.layer(L)[self.grammar.start]
            w = (self.model.initial[:, None] * f).reshape(-1)
            self._root[L] = np.cumsum(w)
        return self._root[L]

    def _internal_cum(self, a: int, l: int):
        key = (a, l)
        if key not in self._internal:
            g, np_ = self.grammar, self.model.state_count
            choices = []
            blocks = []
            for m in range(1, l):
                lo = self.table.layer(m)
                hi = self.table.layer(l - m)
                for a2, b, c in g.binary_rules:
                    if a2 != a:
                        continue
                    choices.extend((b, c, m, u) for u in range(np_))
                    blocks.append(np.einsum("su,ut->stu", lo[b], hi[c]))
            if blocks:
                w = np.concatenate(blocks, axis=2)  # (s, t, choice)
                cum = np.cumsum(w.reshape(np_, np_, -1), axis=2)
            else:
                cum = np.zeros((np_, np_, 0))
            self._internal[key] = (choices, cum)
        return self._internal[key]

    def _leaf_cum(self, a: int):
        if a not in self._leaf:
            syms = self.grammar.lexical_rules_of(a)
            if syms:
                w = np.stack([self.model.matrices[s] for s in syms], axis=2)
                cum = np.cumsum(w, axis=2)
            else:
                cum = np.zeros((self.model.state_count, self.model.state_count, 0))
            self._leaf[a] = (syms, cum)
        return self._leaf[a]

    def draw(self, L: int, rng: np.random.Generator) -> SampleTrace:
        if L < 1 or L > self.table.length:
            raise SamplingError(f"length {L} outside table range [1, {self.table.length}]")
        root_cum = self._root_cum(L)
        if root_cum[-1] <= 0.0:
            raise SamplingError("empty constrained support")
        np_ = self.model.state_count
        idx = _draw(rng, root_cum)
        s0, t0 = divmod(idx, np_)
        out: list[str] = []
        weight = float(self.model.initial[s0])
        names = self.grammar.nonterminal_names

        def expand(a: int, l: int, s: int, t: int, pos: int) -> DerivationNode:
            nonlocal weight
            if l == 1:
                syms, cum = self._leaf_cum(a)
                if not syms:
                    raise SamplingError("numerical underflow at node")
                k = _draw(rng, cum[s, t])
                sym = syms[k]
                out.append(sym)
                weight *= float(self.model.matrices[sym][s, t])
                return DerivationNode(names[a], pos, pos + 1, (s, t), terminal=sym)
            choices, cum = self._internal_cum(a, l)
            if not choices:
                raise SamplingError("numerical underflow at node")
            k = _draw(rng, cum[s, t])
            b, c, m, u = choices[k]
            left = expand(b, m, s, u, pos)
            right = expand(c, l - m, u, t, pos + m)
            return DerivationNode(names[a], pos, pos + l, (s, t), children=(left, right))

        tree = expand(self.grammar.start, L, s0, t0, 0)
        return SampleTrace(string="".join(out), tree=tree, weight=weight)


def _models_match(m1: Hmm, m2: Hmm) -> bool:
    if m1 is m2:
        return True
    return (
        m1.state_count == m2.state_count
        and m1.alphabet == m2.alphabet
        and np.array_equal(m1.initial, m2.initial)
        and all(np.array_equal(m1.matrices[s], m2.matrices[s]) for s in m1.alphabet)
    )


def _check_table(g: CnfGrammar, model: Hmm, L: int, table: ForwardTable) -> None:
    if table.grammar != g or not _models_match(table.model, model):
        raise SamplingError("forward table was built for a different grammar or HMM")
    if table.length < L:
        raise SamplingError("forward table too short for requested length")


def sample(
    g: CnfGrammar,
    model: Hmm,
    L: int,
    table: ForwardTable,
    rng: np.random.Generator,
) -> SampleTrace:
    """One draw from the constrained distribution using a prebuilt table."""
    _check_table(g, model, L, table)
    return Sampler(table).draw(L, rng)


def sample_many(
    g: CnfGrammar,
    model: Hmm,
    L: int,
    count: int,
    seed: RngSeed | int,
    table: ForwardTable | None = None,
) -> list[SampleTrace]:
    """Independent draws sharing one forward table; deterministic under the seed."""
    if count < 0:
        raise SamplingError("count must be nonnegative")
    if isinstance(seed, int):
        seed = RngSeed(seed)
    if table is None:
        table = forward_table(g, model, L)
    else:
        _check_table(g, model, L, table)
    if count == 0:
        return []
    sampler = Sampler(table)
    rng = seed.generator()
    return [sampler.draw(L, rng) for _ in range(count)]
