"""Observable-operator hidden Markov models.

A model is an initial distribution pi over hidden states together with one
nonnegative matrix A_sigma per symbol; the sum over symbols of A_sigma must
be row-stochastic.  The probability of a string is pi^T A_{w1} ... A_{wL} 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HmmError",
    "Hmm",
    "parse_hmm",
    "format_hmm",
    "string_likelihood",
    "split_likelihood",
    "uniform_hmm",
    "random_hmm",
]

STOCHASTICITY_TOL = 1e-9


class HmmError(ValueError):
    """Malformed or invalid HMM description."""


@dataclass(frozen=True)
class Hmm:
    state_count: int
    initial: np.ndarray                 # shape (n,)
    matrices: dict[str, np.ndarray]     # symbol -> (n, n)
    alphabet: tuple[str, ...]

    def __post_init__(self):
        n = self.state_count
        if n < 1:
            raise HmmError("state count must be positive")
        init = np.asarray(self.initial, dtype=float)
        if init.shape != (n,):
            raise HmmError(f"initial vector must have length {n}")
        if np.any(init < 0):
            raise HmmError("initial vector has a negative entry")
        if abs(init.sum() - 1.0) > STOCHASTICITY_TOL:
            raise HmmError(f"initial vector sums to {init.sum()!r}, not 1")
        if set(self.matrices) != set(self.alphabet):
            raise HmmError("matrices must cover exactly the alphabet")
        total = np.zeros((n, n))
        mats = {}
        for sym in self.alphabet:
            m = np.asarray(self.matrices[sym], dtype=float)
            if m.shape != (n, n):
                raise HmmError(f"matrix for {sym!r} must be {n}x{n}")
            if np.any(m < 0):
                raise HmmError(f"matrix for {sym!r} has a negative entry")
            mats[sym] = m
            total += m
        rows = total.sum(axis=1)
        bad = np.abs(rows - 1.0) > STOCHASTICITY_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            raise HmmError(
                f"sum of symbol matrices is not row-stochastic: row {i} sums to {rows[i]!r}"
            )
        init.setflags(write=False)
        for m in mats.values():
            m.setflags(write=False)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "matrices", mats)

    def operator(self, symbol: str) -> np.ndarray:
        try:
            return self.matrices[symbol]
        except KeyError:
            raise HmmError(f"symbol {symbol!r} not in HMM alphabet") from None


def parse_hmm(text: str) -> Hmm:
    """Parse the JSON HMM document (states, alphabet, initial, matrices)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise HmmError(f"malformed HMM document: {e}") from None
    for key in ("states", "alphabet", "initial", "matrices"):
        if key not in doc:
            raise HmmError(f"missing field {key!r}")
    alphabet = doc["alphabet"]
    if not isinstance(alphabet, list) or any(
        not isinstance(s, str) or len(s) != 1 for s in alphabet
    ):
        raise HmmError("alphabet must be a list of single-character strings")
    if len(set(alphabet)) != len(alphabet):
        raise HmmError("duplicate symbol in alphabet")
    return Hmm(
        state_count=int(doc["states"]),
        initial=np.array(doc["initial"], dtype=float),
        matrices={s: np.array(doc["matrices"].get(s, []), dtype=float) for s in alphabet}
        if isinstance(doc["matrices"], dict)
        else _bad("matrices must be an object"),
        alphabet=tuple(alphabet),
    )


def _bad(msg):
    raise HmmError(msg)


def format_hmm(model: Hmm) -> str:
    """Serialize to the JSON HMM document format."""
    return json.dumps(
        {
            "states": model.state_count,
            "alphabet": list(model.alphabet),
            "initial": model.initial.tolist(),
            "matrices": {s: model.matrices[s].tolist() for s in model.alphabet},
        },
        indent=2,
    )


def _operator_product(model: Hmm, w: str) -> np.ndarray:
    out = np.eye(model.state_count)
    for ch in w:
        out = out @ model.operator(ch)
    return out


def string_likelihood(model: Hmm, w: str) -> float:
    """Probability of generating w: pi^T A_{w1} ... A_{wL} 1."""
    if len(w) < 1:
        raise HmmError("string must be nonempty")
    v = model.initial
    for ch in w:
        v = v @ model.operator(ch)
    return float(v.sum())


def split_likelihood(model: Hmm, w: str, cut: int) -> float:
    """String probability via the two-factor split identity.

    The operator products for the two halves are contracted through the
    middle state index, sum_{s,u,t} pi[s] A_{w<cut}[s,u] A_{w>=cut}[u,t];
    this is the sparse order-3 pairing tensor applied implicitly, and it
    agrees with ``string_likelihood`` up to rounding for every cut.
    """
    if not 1 <= cut < len(w):
        raise HmmError(f"cut must be in [1, {len(w) - 1}], got {cut}")
    a1 = _operator_product(model, w[:cut])
    a2 = _operator_product(model, w[cut:])
    return float(np.einsum("s,su,ut->", model.initial, a1, a2))


def uniform_hmm(alphabet: str | tuple[str, ...]) -> Hmm:
    """Single-state model giving every length-L string mass |alphabet|^-L."""
    symbols = tuple(alphabet)
    if not symbols:
        raise HmmError("alphabet must be nonempty")
    p = 1.0 / len(symbols)
    return Hmm(
        state_count=1,
        initial=np.array([1.0]),
        matrices={s: np.array([[p]]) for s in symbols},
        alphabet=symbols,
    )


def random_hmm(state_count: int, alphabet: str | tuple[str, ...], seed: int) -> Hmm:
    """Seeded random model; rows of the stacked operators are normalized to 1."""
    symbols = tuple(alphabet)
    if state_count < 1:
        raise HmmError("state count must be positive")
    if not symbols:
        raise HmmError("alphabet must be nonempty")
    rng = np.random.default_rng(seed)
    init = rng.exponential(size=state_count)
    init /= init.sum()
    block = rng.exponential(size=(state_count, len(symbols) * state_count))
    block /= block.sum(axis=1, keepdims=True)
    mats = {
        s: block[:, i * state_count : (i + 1) * state_count]
        for i, s in enumerate(symbols)
    }
    return Hmm(state_count=state_count, initial=init, matrices=mats, alphabet=symbols)
