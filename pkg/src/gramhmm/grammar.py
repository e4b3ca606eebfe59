"""Chomsky-form grammars: parsing, derivation counting, unions, enumeration.

Nonterminals are interned to 0-based integer indices in order of first
appearance in the rule list; all counting is done with Python's native
arbitrary-precision integers, since the number of derivation trees of a
length-L string can grow like the Catalan numbers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

__all__ = [
    "GrammarError",
    "GrammarSyntaxError",
    "CnfGrammar",
    "parse_grammar",
    "format_grammar",
    "inside_vector",
    "derivation_count",
    "union",
    "enumerate_language",
    "max_ambiguity",
    "dyck_grammar",
    "universal_grammar",
]

DEFAULT_ENUMERATION_GUARD = 10**7
GUARD_ENV_VAR = "GRAMHMM_ORACLE_GUARD"


class GrammarError(ValueError):
    """Invalid grammar structure or use (bad symbol, bad rule, guard)."""


class GrammarSyntaxError(GrammarError):
    """Malformed grammar file; carries line/column of the offending token."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def enumeration_guard() -> int:
    """Max number of strings brute-force enumeration may visit."""
    raw = os.environ.get(GUARD_ENV_VAR)
    return int(raw) if raw else DEFAULT_ENUMERATION_GUARD


@dataclass(frozen=True)
class CnfGrammar:
    """A context-free grammar in Chomsky normal form.

    ``binary_rules`` holds (a, b, c) triples meaning a -> b c and
    ``lexical_rules`` holds (a, sigma) pairs meaning a -> sigma, with
    nonterminals as indices into ``nonterminal_names``.  Rule tuples are
    stored sorted so iteration order is deterministic.
    """

    nonterminal_count: int
    start: int
    binary_rules: tuple[tuple[int, int, int], ...]
    lexical_rules: tuple[tuple[int, str], ...]
    alphabet: tuple[str, ...]
    nonterminal_names: tuple[str, ...]
    # index caches, derived in __post_init__
    _lexical_by_symbol: dict = field(default=None, repr=False, compare=False)
    _rules_by_children: dict = field(default=None, repr=False, compare=False)
    _rules_by_parent: dict = field(default=None, repr=False, compare=False)
    _lexical_by_parent: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = self.nonterminal_count
        if n <= 0:
            raise GrammarError("grammar must declare at least one nonterminal")
        if not (0 <= self.start < n):
            raise GrammarError("start symbol index out of range")
        if len(self.nonterminal_names) != n:
            raise GrammarError("nonterminal name list does not match count")
        if not self.binary_rules and not self.lexical_rules:
            raise GrammarError("grammar has no rules")
        if len(set(self.binary_rules)) != len(self.binary_rules):
            raise GrammarError("duplicate binary rule")
        if len(set(self.lexical_rules)) != len(self.lexical_rules):
            raise GrammarError("duplicate lexical rule")
        sigma = set(self.alphabet)
        for a, b, c in self.binary_rules:
            if not all(0 <= x < n for x in (a, b, c)):
                raise GrammarError(f"binary rule ({a},{b},{c}) references undeclared nonterminal")
        for a, s in self.lexical_rules:
            if not 0 <= a < n:
                raise GrammarError(f"lexical rule ({a},{s!r}) references undeclared nonterminal")
            if s not in sigma:
                raise GrammarError(f"lexical rule emits undeclared terminal {s!r}")
        object.__setattr__(self, "binary_rules", tuple(sorted(self.binary_rules)))
        object.__setattr__(self, "lexical_rules", tuple(sorted(self.lexical_rules)))

        lex_by_sym: dict[str, list[int]] = {}
        lex_by_parent: dict[int, list[str]] = {}
        for a, s in self.lexical_rules:
            lex_by_sym.setdefault(s, []).append(a)
            lex_by_parent.setdefault(a, []).append(s)
        by_children: dict[tuple[int, int], list[int]] = {}
        by_parent: dict[int, list[tuple[int, int]]] = {}
        for a, b, c in self.binary_rules:
            by_children.setdefault((b, c), []).append(a)
            by_parent.setdefault(a, []).append((b, c))
        object.__setattr__(self, "_lexical_by_symbol", lex_by_sym)
        object.__setattr__(self, "_rules_by_children", by_children)
        object.__setattr__(self, "_rules_by_parent", by_parent)
        object.__setattr__(self, "_lexical_by_parent", lex_by_parent)

    @property
    def size(self) -> int:
        return len(self.binary_rules) + len(self.lexical_rules)

    def binary_rules_of(self, a: int) -> list[tuple[int, int]]:
        """Children pairs (b, c) of all binary rules with parent a, sorted."""
        return self._rules_by_parent.get(a, [])

    def lexical_rules_of(self, a: int) -> list[str]:
        """Terminals emitted by a, in sorted order."""
        return self._lexical_by_parent.get(a, [])

    def same_rules(self, other: "CnfGrammar") -> bool:
        """Structural identity at the level of symbol names."""
        def named(g):
            nb = frozenset(
                (g.nonterminal_names[a], g.nonterminal_names[b], g.nonterminal_names[c])
                for a, b, c in g.binary_rules
            )
            nl = frozenset((g.nonterminal_names[a], s) for a, s in g.lexical_rules)
            return (nb, nl, g.nonterminal_names[g.start], frozenset(g.alphabet))

        return named(self) == named(other)


def parse_grammar(text: str) -> CnfGrammar:
    """Parse the line-oriented grammar file format.

    Format: '#' comment lines, exactly one ``start NAME`` header, then rule
    lines ``A -> B C`` (binary) or ``A -> 'x'`` (lexical, single-character
    terminal).  Duplicate rule lines are an error.
    """
    start_name = None
    raw_rules: list[tuple[int, list[str]]] = []  # (line_no, tokens)
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if tokens[0] == "start":
            if start_name is not None:
                raise GrammarSyntaxError("duplicate 'start' header", line_no)
            if len(tokens) != 2:
                raise GrammarSyntaxError("'start' header takes exactly one name", line_no)
            start_name = tokens[1]
            continue
        if start_name is None:
            raise GrammarSyntaxError("rule before 'start' header", line_no)
        raw_rules.append((line_no, tokens))
    if start_name is None:
        raise GrammarSyntaxError("missing 'start' header", max(1, text.count("\n") + 1))

    names: dict[str, int] = {}

    def intern(name: str) -> int:
        if name not in names:
            names[name] = len(names)
        return names[name]

    binary: list[tuple[int, int, int]] = []
    lexical: list[tuple[int, str]] = []
    alphabet: list[str] = []
    seen_lines: set[tuple[str, ...]] = set()
    for line_no, tokens in raw_rules:
        if len(tokens) < 3 or tokens[1] != "->":
            raise GrammarSyntaxError("expected 'A -> ...'", line_no)
        key = tuple(tokens)
        if key in seen_lines:
            raise GrammarSyntaxError("duplicate rule", line_no)
        seen_lines.add(key)
        lhs = intern(tokens[0])
        rhs = tokens[2:]
        if len(rhs) == 1:
            tok = rhs[0]
            if not (len(tok) == 3 and tok[0] == "'" and tok[-1] == "'"):
                raise GrammarSyntaxError(
                    "unary right-hand side must be a quoted single-character terminal",
                    line_no, column=len(tokens[0]) + 4,
                )
            sym = tok[1]
            if sym not in alphabet:
                alphabet.append(sym)
            lexical.append((lhs, sym))
        elif len(rhs) == 2:
            if any(t.startswith("'") for t in rhs):
                raise GrammarSyntaxError("terminals may not appear in binary rules", line_no)
            binary.append((lhs, intern(rhs[0]), intern(rhs[1])))
        else:
            raise GrammarSyntaxError("not Chomsky form: right-hand side has more than 2 symbols", line_no)

    if start_name not in names:
        raise GrammarSyntaxError(f"undeclared start symbol {start_name!r}", 1)
    ordered = sorted(names, key=names.get)
    return CnfGrammar(
        nonterminal_count=len(names),
        start=names[start_name],
        binary_rules=tuple(binary),
        lexical_rules=tuple(lexical),
        alphabet=tuple(alphabet),
        nonterminal_names=tuple(ordered),
    )


def format_grammar(g: CnfGrammar) -> str:
    """Serialize to the grammar file format; reparses to the same rules."""
    lines = [f"start {g.nonterminal_names[g.start]}"]
    for a, b, c in g.binary_rules:
        lines.append(f"{g.nonterminal_names[a]} -> {g.nonterminal_names[b]} {g.nonterminal_names[c]}")
    for a, s in g.lexical_rules:
        lines.append(f"{g.nonterminal_names[a]} -> '{s}'")
    return "\n".join(lines) + "\n"


def inside_vector(g: CnfGrammar, w: str) -> list[int]:
    """Exact per-nonterminal derivation-tree counts for the string w.

    Entry a is the number of derivation trees rooted at a whose yield is w,
    computed by the standard CYK chart over substrings: a span's counts are
    the sum, over splits and binary rules, of the products of the two child
    span counts.
    """
    if len(w) < 1:
        raise GrammarError("string must be nonempty")
    sigma = set(g.alphabet)
    for ch in w:
        if ch not in sigma:
            raise GrammarError(f"symbol {ch!r} not in grammar alphabet")
    L = len(w)
    # chart[(i, j)] maps nonterminal -> count for substring w[i:j]
    chart: dict[tuple[int, int], dict[int, int]] = {}
    for i, ch in enumerate(w):
        cell: dict[int, int] = {}
        for a in g._lexical_by_symbol.get(ch, ()):
            cell[a] = cell.get(a, 0) + 1
        chart[(i, i + 1)] = cell
    for span in range(2, L + 1):
        for i in range(L - span + 1):
            j = i + span
            cell = {}
            for m in range(i + 1, j):
                left = chart[(i, m)]
                right = chart[(m, j)]
                if not left or not right:
                    continue
                for b, cb in left.items():
                    for c, cc in right.items():
                        parents = g._rules_by_children.get((b, c))
                        if parents:
                            prod = cb * cc
                            for a in parents:
                                cell[a] = cell.get(a, 0) + prod
            chart[(i, j)] = cell
    top = chart[(0, L)]
    return [top.get(a, 0) for a in range(g.nonterminal_count)]


def derivation_count(g: CnfGrammar, w: str) -> int:
    """Number of derivation trees of w from the start symbol; 0 iff w is not in the language."""
    return inside_vector(g, w)[g.start]


def union(g1: CnfGrammar, g2: CnfGrammar) -> CnfGrammar:
    """Union grammar with additive derivation counts.

    A fresh start symbol receives a copy of every rule of each operand's
    start symbol (binary and lexical), with the operands' nonterminals
    disjointly renamed; all original rules are retained.  Then
    L = L1 | L2 and derivation counts add: f(w) = f1(w) + f2(w).
    """
    # Prefixing a fixed distinct letter keeps each side's renaming injective
    # and the two sides disjoint; the fresh start avoids both prefixes.
    names = ["U0"]
    left = {i: len(names) + i for i in range(g1.nonterminal_count)}
    names += [f"L{nm}" for nm in g1.nonterminal_names]
    off = len(names)
    right = {i: off + i for i in range(g2.nonterminal_count)}
    names += [f"R{nm}" for nm in g2.nonterminal_names]

    binary: list[tuple[int, int, int]] = []
    lexical: list[tuple[int, str]] = []
    for g, ren in ((g1, left), (g2, right)):
        for a, b, c in g.binary_rules:
            binary.append((ren[a], ren[b], ren[c]))
            if a == g.start:
                binary.append((0, ren[b], ren[c]))
        for a, s in g.lexical_rules:
            lexical.append((ren[a], s))
            if a == g.start:
                lexical.append((0, s))

    alphabet = list(g1.alphabet)
    for s in g2.alphabet:
        if s not in alphabet:
            alphabet.append(s)
    # start-rule copies can coincide only if the operands shared a rule
    # verbatim, which the disjoint renaming rules out
    return CnfGrammar(
        nonterminal_count=len(names),
        start=0,
        binary_rules=tuple(binary),
        lexical_rules=tuple(set(lexical)),
        alphabet=tuple(alphabet),
        nonterminal_names=tuple(names),
    )


def _all_strings(alphabet: tuple[str, ...], L: int):
    """Yield all length-L strings over the alphabet in lexicographic order."""
    if len(alphabet) ** L > enumeration_guard():
        raise GrammarError(
            f"enumeration guard exceeded: |alphabet|^L = {len(alphabet) ** L}"
        )
    import itertools

    for tup in itertools.product(alphabet, repeat=L):
        yield "".join(tup)


def enumerate_language(g: CnfGrammar, L: int) -> set[str]:
    """All length-L strings of the language, by exhaustive membership testing."""
    return {w for w in _all_strings(g.alphabet, L) if derivation_count(g, w) > 0}


def max_ambiguity(g: CnfGrammar, L: int) -> int:
    """Max derivation count over all length-L strings (brute force)."""
    return max((derivation_count(g, w) for w in _all_strings(g.alphabet, L)), default=0)


def dyck_grammar() -> CnfGrammar:
    """Unambiguous CNF grammar for nonempty balanced parentheses over {(,)}."""
    return parse_grammar(
        "start S\n"
        "S -> A X\n"
        "X -> ')'\n"
        "X -> S Y\n"
        "X -> R S\n"
        "Y -> ')'\n"
        "Y -> R S\n"
        "A -> '('\n"
        "R -> ')'\n"
    )


def universal_grammar(alphabet: str) -> CnfGrammar:
    """Unambiguous right-linear grammar for all nonempty strings over the alphabet."""
    if not alphabet:
        raise GrammarError("alphabet must be nonempty")
    lines = ["start S"]
    for i, ch in enumerate(alphabet):
        lines.append(f"S -> T{i} S")
    for ch in alphabet:
        lines.append(f"S -> '{ch}'")
    for i, ch in enumerate(alphabet):
        lines.append(f"T{i} -> '{ch}'")
    return parse_grammar("\n".join(lines))
