"""Occurrence counting and integer functionals on diagram tables.

``count_occurrences(host, pattern)`` counts letter subsets of the host whose
erased subword lands in the pattern's class.  A functional is an integer
coefficient vector over a table; its value on a word is the coefficient-
weighted sum of occurrence counts, computed in one pass over all letter
subsets whose size lies in the table's window.  Evaluation on a formal
combination of diagrams is blind to terms outside the table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Tuple

from .diagrams import ArrowDiagram, DiagramTable
from .words import OrientedGaussWord, _canonical_tokens


class LinearCombination:
    """Formal integer combination of arrow diagrams; zero terms are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[ArrowDiagram, int] | None = None):
        self.terms: Dict[ArrowDiagram, int] = {}
        if terms:
            for x, c in terms.items():
                if c:
                    self.terms[x] = c

    def add(self, x: ArrowDiagram, c: int) -> None:
        v = self.terms.get(x, 0) + c
        if v:
            self.terms[x] = v
        else:
            self.terms.pop(x, None)

    def __add__(self, other: "LinearCombination") -> "LinearCombination":
        out = LinearCombination(dict(self.terms))
        for x, c in other.terms.items():
            out.add(x, c)
        return out

    def scaled(self, k: int) -> "LinearCombination":
        return LinearCombination({x: k * c for x, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearCombination) and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def key(self) -> tuple:
        """Hashable canonical identity, ordered by the table sort order."""
        return tuple(
            (x.tokens, c)
            for x, c in sorted(self.terms.items(), key=lambda t: t[0].sort_key())
        )

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{x!r}" for x, c in sorted(
            self.terms.items(), key=lambda t: t[0].sort_key()))
        return f"LinearCombination({body or '0'})"


def count_occurrences(host: OrientedGaussWord, pattern: ArrowDiagram) -> int:
    """Number of letter subsets of ``host`` realizing ``pattern``.

    >>> from .words import parse_word
    >>> from .diagrams import diagram_of
    >>> count_occurrences(parse_word("1 2 -1 3 -2 -3"),
    ...                   diagram_of(parse_word("1 2 -1 -2")))
    2
    """
    k = pattern.arrows
    letters = host.letters()
    if k > len(letters):
        return 0
    toks = host.tokens
    target = pattern.tokens
    hits = 0
    for combo in itertools.combinations(letters, k):
        ks = set(combo)
        sub = [t for t in toks if (t if t > 0 else -t) in ks]
        if _canonical_tokens(sub) == target:
            hits += 1
    return hits


@dataclass(frozen=True)
class Functional:
    """Integer coefficients over a table, one per entry, in table order."""

    table: DiagramTable
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.table):
            raise ValueError(
                f"{len(self.coeffs)} coefficients for a table of {len(self.table)}"
            )


def _table_lookup(table: DiagramTable) -> Dict[tuple, int]:
    # normalized-linear-subword -> 1-based table index, 0 when not in the table;
    # the memo saturates quickly because subwords arrive normalized
    memo = getattr(table, "_lookup_cache", None)
    if memo is None:
        memo = {}
        object.__setattr__(table, "_lookup_cache", memo)
    return memo


def count_vector(table: DiagramTable, host: OrientedGaussWord) -> list[int]:
    """Occurrence counts of every table entry in ``host``, in table order."""
    b, d = table.window
    toks = host.tokens
    pos: Dict[int, tuple[int, ...]] = {}
    for p, t in enumerate(toks):
        a = t if t > 0 else -t
        pos[a] = pos.get(a, ()) + (p,)
    letters = sorted(pos)
    counts = [0] * len(table)
    memo = _table_lookup(table)
    index_of = table._index()
    for size in range(b, min(d, len(letters)) + 1):
        for combo in itertools.combinations(letters, size):
            ps: list[int] = []
            for a in combo:
                ps.extend(pos[a])
            ps.sort()
            relabel: Dict[int, int] = {}
            key = []
            for p in ps:
                t = toks[p]
                a = t if t > 0 else -t
                r = relabel.get(a)
                if r is None:
                    r = len(relabel) + 1
                    relabel[a] = r
                key.append(r if t > 0 else -r)
            tkey = tuple(key)
            idx = memo.get(tkey)
            if idx is None:
                idx = index_of.get(_canonical_tokens(tkey), 0)
                memo[tkey] = idx
            if idx:
                counts[idx - 1] += 1
    return counts


def evaluate_functional(f: Functional, host: OrientedGaussWord) -> int:
    counts = count_vector(f.table, host)
    return sum(a * c for a, c in zip(f.coeffs, counts) if c)


def eval_on_combination(f: Functional, combo: LinearCombination) -> int:
    """Coefficient-weighted sum over the combination's in-table terms."""
    total = 0
    for x, c in combo.terms.items():
        idx = f.table.index_of(x)
        if idx is not None:
            total += c * f.coeffs[idx - 1]
    return total


def subset_expansion(host: OrientedGaussWord, b: int, d: int) -> LinearCombination:
    """Formal sum of the classes of all subwords with size in [b, d]."""
    letters = host.letters()
    toks = host.tokens
    out = LinearCombination()
    for size in range(b, min(d, len(letters)) + 1):
        for combo in itertools.combinations(letters, size):
            ks = set(combo)
            sub = [t for t in toks if (t if t > 0 else -t) in ks]
            out.add(ArrowDiagram(_canonical_tokens(sub)), 1)
    return out
