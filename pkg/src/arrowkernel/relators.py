"""Relator generation and evaluation-matrix assembly.

Each family is a signed template over arc placeholders S, T, U and fresh
letters i, j, k.  A relator instance substitutes a normal oriented base word,
cut into as many arcs as the template uses, and canonicalizes every term.
Projection keeps the window [b, d]; top size runs to d + 1 so that instances
whose largest terms fall just outside survive as deletion-only columns.
"""

from __future__ import annotations

import itertools
import json
import os
import tempfile
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .counting import LinearCombination
from .diagrams import (
    ArrowDiagram,
    DiagramTable,
    TableFilter,
    _FILTER_PRED,
    enumerate_normal_pairings,
    is_connected,
    is_irreducible,
)
from .words import _canonical_tokens, format_word, parse_word


class WindowError(ValueError):
    """Raised when a window [b, d] is empty or starts below 1."""


class RelatorFamily(Enum):
    R1 = "R1"
    SII = "SII"
    WII = "WII"
    SIII = "SIII"
    WIII = "WIII"


class Placement(Enum):
    """How base arrows may sit relative to the template arcs.

    FULL admits every cut of the base word, including instances where some
    base arrow has both endpoints inside a single arc.  SPLIT keeps only
    instances whose base arrows each span two different arcs; at window
    (2, 3) this shorter list generates the same kernels, but at wider
    windows it misses relators, so FULL is the default everywhere.
    """

    FULL = "full"
    SPLIT = "split"


# arcs the template cuts the base word into, and fresh letters it consumes
_ARC_COUNT = {
    RelatorFamily.R1: 1,
    RelatorFamily.SII: 2,
    RelatorFamily.WII: 2,
    RelatorFamily.SIII: 3,
    RelatorFamily.WIII: 3,
}
_FRESH_COUNT = {
    RelatorFamily.R1: 1,
    RelatorFamily.SII: 2,
    RelatorFamily.WII: 2,
    RelatorFamily.SIII: 3,
    RelatorFamily.WIII: 3,
}

# Signed term lists, one tuple per displayed variant.  Symbols: S/T/U arcs,
# i/j/k fresh starts, -i/-j/-k fresh ends.
_TEMPLATE_SPECS: Dict[RelatorFamily, tuple] = {
    RelatorFamily.R1: (
        ((+1, "S i -i"),),
        ((+1, "S -i i"),),
    ),
    RelatorFamily.SII: (
        (
            (+1, "S i -j T j -i"),
            (+1, "S i T -i"),
            (+1, "S -j T j"),
        ),
        (
            (+1, "S -i j T -j i"),
            (+1, "S -i T i"),
            (+1, "S j T -j"),
        ),
    ),
    RelatorFamily.WII: (
        (
            (+1, "S -i j T i -j"),
            (+1, "S -i T i"),
            (+1, "S j T -j"),
        ),
    ),
    RelatorFamily.SIII: (
        (
            (+1, "S -i j T -k i U -j k"),
            (+1, "S -i j T i U -j"),
            (+1, "S -i T -k i U k"),
            (+1, "S j T -k U -j k"),
            (-1, "S j -i T i -k U k -j"),
            (-1, "S j -i T i U -j"),
            (-1, "S -i T i -k U k"),
            (-1, "S j T -k U k -j"),
        ),
        (
            (+1, "S k -j T i -k U j -i"),
            (+1, "S -j T i U j -i"),
            (+1, "S k T i -k U -i"),
            (+1, "S k -j T -k U j"),
            (-1, "S -j k T -k i U -i j"),
            (-1, "S -j T i U -i j"),
            (-1, "S k T -k i U -i"),
            (-1, "S -j k T -k U j"),
        ),
    ),
    RelatorFamily.WIII: (
        (
            (+1, "S -i -j T i -k U j k"),
            (+1, "S -i -j T i U j"),
            (+1, "S -i T i -k U k"),
            (+1, "S -j T -k U j k"),
            (-1, "S -j -i T -k i U k j"),
            (-1, "S -j -i T i U j"),
            (-1, "S -i T -k i U k"),
            (-1, "S -j T -k U k j"),
        ),
        (
            (+1, "S k j T -k i U -j -i"),
            (+1, "S j T i U -j -i"),
            (+1, "S k T -k i U -i"),
            (+1, "S k j T -k U -j"),
            (-1, "S j k T i -k U -i -j"),
            (-1, "S j T i U -i -j"),
            (-1, "S k T i -k U -i"),
            (-1, "S j k T -k U -j"),
        ),
    ),
}

_ARC_SLOT = {"S": 0, "T": 1, "U": 2}
_FRESH_SLOT = {"i": 1, "j": 2, "k": 3}


def _compile(template: str) -> tuple:
    # "S -i j T" -> (("arc",0), ("tok",-1), ("tok",2), ("arc",1))
    out = []
    for sym in template.split():
        if sym in _ARC_SLOT:
            out.append(("arc", _ARC_SLOT[sym]))
        else:
            sign = -1 if sym.startswith("-") else 1
            out.append(("tok", sign * _FRESH_SLOT[sym.lstrip("-")]))
    return tuple(out)


_TEMPLATES = {
    fam: tuple(
        tuple((sign, _compile(tmpl)) for sign, tmpl in variant)
        for variant in variants
    )
    for fam, variants in _TEMPLATE_SPECS.items()
}


@dataclass(frozen=True)
class RelatorColumn:
    """One projected relator plus where it came from.

    provenance is (family, base word tokens, cut points, variant index,
    top arrow count); None for columns read back from disk.
    """

    family: RelatorFamily
    combination: LinearCombination
    provenance: Optional[tuple] = None


_classify_memo: Dict[Tuple[int, ...], Tuple[bool, bool]] = {}


def _classify(tokens: Tuple[int, ...]) -> Tuple[bool, bool]:
    got = _classify_memo.get(tokens)
    if got is None:
        x = ArrowDiagram(tokens)
        got = (is_connected(x), is_irreducible(x))
        _classify_memo[tokens] = got
    return got


def project_combination(
    c: LinearCombination, b: int, d: int, support: TableFilter = TableFilter.ALL
) -> LinearCombination:
    """Drop terms with arrow count outside [b, d] or failing the support."""
    pred = _FILTER_PRED[support]
    out = LinearCombination()
    for x, coef in c.terms.items():
        if b <= x.arrows <= d and pred(*_classify(x.tokens)):
            out.add(x, coef)
    return out


def _oriented_base_words(arrows: int) -> Iterator[Tuple[int, ...]]:
    # all normal oriented words on the given arrow count, linear order fixed
    if arrows == 0:
        yield ()
        return
    for cw in enumerate_normal_pairings(arrows):
        for bits in itertools.product((0, 1), repeat=arrows):
            toks = []
            opened: set[int] = set()
            for a in cw:
                if a in opened:
                    toks.append(-a if bits[a - 1] == 0 else a)
                else:
                    opened.add(a)
                    toks.append(a if bits[a - 1] == 0 else -a)
            yield tuple(toks)


def _compositions(length: int, arcs: int) -> Iterator[Tuple[int, ...]]:
    # cut points splitting positions 0..length into `arcs` (possibly empty) runs
    if arcs == 1:
        yield ()
    elif arcs == 2:
        for c in range(length + 1):
            yield (c,)
    else:
        for c1 in range(length + 1):
            for c2 in range(c1, length + 1):
                yield (c1, c2)


def _raw_instances(
    family: RelatorFamily, n: int
) -> Iterator[tuple[Tuple[int, ...], Tuple[int, ...], int, tuple]]:
    """Unprojected instances at top size n: (base, cuts, variant index, terms).

    Terms is the signed template with fresh letters n-m+1..n substituted;
    each yielded term is (sign, linear token tuple), not yet canonical.
    """
    m = _FRESH_COUNT[family]
    arcs_n = _ARC_COUNT[family]
    base_arrows = n - m
    if base_arrows < 0:
        return
    fresh = tuple(base_arrows + s for s in (1, 2, 3))
    variants = _TEMPLATES[family]
    for base in _oriented_base_words(base_arrows):
        for cuts in _compositions(len(base), arcs_n):
            if arcs_n == 1:
                arcs = (base,)
            elif arcs_n == 2:
                arcs = (base[: cuts[0]], base[cuts[0]:])
            else:
                arcs = (base[: cuts[0]], base[cuts[0]: cuts[1]], base[cuts[1]:])
            for vi, variant in enumerate(variants):
                terms = []
                for sign, pat in variant:
                    toks: list[int] = []
                    for kind, val in pat:
                        if kind == "arc":
                            toks.extend(arcs[val])
                        else:
                            toks.append(
                                fresh[val - 1] if val > 0 else -fresh[-val - 1]
                            )
                    terms.append((sign, tuple(toks)))
                yield base, cuts, vi, tuple(terms)


def raw_relator(terms: Sequence[tuple]) -> LinearCombination:
    """Canonicalize a signed term list into a combination."""
    combo = LinearCombination()
    for sign, toks in terms:
        combo.add(ArrowDiagram(_canonical_tokens(toks)), sign)
    return combo


def _arc_of(pos: int, cuts: Tuple[int, ...]) -> int:
    arc = 0
    for c in cuts:
        if pos >= c:
            arc += 1
    return arc


def _splits_arcs(base: Tuple[int, ...], cuts: Tuple[int, ...]) -> bool:
    # true when every base letter has its two occurrences in different arcs
    first: Dict[int, int] = {}
    for pos, tok in enumerate(base):
        a = abs(tok)
        p = first.get(a)
        if p is None:
            first[a] = pos
        elif _arc_of(p, cuts) == _arc_of(pos, cuts):
            return False
    return True


def generate_relators(
    family: RelatorFamily,
    b: int,
    d: int,
    support: TableFilter = TableFilter.ALL,
    placements: Placement = Placement.FULL,
) -> list[RelatorColumn]:
    """All distinct projected relators of one family over the window [b, d].

    Deduplication keys on the projected (and support-filtered) combination;
    the first instance generated provides the column's provenance.
    """
    if b > d or b < 1:
        raise WindowError(f"bad window ({b}, {d})")
    m = _FRESH_COUNT[family]
    pred = _FILTER_PRED[support]
    seen: Dict[tuple, RelatorColumn] = {}
    order: list[tuple] = []
    for n in range(max(m, b), d + 2):
        for base, cuts, vi, terms in _raw_instances(family, n):
            if placements is Placement.SPLIT and not _splits_arcs(base, cuts):
                continue
            combo = LinearCombination()
            for sign, toks in terms:
                if not b <= len(toks) // 2 <= d:
                    continue
                ct = _canonical_tokens(toks)
                if pred(*_classify(ct)):
                    combo.add(ArrowDiagram(ct), sign)
            if not combo.terms:
                continue
            key = combo.key()
            if key not in seen:
                seen[key] = RelatorColumn(
                    family, combo, (family, base, cuts, vi, n)
                )
                order.append(key)
    return [seen[k] for k in order]


@dataclass
class EvaluationMatrix:
    """Integer evaluation matrix: rows a table, columns deduplicated relators.

    entries[j] maps 0-based row index to the coefficient of that row's
    diagram in column j; zero and entry-duplicate columns are dropped.
    """

    rows: DiagramTable
    cols: list[RelatorColumn]
    entries: list[Dict[int, int]]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def dense(self) -> list[list[int]]:
        m, n = self.shape
        out = [[0] * n for _ in range(m)]
        for j, col in enumerate(self.entries):
            for i, v in col.items():
                out[i][j] = v
        return out


def build_matrix(
    rows: DiagramTable, cols: Sequence[RelatorColumn]
) -> EvaluationMatrix:
    index_of = rows._index()
    kept_cols: list[RelatorColumn] = []
    kept_entries: list[Dict[int, int]] = []
    seen: set[tuple] = set()
    for col in cols:
        entry: Dict[int, int] = {}
        for x, coef in col.combination.terms.items():
            idx = index_of.get(x.tokens)
            if idx is not None:
                entry[idx - 1] = coef
        if not entry:
            continue
        key = tuple(sorted(entry.items()))
        if key in seen:
            continue
        seen.add(key)
        kept_cols.append(col)
        kept_entries.append(entry)
    return EvaluationMatrix(rows, kept_cols, kept_entries)


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_relators_jsonl(path: str, cols: Sequence[RelatorColumn]) -> None:
    lines = []
    for col in cols:
        terms = [
            {"word": format_word(x.word()), "coef": c}
            for x, c in sorted(
                col.combination.terms.items(), key=lambda t: t[0].sort_key()
            )
        ]
        lines.append(
            json.dumps(
                {"family": col.family.value, "terms": terms},
                separators=(",", ":"),
            )
        )
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_relators_jsonl(path: str) -> list[RelatorColumn]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            combo = LinearCombination()
            for t in rec["terms"]:
                w = parse_word(t["word"])
                combo.add(ArrowDiagram(_canonical_tokens(w.tokens)), t["coef"])
            out.append(RelatorColumn(RelatorFamily(rec["family"]), combo, None))
    return out


def write_matrix_csv(path: str, matrix: EvaluationMatrix) -> None:
    n = len(matrix.cols)
    header = ",".join(f"c{j + 1}" for j in range(n))
    rows = matrix.dense()
    body = "\n".join(",".join(str(v) for v in row) for row in rows)
    _atomic_write(path, header + "\n" + body + ("\n" if rows else ""))
