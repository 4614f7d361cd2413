"""Arrow diagrams: canonical classes of oriented Gauss words, and their tables.

A chord word is an unoriented normal Gauss word (each letter twice, letters
numbered 1..d by first occurrence).  Oriented enumeration decorates each
chord word with all ``2**n`` start/end assignments and keeps one canonical
representative per rotation + relabeling class.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .words import (
    OrientedGaussWord,
    _canonical_tokens,
    _encode,
    format_word,
    parse_word,
)

# Unoriented normal Gauss words as flat tuples of letters, e.g. (1, 2, 1, 2).
ChordWord = tuple[int, ...]


def is_normal_pairing(cw: ChordWord) -> bool:
    counts: dict[int, int] = {}
    order: list[int] = []
    for a in cw:
        if a not in counts:
            counts[a] = 0
            order.append(a)
        counts[a] += 1
    return all(c == 2 for c in counts.values()) and order == list(
        range(1, len(order) + 1)
    )


def enumerate_normal_pairings(d: int) -> list[ChordWord]:
    """All normal Gauss words with ``d`` letters; ``(2d-1)!!`` of them.

    Built by insertion: shift a word on d-1 letters up by one, put the former
    occurrence of letter 1 leftmost and its latter in each of the 2d-1
    remaining positions.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    words: list[ChordWord] = [()]
    for size in range(1, d + 1):
        nxt: list[ChordWord] = []
        for w in words:
            shifted = tuple(a + 1 for a in w)
            for pos in range(1, 2 * size):
                nxt.append((1,) + shifted[: pos - 1] + (1,) + shifted[pos - 1 :])
        words = nxt
    return words


@dataclass(frozen=True, order=False)
class ArrowDiagram:
    """Canonical representative of an oriented Gauss word class."""

    tokens: tuple[int, ...]

    @property
    def arrows(self) -> int:
        return len(self.tokens) // 2

    def word(self) -> OrientedGaussWord:
        return OrientedGaussWord(self.tokens)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.arrows, _encode(self.tokens))

    def __repr__(self) -> str:
        return f"ArrowDiagram({format_word(self.word())!r})"


def diagram_of(w: OrientedGaussWord) -> ArrowDiagram:
    return ArrowDiagram(_canonical_tokens(w.tokens))


def mirror_diagram(x: ArrowDiagram) -> ArrowDiagram:
    return ArrowDiagram(_canonical_tokens(tuple(reversed(x.tokens))))


def _positions(tokens: Sequence[int]) -> dict[int, tuple[int, int]]:
    pos: dict[int, list[int]] = {}
    for p, t in enumerate(tokens):
        pos.setdefault(abs(t), []).append(p)
    return {a: (ps[0], ps[1]) for a, ps in pos.items()}


def _crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    # exactly one endpoint of b inside the linear span of a; this linear test
    # is rotation-invariant for two chords on a circle
    return (a[0] < b[0] < a[1]) != (a[0] < b[1] < a[1])


def is_irreducible(x: ArrowDiagram) -> bool:
    """True when every arrow crosses at least one other arrow."""
    pos = list(_positions(x.tokens).values())
    for i, a in enumerate(pos):
        if not any(_crosses(a, b) for j, b in enumerate(pos) if j != i):
            return False
    return True


def is_connected(x: ArrowDiagram) -> bool:
    """True when no proper cyclic interval is closed under the pairing.

    A diagram that splits as two non-empty blocks along a cyclic cut is a
    product and therefore not connected.
    """
    toks = x.tokens
    n2 = len(toks)
    if n2 <= 2:
        return True
    pos = _positions(toks)
    for s in range(n2):
        open_letters: set[int] = set()
        # grow the interval [s, s+l); if all touched letters close strictly
        # before wrapping the whole circle, the complement is a second factor
        for l in range(1, n2 - 1):
            a = abs(toks[(s + l - 1) % n2])
            if a in open_letters:
                open_letters.discard(a)
            else:
                open_letters.add(a)
            if not open_letters:
                return False
    return True


class TableFilter(Enum):
    ALL = "all"
    CONNECTED = "conn"
    IRREDUCIBLE = "irr"


_FILTER_PRED = {
    TableFilter.ALL: lambda conn, irr: True,
    TableFilter.CONNECTED: lambda conn, irr: conn,
    TableFilter.IRREDUCIBLE: lambda conn, irr: irr,
}


@dataclass(frozen=True)
class TableEntry:
    index: int  # 1-based position in the table
    diagram: ArrowDiagram
    connected: bool
    irreducible: bool
    mirror_index: int  # 1-based; equals index for self-mirror classes


@dataclass
class DiagramTable:
    """Ordered table of diagram classes for a window [b, d].

    Order is (arrow count, canonical encoding) ascending; indices are
    1-based and stable across runs.  Treat instances as immutable.
    """

    window: tuple[int, int]
    filter: Optional[TableFilter]
    entries: list[TableEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def index_of(self, x: ArrowDiagram) -> Optional[int]:
        return self._index().get(x.tokens)

    def _index(self) -> dict[tuple[int, ...], int]:
        idx = getattr(self, "_idx_cache", None)
        if idx is None:
            idx = {e.diagram.tokens: e.index for e in self.entries}
            object.__setattr__(self, "_idx_cache", idx)
        return idx


def _canonical_batch(args: tuple[int, int, int]) -> list[tuple[int, ...]]:
    # worker: canonicalize every orientation of a slice of the pairings of n
    n, lo, hi = args
    out = []
    pairings = enumerate_normal_pairings(n)[lo:hi]
    for cw in pairings:
        for bits in itertools.product((0, 1), repeat=n):
            toks = []
            opened: set[int] = set()
            for a in cw:
                if a in opened:
                    toks.append(-a if bits[a - 1] == 0 else a)
                else:
                    opened.add(a)
                    toks.append(a if bits[a - 1] == 0 else -a)
            out.append(_canonical_tokens(toks))
    return out


def enumerate_diagrams(
    b: int,
    d: int,
    filt: TableFilter = TableFilter.ALL,
    threads: int = 1,
) -> DiagramTable:
    """Every class with arrow count in [b, d] passing the filter.

    `threads > 1` shards the orientation sweep over worker processes; the
    result is identical to the sequential one.
    """
    if not (1 <= b <= d):
        raise ValueError(f"need 1 <= b <= d, got ({b}, {d})")
    canon: set[tuple[int, ...]] = set()
    jobs: list[tuple[int, int, int]] = []
    for n in range(b, d + 1):
        total = 1
        for k in range(3, 2 * n, 2):
            total *= k
        if threads > 1:
            step = max(1, total // (4 * threads))
            jobs.extend((n, lo, min(lo + step, total)) for lo in range(0, total, step))
        else:
            jobs.append((n, 0, total))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for batch in pool.map(_canonical_batch, jobs, chunksize=1):
                canon.update(batch)
    else:
        for job in jobs:
            canon.update(_canonical_batch(job))

    pred = _FILTER_PRED[filt]
    kept: list[tuple[ArrowDiagram, bool, bool]] = []
    for toks in canon:
        x = ArrowDiagram(toks)
        conn = is_connected(x)
        irr = is_irreducible(x)
        if pred(conn, irr):
            kept.append((x, conn, irr))
    kept.sort(key=lambda t: t[0].sort_key())

    index_by_tokens = {x.tokens: i + 1 for i, (x, _, _) in enumerate(kept)}
    entries = []
    for i, (x, conn, irr) in enumerate(kept):
        m = mirror_diagram(x)
        entries.append(
            TableEntry(
                index=i + 1,
                diagram=x,
                connected=conn,
                irreducible=irr,
                mirror_index=index_by_tokens.get(m.tokens, i + 1),
            )
        )
    return DiagramTable(window=(b, d), filter=filt, entries=entries)


@dataclass(frozen=True)
class MirrorReport:
    """Mirror structure of a table: 1-based index pairs and self-mirror list."""

    pairs: tuple[tuple[int, int], ...]  # (i, j) with i < j
    selfs: tuple[int, ...]


def mirror_pairs(table: DiagramTable) -> MirrorReport:
    pairs = []
    selfs = []
    for e in table.entries:
        if e.mirror_index == e.index:
            selfs.append(e.index)
        elif e.index < e.mirror_index:
            pairs.append((e.index, e.mirror_index))
    return MirrorReport(pairs=tuple(pairs), selfs=tuple(selfs))


def table_lines(table: DiagramTable) -> Iterator[str]:
    """The table as JSONL lines, one entry per line, without newlines."""
    for e in table.entries:
        yield json.dumps(
            {
                "index": e.index,
                "word": format_word(e.diagram.word()),
                "arrows": e.diagram.arrows,
                "connected": e.connected,
                "irreducible": e.irreducible,
                "mirror_index": e.mirror_index,
            },
            separators=(",", ":"),
        )


def write_table_jsonl(table: DiagramTable, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        for line in table_lines(table):
            fh.write(line + "\n")
    os.replace(tmp, path)


def read_table_jsonl(path: str) -> DiagramTable:
    entries = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            w = parse_word(rec["word"])
            entries.append(
                TableEntry(
                    index=rec["index"],
                    diagram=ArrowDiagram(w.tokens),
                    connected=rec["connected"],
                    irreducible=rec["irreducible"],
                    mirror_index=rec["mirror_index"],
                )
            )
    if not entries:
        raise ValueError(f"empty table: {path}")
    arrows = [e.diagram.arrows for e in entries]
    return DiagramTable(window=(min(arrows), max(arrows)), filter=None, entries=entries)
