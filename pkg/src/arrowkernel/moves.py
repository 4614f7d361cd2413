"""Reidemeister-style rewriting of oriented Gauss words.

Each move is described by a pattern of adjacent token pairs on the circle.
Forward sites locate the pattern in a word (removing letters for RI/RII,
exchanging the paired tokens for RIII); backward sites are insertion slots
for RI/RII and occurrences of the partner pattern for RIII.  Because a
signed token occurs at most once in a word, every pattern pair after the
anchor is found by a dictionary lookup, so site search is linear.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .words import OrientedGaussWord, normalize_word


class InvalidSiteError(ValueError):
    """The site does not match the word it is being applied to."""


class MoveKind(Enum):
    RI = "ri"
    STRONG_RII = "sii"
    WEAK_RII = "wii"
    STRONG_RIII = "siii"
    WEAK_RIII = "wiii"


class Variant(Enum):
    A = "a"
    B = "b"


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class MoveSite:
    """Where a move applies.

    For pattern sites the positions list the matched tokens, pairwise: adjacent
    pattern pairs occupy (positions[2t], positions[2t+1]).  For insertion sites
    the positions are slots into the linear representative, 0..len(word).
    """

    positions: Tuple[int, ...]
    direction: Direction
    variant: Variant


# Pattern pairs as ((sign, role), (sign, role)) with roles 0, 1, 2 standing
# for the distinct letters i, j, k.  Order within a pair is order on the circle.
_PATTERNS: Dict[Tuple[MoveKind, Variant, Direction], Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]] = {
    (MoveKind.RI, Variant.A, Direction.FORWARD): (((1, 0), (-1, 0)),),
    (MoveKind.RI, Variant.B, Direction.FORWARD): (((-1, 0), (1, 0)),),
    (MoveKind.STRONG_RII, Variant.A, Direction.FORWARD): (
        ((1, 0), (-1, 1)),
        ((1, 1), (-1, 0)),
    ),
    (MoveKind.STRONG_RII, Variant.B, Direction.FORWARD): (
        ((-1, 0), (1, 1)),
        ((-1, 1), (1, 0)),
    ),
    (MoveKind.WEAK_RII, Variant.A, Direction.FORWARD): (
        ((-1, 0), (1, 1)),
        ((1, 0), (-1, 1)),
    ),
    (MoveKind.STRONG_RIII, Variant.A, Direction.FORWARD): (
        ((-1, 0), (1, 1)),
        ((-1, 2), (1, 0)),
        ((-1, 1), (1, 2)),
    ),
    (MoveKind.STRONG_RIII, Variant.A, Direction.BACKWARD): (
        ((1, 1), (-1, 0)),
        ((1, 0), (-1, 2)),
        ((1, 2), (-1, 1)),
    ),
    (MoveKind.STRONG_RIII, Variant.B, Direction.FORWARD): (
        ((1, 2), (-1, 1)),
        ((1, 0), (-1, 2)),
        ((1, 1), (-1, 0)),
    ),
    (MoveKind.STRONG_RIII, Variant.B, Direction.BACKWARD): (
        ((-1, 1), (1, 2)),
        ((-1, 2), (1, 0)),
        ((-1, 0), (1, 1)),
    ),
    (MoveKind.WEAK_RIII, Variant.A, Direction.FORWARD): (
        ((-1, 0), (-1, 1)),
        ((1, 0), (-1, 2)),
        ((1, 1), (1, 2)),
    ),
    (MoveKind.WEAK_RIII, Variant.A, Direction.BACKWARD): (
        ((-1, 1), (-1, 0)),
        ((-1, 2), (1, 0)),
        ((1, 2), (1, 1)),
    ),
    (MoveKind.WEAK_RIII, Variant.B, Direction.FORWARD): (
        ((1, 2), (1, 1)),
        ((-1, 2), (1, 0)),
        ((-1, 1), (-1, 0)),
    ),
    (MoveKind.WEAK_RIII, Variant.B, Direction.BACKWARD): (
        ((1, 1), (1, 2)),
        ((1, 0), (-1, 2)),
        ((-1, 0), (-1, 1)),
    ),
}

_VARIANTS: Dict[MoveKind, Tuple[Variant, ...]] = {
    MoveKind.RI: (Variant.A, Variant.B),
    MoveKind.STRONG_RII: (Variant.A, Variant.B),
    MoveKind.WEAK_RII: (Variant.A,),
    MoveKind.STRONG_RIII: (Variant.A, Variant.B),
    MoveKind.WEAK_RIII: (Variant.A, Variant.B),
}


def _pattern_sites(
    tokens: Sequence[int],
    pattern: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...],
    direction: Direction,
    variant: Variant,
    seen: Set[frozenset],
    out: List[MoveSite],
) -> None:
    L = len(tokens)
    npairs = len(pattern)
    if L < 2 * npairs:
        return
    pos_of = {t: p for p, t in enumerate(tokens)}
    for p0 in range(L):
        binding: Dict[int, int] = {}
        used: Set[int] = set()

        def bind(role: int, letter: int) -> bool:
            cur = binding.get(role)
            if cur is not None:
                return cur == letter
            if letter in used:
                return False
            binding[role] = letter
            used.add(letter)
            return True

        starts: List[int] = []
        ok = True
        for (s1, r1), (s2, r2) in pattern:
            if not starts:
                q = p0
            elif r1 in binding:
                qq = pos_of.get(s1 * binding[r1])
                if qq is None:
                    ok = False
                    break
                q = qq
            else:
                # the pattern lists each later pair with at least one bound role
                qq = pos_of.get(s2 * binding[r2])
                if qq is None:
                    ok = False
                    break
                q = (qq - 1) % L
            a, b = tokens[q], tokens[(q + 1) % L]
            if a * s1 <= 0 or b * s2 <= 0:
                ok = False
                break
            if not (bind(r1, abs(a)) and bind(r2, abs(b))):
                ok = False
                break
            starts.append(q)
        if not ok:
            continue
        positions: List[int] = []
        for q in starts:
            positions.extend((q, (q + 1) % L))
        if len(set(positions)) != 2 * npairs:
            continue
        key = frozenset(frozenset((q, (q + 1) % L)) for q in starts)
        if key in seen:
            continue
        seen.add(key)
        out.append(MoveSite(tuple(positions), direction, variant))


def _insertion_sites(tokens: Sequence[int], kind: MoveKind, variant: Variant, out: List[MoveSite]) -> None:
    if (kind, variant, Direction.FORWARD) not in _PATTERNS:
        return
    L = len(tokens)
    if kind is MoveKind.RI:
        for g in range(L + 1):
            out.append(MoveSite((g,), Direction.BACKWARD, variant))
    elif kind is MoveKind.STRONG_RII:
        # the pattern is symmetric in its two arcs, so slot order is immaterial
        for g1 in range(L + 1):
            for g2 in range(g1, L + 1):
                out.append(MoveSite((g1, g2), Direction.BACKWARD, variant))
    elif kind is MoveKind.WEAK_RII:
        # slot order distinguishes the two arcs; both orders are distinct sites
        for g1 in range(L + 1):
            for g2 in range(L + 1):
                out.append(MoveSite((g1, g2), Direction.BACKWARD, variant))


def find_sites(w: OrientedGaussWord, kind: MoveKind, variant: Optional[Variant] = None) -> List[MoveSite]:
    """All sites where the move applies, pattern occurrences first.

    With variant None both variants are scanned and sites whose pairings
    coincide are reported once, labeled with the first variant that found
    them.  For RIII the backward list holds the partner pattern; for RI and
    RII it holds insertion slots.
    """
    tokens = w.tokens
    variants = _VARIANTS[kind] if variant is None else (variant,)
    out: List[MoveSite] = []
    seen: Set[frozenset] = set()
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        for v in variants:
            pat = _PATTERNS.get((kind, v, direction))
            if pat is not None:
                _pattern_sites(tokens, pat, direction, v, seen, out)
    for v in variants:
        _insertion_sites(tokens, kind, v, out)
    return out


def _insertion_blocks(kind: MoveKind, variant: Variant, base: int) -> List[Tuple[int, ...]]:
    pattern = _PATTERNS[(kind, variant, Direction.FORWARD)]
    letters = (base + 1, base + 2, base + 3)
    return [tuple(s * letters[r] for s, r in pair) for pair in pattern]


def apply_move(w: OrientedGaussWord, kind: MoveKind, site: MoveSite) -> OrientedGaussWord:
    """Rewrite w at the site; the result is normalized.

    Raises InvalidSiteError unless the site is one that find_sites(w, kind,
    site.variant) reports.
    """
    if site not in find_sites(w, kind, site.variant):
        raise InvalidSiteError(f"site {site} does not match the word")
    tokens = list(w.tokens)
    if site.direction is Direction.BACKWARD and kind in (MoveKind.RI, MoveKind.STRONG_RII, MoveKind.WEAK_RII):
        base = max((abs(t) for t in tokens), default=0)
        blocks = _insertion_blocks(kind, site.variant, base)
        if kind is MoveKind.RI:
            g = site.positions[0]
            tokens[g:g] = blocks[0]
        else:
            g1, g2 = site.positions
            if g1 == g2:
                tokens[g1:g1] = list(blocks[0]) + list(blocks[1])
            elif g1 > g2:
                tokens[g1:g1] = blocks[0]
                tokens[g2:g2] = blocks[1]
            else:
                tokens[g2:g2] = blocks[1]
                tokens[g1:g1] = blocks[0]
    elif kind in (MoveKind.STRONG_RIII, MoveKind.WEAK_RIII):
        pos = site.positions
        for t in range(0, len(pos), 2):
            p, q = pos[t], pos[t + 1]
            tokens[p], tokens[q] = tokens[q], tokens[p]
    else:
        drop = set(site.positions)
        tokens = [t for p, t in enumerate(tokens) if p not in drop]
    return normalize_word(OrientedGaussWord(tokens))


def random_walk(
    w: OrientedGaussWord,
    allowed: Iterable[MoveKind],
    steps: int,
    seed: int,
) -> List[OrientedGaussWord]:
    """Walk the move graph, one uniformly chosen applicable move per step.

    Returns the visited words, starting with w; the walk stops early only
    when no allowed move applies.  The same seed reproduces the same walk.
    """
    kinds = sorted(set(allowed), key=lambda k: k.value)
    rng = random.Random(seed)
    path = [w]
    cur = w
    for _ in range(steps):
        options: List[Tuple[MoveKind, MoveSite]] = []
        for kind in kinds:
            for site in find_sites(cur, kind):
                options.append((kind, site))
        if not options:
            break
        kind, site = rng.choice(options)
        cur = apply_move(cur, kind, site)
        path.append(cur)
    return path
