"""Oriented Gauss words on a circle.

A word is a sequence of signed integer tokens: ``+k`` is the start (tail) of
arrow ``k``, ``-k`` its end (head).  Every letter present occurs exactly once
with each sign.  Storage is linear; all cyclic semantics are concentrated in
:func:`canonical_form` (and in the moves module, which matches patterns
cyclically).  The empty word is valid.

The text format used everywhere (CLI arguments, JSONL fields) is the
whitespace-separated list of signed integers, e.g. ``"1 2 -1 -2"``.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class LetterCountError(ValueError):
    """A letter does not occur exactly once with each sign."""


class ZeroLetterError(ValueError):
    """Token 0 has no letter."""


class TokenSyntaxError(ValueError):
    """A text token is not a signed integer."""


class UnknownLetterError(KeyError):
    """A subword was asked to keep a letter the word does not contain."""


def _validate(tokens: tuple[int, ...]) -> None:
    starts: set[int] = set()
    ends: set[int] = set()
    for t in tokens:
        if t == 0:
            raise ZeroLetterError("letter 0 is not allowed")
        if t > 0:
            if t in starts:
                raise LetterCountError(f"start of letter {t} occurs twice")
            starts.add(t)
        else:
            if -t in ends:
                raise LetterCountError(f"end of letter {-t} occurs twice")
            ends.add(-t)
    if starts != ends:
        odd = sorted(starts.symmetric_difference(ends))
        raise LetterCountError(f"letters with a missing endpoint: {odd}")


class OrientedGaussWord:
    """An oriented Gauss word; immutable and hashable.

    >>> OrientedGaussWord((1, 2, -1, -2)).arrows
    2
    >>> OrientedGaussWord(())
    OrientedGaussWord('')
    """

    __slots__ = ("tokens",)

    def __init__(self, tokens: Iterable[int]):
        toks = tuple(int(t) for t in tokens)
        _validate(toks)
        object.__setattr__(self, "tokens", toks)

    def __setattr__(self, name, value):
        raise AttributeError("OrientedGaussWord is immutable")

    @property
    def arrows(self) -> int:
        return len(self.tokens) // 2

    def letters(self) -> tuple[int, ...]:
        """Distinct letters in order of first occurrence."""
        seen: list[int] = []
        got: set[int] = set()
        for t in self.tokens:
            a = abs(t)
            if a not in got:
                got.add(a)
                seen.append(a)
        return tuple(seen)

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, OrientedGaussWord) and self.tokens == other.tokens

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __repr__(self) -> str:
        return f"OrientedGaussWord({format_word(self)!r})"


def parse_word(text: str) -> OrientedGaussWord:
    """Parse the signed-integer text format.

    >>> parse_word("1 -2 2 -1").tokens
    (1, -2, 2, -1)
    >>> parse_word("")
    OrientedGaussWord('')
    """
    toks = []
    for piece in text.split():
        try:
            toks.append(int(piece))
        except ValueError:
            raise TokenSyntaxError(f"not a signed integer token: {piece!r}") from None
    return OrientedGaussWord(toks)


def format_word(w: OrientedGaussWord) -> str:
    return " ".join(str(t) for t in w.tokens)


def _normalize_tokens(tokens: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for t in tokens:
        a = t if t > 0 else -t
        r = relabel.get(a)
        if r is None:
            r = len(relabel) + 1
            relabel[a] = r
        out.append(r if t > 0 else -r)
    return tuple(out)


def normalize_word(w: OrientedGaussWord) -> OrientedGaussWord:
    """Relabel letters 1..n in order of first occurrence; roles are kept.

    >>> format_word(normalize_word(parse_word("-2 1 2 -1")))
    '-1 2 1 -2'
    """
    return OrientedGaussWord(_normalize_tokens(w.tokens))


def _encode(tokens: Sequence[int]) -> tuple[int, ...]:
    # token (letter, role) as the integer 2*letter + role with Start=0 < End=1,
    # so lexicographic comparison of encodings matches the documented order
    return tuple((t << 1) if t > 0 else ((-t << 1) | 1) for t in tokens)


def _norm_encode_rotation(tokens: Sequence[int], start: int) -> tuple[int, ...]:
    n2 = len(tokens)
    relabel: dict[int, int] = {}
    nxt = 1
    out = []
    for idx in range(start - n2, start):
        t = tokens[idx]
        a = t if t > 0 else -t
        r = relabel.get(a)
        if r is None:
            r = nxt
            relabel[a] = nxt
            nxt += 1
        out.append((r << 1) if t > 0 else ((r << 1) | 1))
    return tuple(out)


def _decode(codes: Sequence[int]) -> tuple[int, ...]:
    return tuple((c >> 1) if not (c & 1) else -(c >> 1) for c in codes)


def _canonical_tokens(tokens: Sequence[int]) -> tuple[int, ...]:
    n2 = len(tokens)
    if n2 == 0:
        return ()
    best = None
    for s in range(n2):
        cand = _norm_encode_rotation(tokens, s)
        if best is None or cand < best:
            best = cand
    return _decode(best)


def canonical_form(w: OrientedGaussWord) -> OrientedGaussWord:
    """Canonical representative of the rotation + relabeling class.

    The minimum is taken over all ``2n`` rotations, each normalized, under
    the encoding Start=0 < End=1 keyed by (letter, role).  This order is
    load-bearing: table indices and every serialized artifact depend on it.

    >>> format_word(canonical_form(parse_word("2 1 -2 -1")))
    '1 2 -1 -2'
    """
    return OrientedGaussWord(_canonical_tokens(w.tokens))


def rotate_word(w: OrientedGaussWord, shift: int) -> OrientedGaussWord:
    """Cyclic rotation moving position ``shift`` to the front."""
    n2 = len(w.tokens)
    if n2 == 0:
        return w
    s = shift % n2
    return OrientedGaussWord(w.tokens[s:] + w.tokens[:s])


def reverse_word(w: OrientedGaussWord) -> OrientedGaussWord:
    """Token sequence reversed; each token keeps its own role.

    The result is not normalized.  On classes this is the mirror involution.
    """
    return OrientedGaussWord(tuple(reversed(w.tokens)))


def _subword_tokens(tokens: Sequence[int], keep: frozenset[int]) -> tuple[int, ...]:
    return _normalize_tokens([t for t in tokens if (t if t > 0 else -t) in keep])


def subword(w: OrientedGaussWord, keep: Iterable[int]) -> OrientedGaussWord:
    """Erase all letters outside ``keep``; the result is normalized.

    >>> format_word(subword(parse_word("1 2 -1 3 -2 -3"), {2, 3}))
    '1 -1 2 -2'
    """
    ks = frozenset(keep)
    present = {abs(t) for t in w.tokens}
    missing = ks - present
    if missing:
        raise UnknownLetterError(f"letters not in word: {sorted(missing)}")
    return OrientedGaussWord(_subword_tokens(w.tokens, ks))


def concatenate(v: OrientedGaussWord, w: OrientedGaussWord) -> OrientedGaussWord:
    """Linear concatenation; ``w``'s letters are shifted above ``v``'s.

    Normalized inputs give a normalized output.
    """
    shift = max((abs(t) for t in v.tokens), default=0)
    shifted = tuple(t + shift if t > 0 else t - shift for t in w.tokens)
    return OrientedGaussWord(v.tokens + shifted)
