import random
from math import comb

import pytest

from arrowkernel.counting import (
    Functional,
    LinearCombination,
    count_occurrences,
    count_vector,
    eval_on_combination,
    evaluate_functional,
    subset_expansion,
)
from arrowkernel.diagrams import TableFilter, diagram_of, enumerate_diagrams
from arrowkernel.words import OrientedGaussWord, concatenate, normalize_word, parse_word

ONE_ARROW = diagram_of(parse_word("1 -1"))


def random_word(rng, max_arrows, min_arrows=1):
    k = rng.randint(min_arrows, max_arrows)
    toks = [i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)]
    rng.shuffle(toks)
    return normalize_word(OrientedGaussWord(toks))


def test_count_single_arrow_pattern():
    rng = random.Random(5)
    for _ in range(20):
        w = random_word(rng, 5)
        assert count_occurrences(w, ONE_ARROW) == w.arrows


def test_count_whole_word_pattern():
    w = parse_word("1 2 -1 3 -2 -3")
    assert count_occurrences(w, diagram_of(w)) == 1
    assert count_occurrences(w, diagram_of(parse_word("1 2 -1 -2"))) == 2


def test_count_empty_pattern():
    w = parse_word("1 -1")
    assert count_occurrences(w, diagram_of(OrientedGaussWord(()))) == 1


def test_count_vector_matches_count_occurrences():
    table = enumerate_diagrams(1, 3, TableFilter.ALL)
    rng = random.Random(31)
    for _ in range(25):
        w = random_word(rng, 5)
        vec = count_vector(table, w)
        assert len(vec) == len(table)
        for e, got in zip(table.entries, vec):
            assert got == count_occurrences(w, e.diagram)


def test_subset_expansion_term_count():
    # total multiplicity is the number of letter subsets in the size window
    rng = random.Random(17)
    for _ in range(15):
        w = random_word(rng, 6)
        combo = subset_expansion(w, 1, 3)
        total = sum(combo.terms.values())
        assert total == sum(comb(w.arrows, k) for k in range(1, 4))


def test_subset_expansion_is_tilde_evaluation():
    # the coefficient of a pattern in the expansion is its occurrence count
    table = enumerate_diagrams(1, 3, TableFilter.ALL)
    rng = random.Random(23)
    for _ in range(15):
        w = random_word(rng, 6)
        combo = subset_expansion(w, 1, 3)
        for e in table.entries:
            assert combo.terms.get(e.diagram, 0) == count_occurrences(w, e.diagram)


def test_linear_combination_algebra():
    a = LinearCombination({ONE_ARROW: 2})
    b = LinearCombination({ONE_ARROW: -2, diagram_of(parse_word("1 2 -1 -2")): 1})
    s = a + b
    assert ONE_ARROW not in s.terms  # exact cancellation drops the term
    assert len(s) == 1
    assert s.scaled(3).terms[diagram_of(parse_word("1 2 -1 -2"))] == 3
    assert s.scaled(0) == LinearCombination()
    assert a.key() != b.key() and a.key() == LinearCombination({ONE_ARROW: 2}).key()


def test_functional_validates_length():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    with pytest.raises(ValueError):
        Functional(table, (1, 2))


def test_evaluate_functional_is_dot_product():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    coeffs = tuple(range(1, len(table) + 1))
    f = Functional(table, coeffs)
    rng = random.Random(41)
    for _ in range(10):
        w = random_word(rng, 5)
        vec = count_vector(table, w)
        assert evaluate_functional(f, w) == sum(c * v for c, v in zip(coeffs, vec))


def test_eval_on_combination_is_linear():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    f = Functional(table, tuple(range(1, 8)))
    x = diagram_of(parse_word("1 2 -1 -2"))
    y = diagram_of(parse_word("1 2 -1 3 -2 -3"))
    c = LinearCombination({x: 2, y: -5})
    assert eval_on_combination(f, c) == 2 * eval_on_combination(f, LinearCombination({x: 1})) - 5 * eval_on_combination(f, LinearCombination({y: 1}))


def test_connected_support_gives_additivity():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    f = Functional(table, tuple(range(1, 8)))
    rng = random.Random(59)
    for _ in range(20):
        v, w = random_word(rng, 4), random_word(rng, 4)
        assert evaluate_functional(f, concatenate(v, w)) == evaluate_functional(f, v) + evaluate_functional(f, w)
