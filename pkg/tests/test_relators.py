import pytest

from arrowkernel.counting import LinearCombination
from arrowkernel.diagrams import TableFilter, diagram_of, enumerate_diagrams
from arrowkernel.relators import (
    Placement,
    RelatorFamily,
    WindowError,
    build_matrix,
    generate_relators,
    project_combination,
    read_relators_jsonl,
    write_matrix_csv,
    write_relators_jsonl,
)
from arrowkernel.words import parse_word


def test_window_validation():
    with pytest.raises(WindowError):
        generate_relators(RelatorFamily.R1, 3, 2)
    with pytest.raises(WindowError):
        generate_relators(RelatorFamily.SIII, 0, 2)


def test_r1_single_column_at_window_11():
    cols = generate_relators(RelatorFamily.R1, 1, 1)
    assert len(cols) == 1
    assert cols[0].combination == LinearCombination({diagram_of(parse_word("1 -1")): 1})


def test_r1_discharges_on_irreducible_support():
    for b, d in [(2, 3), (3, 4)]:
        assert generate_relators(RelatorFamily.R1, b, d, TableFilter.IRREDUCIBLE) == []
        assert generate_relators(RelatorFamily.R1, b, d, TableFilter.CONNECTED) == []


def test_strong_riii_column_count_23():
    cols = generate_relators(RelatorFamily.SIII, 2, 3, support=TableFilter.CONNECTED)
    assert len(cols) == 5
    assert all(c.family is RelatorFamily.SIII for c in cols)


def test_weak_riii_column_counts_23():
    full = generate_relators(RelatorFamily.WIII, 2, 3)
    split = generate_relators(RelatorFamily.WIII, 2, 3, placements=Placement.SPLIT)
    conn = generate_relators(RelatorFamily.WIII, 2, 3, support=TableFilter.CONNECTED)
    assert len(full) == 22
    assert len(split) == 14
    assert len(conn) == 8
    # split placements are a subset of the full instance space
    full_keys = {c.combination.key() for c in full}
    assert all(c.combination.key() in full_keys for c in split)


def test_columns_are_deduplicated_and_projected():
    for family in (RelatorFamily.SII, RelatorFamily.WII, RelatorFamily.WIII):
        cols = generate_relators(family, 2, 3, support=TableFilter.CONNECTED)
        keys = [c.combination.key() for c in cols]
        assert len(set(keys)) == len(keys)
        for c in cols:
            assert len(c.combination) > 0
            for x in c.combination.terms:
                assert 2 <= x.arrows <= 3


def test_support_filter_drops_terms():
    conn_pred = {e.diagram for e in enumerate_diagrams(2, 3, TableFilter.CONNECTED).entries}
    for c in generate_relators(RelatorFamily.WIII, 2, 3, support=TableFilter.CONNECTED):
        assert set(c.combination.terms) <= conn_pred


def test_project_combination():
    big = diagram_of(parse_word("1 2 3 4 -1 -2 -3 -4"))
    small = diagram_of(parse_word("1 2 -1 -2"))
    lonely = diagram_of(parse_word("1 -1 2 -2"))
    c = LinearCombination({big: 1, small: 2, lonely: 3})
    p = project_combination(c, 2, 3)
    assert p == LinearCombination({small: 2, lonely: 3})
    p_conn = project_combination(c, 2, 3, TableFilter.CONNECTED)
    assert p_conn == LinearCombination({small: 2})


def test_provenance_tops_cover_expected_range():
    cols = generate_relators(RelatorFamily.WIII, 2, 3)
    assert all(c.provenance is not None for c in cols)
    tops = {c.provenance[-1] for c in cols}
    # instances live on 3- and 4-arrow hosts for this window
    assert tops == {3, 4}


def test_relator_jsonl_roundtrip(tmp_path):
    cols = generate_relators(RelatorFamily.SIII, 2, 3, support=TableFilter.CONNECTED)
    path = str(tmp_path / "r.jsonl")
    write_relators_jsonl(path, cols)
    back = read_relators_jsonl(path)
    assert len(back) == len(cols)
    for a, b in zip(cols, back):
        assert a.family == b.family
        assert a.combination == b.combination


def test_build_matrix_shape_and_dedup():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    cols = generate_relators(RelatorFamily.WIII, 2, 3, placements=Placement.SPLIT)
    m = build_matrix(table, cols)
    # 14 instance columns collapse to 8 distinct entry vectors over these rows
    assert m.shape == (7, 8)
    vecs = {tuple(sorted(e.items())) for e in m.entries}
    assert len(vecs) == len(m.entries)
    dense = m.dense()
    assert len(dense) == 7 and all(len(row) == 8 for row in dense)


def test_build_matrix_drops_unsupported_terms():
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    lookup = table._index()
    cols = generate_relators(RelatorFamily.SIII, 2, 3)
    m = build_matrix(table, cols)
    for col, entry in zip(m.cols, m.entries):
        expect = {}
        for x, coef in col.combination.terms.items():
            idx = lookup.get(x.tokens)
            if idx is not None:
                expect[idx - 1] = coef
        assert expect == entry


def test_matrix_csv(tmp_path):
    table = enumerate_diagrams(2, 3, TableFilter.CONNECTED)
    cols = generate_relators(RelatorFamily.SIII, 2, 3, support=TableFilter.CONNECTED)
    m = build_matrix(table, cols)
    path = tmp_path / "m.csv"
    write_matrix_csv(str(path), m)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "c1,c2,c3,c4,c5"
    parsed = [[int(v) for v in ln.split(",")] for ln in lines[1:]]
    assert parsed == m.dense()
