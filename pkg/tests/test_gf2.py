from hypothesis import given, settings, strategies as st

from toric_negativity.gf2 import (
    Gf2Matrix,
    combine,
    echelon,
    from_mask,
    gf2_rank,
    in_span,
    left_nullspace,
    popcount,
    to_mask,
)

rows_st = st.lists(st.integers(min_value=0, max_value=(1 << 12) - 1), min_size=0, max_size=10)


def test_mask_round_trip():
    assert to_mask([0, 3, 5]) == 0b101001
    assert from_mask(0b101001) == [0, 3, 5]
    assert popcount(0b101001) == 3


def test_rank_examples():
    assert gf2_rank([]) == 0
    assert gf2_rank([0, 0, 0]) == 0
    assert gf2_rank([0b001, 0b010, 0b011]) == 2
    assert gf2_rank([1 << k for k in range(7)]) == 7


def test_matrix_shape_and_restrict():
    M = Gf2Matrix.from_supports([[0, 1], [1, 2], [0, 2]], 4)
    assert M.shape == (3, 4)
    assert M.rank() == 2
    assert M.restrict([0]).rank() == 1


@given(rows_st)
def test_rank_bounded(rows):
    assert gf2_rank(rows) <= min(len(rows), 12)
    assert len(echelon(rows)) == gf2_rank(rows)


@given(rows_st, st.data())
def test_rank_invariant_under_row_operations(rows, data):
    rows = list(rows)
    r = gf2_rank(rows)
    if len(rows) >= 2:
        i = data.draw(st.integers(0, len(rows) - 1))
        j = data.draw(st.integers(0, len(rows) - 1))
        rows[i], rows[j] = rows[j], rows[i]
        assert gf2_rank(rows) == r
        if i != j:
            rows[i] ^= rows[j]
            assert gf2_rank(rows) == r


@settings(max_examples=50)
@given(rows_st)
def test_left_nullspace(rows):
    null = left_nullspace(rows)
    assert len(null) == len(rows) - gf2_rank(rows)
    for coeffs in null:
        assert coeffs != 0
        assert combine(rows, coeffs) == 0


@given(rows_st, st.integers(min_value=0, max_value=(1 << 10) - 1))
def test_in_span_of_combination(rows, coeffs):
    v = combine(rows, coeffs & ((1 << len(rows)) - 1))
    assert in_span(v, rows)
    assert in_span(0, rows)
