import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hubogas.boolpoly import Literal, Polynomial, bits_of, expand
from hubogas.encoding import (
    Strategy,
    delta,
    format_table,
    hamming_distance,
    hamming_weight,
    make_code,
    odd_parity_slots,
    unused_codewords,
)
from hubogas.problems import GcpInstance, gcp_formulation


def words(*s):
    return tuple(tuple(int(c) for c in w) for w in s)


def test_asc_table():
    assert make_code("asc", 4).codewords == words("00", "01", "10", "11")


def test_dsc_table():
    assert make_code("dsc", 4).codewords == words("11", "10", "01", "00")


def test_gray_table():
    assert make_code("pf", 8).codewords == words("111", "101", "100", "000", "001", "011", "010", "110")


def test_even_table():
    code = make_code("or", 4)
    assert code.width == 3
    assert code.codewords == words("000", "011", "101", "110")


def test_one_hot():
    code = make_code(Strategy.ONE_HOT, 3)
    assert code.width == 3
    assert code.codewords == words("100", "010", "001")


@pytest.mark.parametrize("name", ["asc", "dsc", "pf", "or"])
def test_binary_codes_need_two_indices(name):
    with pytest.raises(ValueError):
        make_code(name, 1)


def test_strategy_aliases():
    assert Strategy.parse("gray") is Strategy.GRAY_PF
    assert Strategy.parse("EvenOR") is Strategy.EVEN_OR
    with pytest.raises(ValueError):
        Strategy.parse("nope")


def lits(term):
    return [(l.var, l.negated) for l in term.literals]


def test_delta_examples():
    assert lits(delta(make_code("asc", 4), 1, [0, 1])) == [(0, True), (1, True)]
    assert lits(delta(make_code("dsc", 4), 2, [0, 1])) == [(0, False), (1, True)]
    assert lits(delta(make_code("pf", 8), 4, [0, 1, 2])) == [(0, True), (1, True), (2, True)]
    assert delta(make_code("asc", 4), 1, [0, 1]).coefficient == 1


def test_delta_errors():
    code = make_code("asc", 3)
    with pytest.raises(IndexError):
        delta(code, 5, [0, 1])
    with pytest.raises(ValueError):
        delta(code, 1, [0])
    # slots past I are allowed for penalty terms
    assert delta(code, 4, [0, 1]) is not None


def test_unused_codewords_examples():
    dsc3 = make_code("dsc", 3)
    assert unused_codewords(dsc3) == [4]
    assert dsc3.codeword(4) == (0, 0)
    assert unused_codewords(make_code("asc", 4)) == []
    or4 = make_code("or", 4)
    assert unused_codewords(or4) == []
    assert len(odd_parity_slots(or4)) == 4
    assert all(hamming_weight(or4.codeword(i)) % 2 for i in odd_parity_slots(or4))


def test_unused_even_slots_for_three_colors():
    or3 = make_code("or", 3)
    assert unused_codewords(or3) == [4]
    assert or3.codeword(4) == (1, 1, 0)


def test_hamming_weight_examples():
    assert hamming_weight((1, 1, 1)) == 3
    assert hamming_weight((0, 0, 0)) == 0
    assert hamming_weight((0, 1, 1)) == 2


def test_decode_and_reasons():
    assert make_code("asc", 4).decode((0, 0)) == 1
    assert make_code("pf", 8).decode((1, 1, 1)) == 1
    assert make_code("or", 4).invalid_reason((0, 0, 1)) == "invalid (odd parity)"
    assert make_code("dsc", 3).invalid_reason((0, 0)) == "unused codeword"
    assert make_code("asc", 3).invalid_reason((0, 1)) is None


def test_format_table_layout():
    text = format_table(make_code("or", 4))
    assert "Not used" in text
    assert "(1-x_v1) x_v2 x_v3" in text


# -- properties ---------------------------------------------------------------


indices = st.integers(2, 16)
binary = st.sampled_from(["asc", "dsc", "pf", "or"])


@given(binary, indices)
def test_codewords_distinct_and_sized(name, I):
    code = make_code(name, I)
    assert len(set(code.slots)) == len(code.slots) == 1 << code.width
    bits = (I - 1).bit_length()
    assert code.width == (bits + 1 if name == "or" else bits)


@given(binary, indices)
def test_exactly_one_indicator_fires(name, I):
    code = make_code(name, I)
    vars_ = list(range(code.width))
    terms = [delta(code, i, vars_) for i in range(1, code.num_slots + 1)]
    poly = Polynomial(code.width, terms)
    assert set(poly.values().tolist()) == {1}
    for i, t in enumerate(terms, 1):
        vals = Polynomial(code.width, [t]).values()
        (hit,) = [x for x in range(len(vals)) if vals[x]]
        assert tuple(bits_of(hit, code.width)) == code.codeword(i)


@given(st.integers(2, 32))
def test_gray_adjacency(I):
    code = make_code("pf", I)
    assert code.slots[0] == (1,) * code.width
    for a, b in zip(code.slots, code.slots[1:]):
        assert hamming_distance(a, b) == 1


@given(st.integers(2, 32))
def test_even_code_capacity(I):
    code = make_code("or", I)
    evens = [w for w in code.slots if hamming_weight(w) % 2 == 0]
    assert len(evens) == code.even_slot_count == 1 << (code.width - 1) >= I
    assert all(hamming_weight(w) % 2 == 0 for w in code.codewords)
    assert list(code.codewords) == sorted(code.codewords)


@given(binary, indices, st.data())
def test_delta_expansion_size(name, I, data):
    code = make_code(name, I)
    i = data.draw(st.integers(1, code.num_slots))
    t = delta(code, i, list(range(code.width)))
    negs = sum(l.negated for l in t.literals)
    e = expand(Polynomial(code.width, [t]))
    # the empty monomial of an all-negated product lands in the constant
    assert len(e.terms) + (e.constant != 0) == 1 << negs


@pytest.mark.parametrize("I", [3, 5, 6, 7])
def test_descending_has_fewer_terms_than_ascending(I):
    inst = GcpInstance(4, ((0, 1), (1, 2), (2, 3), (3, 0)), I)
    asc = expand(gcp_formulation(inst, "asc").polynomial)
    dsc = expand(gcp_formulation(inst, "dsc").polynomial)
    assert len(dsc.terms) < len(asc.terms)


def test_literal_polarity_follows_bits():
    for code in (make_code("dsc", 5), make_code("pf", 6)):
        for i in range(1, code.num_slots + 1):
            t = delta(code, i, [10, 11, 12])
            assert [not l.negated for l in t.literals] == [bool(b) for b in code.codeword(i)]
            assert all(isinstance(l, Literal) for l in t.literals)


def test_even_code_all_widths():
    for I in range(2, 9):
        code = make_code("or", I)
        expected = [w for w in itertools.product((0, 1), repeat=code.width) if sum(w) % 2 == 0]
        assert list(code.slots[: len(expected)]) == expected
