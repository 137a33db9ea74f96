from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eehssk.constellation import build_hssk_dmin2
from eehssk.errors import DegenerateAlphabetError, UnknownSymbolError
from eehssk.huffman import (PrefixCodebook, CodebookEntry, achieved_stats, bits_to_symbols, build_codebook,
                            canonical_codes, fixed_length_codebook, huffman_lengths, symbols_to_bits)

from conftest import sym
from oracles import huffman_expected_length


def test_table3_length_multisets(table3_codebook):
    by_weight = {}
    for e in table3_codebook:
        by_weight.setdefault(e.symbol.weight, []).append(len(e.code))
    assert sorted(by_weight[1]) == [2, 2, 3, 3, 3]
    assert sorted(by_weight[3]) == [6] * 6 + [7] * 4


def test_table3_stats_exact(table3_codebook):
    rate, power = achieved_stats(table3_codebook)
    assert rate == 2.90625 and power == 1.25
    assert table3_codebook.kraft_sum() == 1


def test_table3_decode_examples(table3_codebook):
    out, used = bits_to_symbols(table3_codebook, "10100")
    assert [str(s) for s in out] == ["01000", "00001"] and used == 5
    assert bits_to_symbols(table3_codebook, "") == ([], 0)
    assert bits_to_symbols(table3_codebook, "1") == ([], 0)
    assert symbols_to_bits(table3_codebook, [sym("11100")]) == "1111111"
    assert symbols_to_bits(table3_codebook, []) == ""


def test_unknown_symbol(table3_codebook):
    with pytest.raises(UnknownSymbolError):
        symbols_to_bits(table3_codebook, [sym("11111")])


def test_trivial_codes():
    assert huffman_lengths([0.5, 0.5]) == [1, 1]
    assert huffman_lengths([1 / 16] * 16) == [4] * 16
    book = build_codebook([sym("01"), sym("10")], [0.5, 0.5])
    assert achieved_stats(book) == (1.0, 1.0)
    with pytest.raises(DegenerateAlphabetError):
        build_codebook([sym("01"), sym("10")], [1.0, 0.0])


def test_uniform_fixed_length_over_hssk():
    book = fixed_length_codebook(build_hssk_dmin2(5, 4))
    assert achieved_stats(book) == (4.0, 2.5)
    huff = build_codebook(build_hssk_dmin2(5, 4))
    assert huff.lengths == [4] * 16


def test_canonical_codes_counting():
    assert canonical_codes([2, 2, 2, 3, 3]) == ["00", "01", "10", "110", "111"]
    assert canonical_codes([1, 2, 2]) == ["0", "10", "11"]


def test_decode_table_matches_codes(table3_codebook):
    idx, length = table3_codebook.decode_table()
    L = table3_codebook.max_len
    for k, e in enumerate(table3_codebook):
        window = int((e.code + "0" * L)[:L], 2)
        assert idx[window] == k and length[window] == len(e.code)
    assert (idx >= 0).all()


def test_codebook_rejects_non_prefix_free():
    with pytest.raises(ValueError):
        PrefixCodebook([CodebookEntry("a", "0"), CodebookEntry("b", "01")])


priors_strategy = st.lists(st.floats(1e-4, 1.0), min_size=2, max_size=40).map(
    lambda xs: [x / sum(xs) for x in xs])


@settings(max_examples=300, deadline=None)
@given(priors_strategy)
def test_huffman_properties(priors):
    book = build_codebook(list(range(len(priors))), priors)
    assert book.is_prefix_free()
    assert book.kraft_sum() == Fraction(1)
    lengths = book.lengths
    expected = sum(p * n for p, n in zip(priors, lengths))
    assert expected == pytest.approx(huffman_expected_length(priors), rel=1e-12)
    for a in range(len(priors)):
        for b in range(len(priors)):
            if priors[a] > priors[b]:
                assert lengths[a] <= lengths[b]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.lists(st.integers(0, k), min_size=2, max_size=30)))
def test_dyadic_priors_hit_entropy(exponents):
    raw = [2.0 ** -e for e in exponents]
    # complete to a dyadic distribution by splitting the remainder
    total = sum(raw)
    if total > 1:
        return
    rest = 1 - total
    while rest > 0:
        e = int(np.ceil(-np.log2(rest)))
        raw.append(2.0 ** -e)
        rest -= 2.0 ** -e
    if len(raw) < 2:
        return
    book = build_codebook(list(range(len(raw))), raw)
    entropy = -sum(p * np.log2(p) for p in raw)
    assert sum(p * n for p, n in zip(raw, book.lengths)) == pytest.approx(entropy, abs=1e-12)


def _random_prefix_lengths(rng, k):
    """Lengths of a random full binary tree with k leaves."""
    leaves = [0]
    while len(leaves) < k:
        i = rng.integers(len(leaves))
        d = leaves.pop(i)
        leaves += [d + 1, d + 1]
    return leaves


def test_huffman_beats_random_prefix_codes(rng):
    priors = rng.dirichlet(np.ones(12))
    book = build_codebook(list(range(12)), priors)
    ours = float(np.dot(priors, book.lengths))
    for _ in range(10_000):
        lengths = _random_prefix_lengths(rng, 12)
        perm = rng.permutation(12)
        assert ours <= float(np.dot(priors, np.array(lengths)[perm])) + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="01", max_size=300))
def test_roundtrip_on_consumed_prefix(bits):
    from eehssk.constellation import build_code_dmin, alphabet_from_priors
    from eehssk.design import DesignProblem, solve

    code = build_code_dmin(5, 2)
    book = build_codebook(alphabet_from_priors(code, solve(DesignProblem.from_code(code, 3, 3.0)).priors))
    symbols, used = bits_to_symbols(book, bits)
    assert symbols_to_bits(book, symbols) == bits[:used]
    assert len(bits) - used < book.max_len


def test_length_distribution_is_deterministic(table3_codebook):
    again = build_codebook(table3_codebook.alphabet().symbols,
                           [2.0 ** -len(c) for c in table3_codebook.codes])
    assert Counter(again.lengths) == Counter(table3_codebook.lengths)
