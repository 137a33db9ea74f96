from math import comb

import pytest

from eehssk.constellation import BinarySymbol
from eehssk.errors import BudgetExceededError, DomainError
from eehssk.gssk_props import (DistanceGraph, check_corollaries, check_lemma1, check_theorem1, corollary_bound,
                               corollary_instances, distance_histogram, johnson_ceiling,
                               max_set_with_min_distance)


def brute_force_max(n, w, thr):
    """Exhaustive subset search for tiny classes."""
    from itertools import combinations

    words = [sum(1 << i for i in c) for c in combinations(range(n), w)]
    best = 1
    for k in range(2, len(words) + 1):
        if any(all((a ^ b).bit_count() >= thr for a, b in combinations(S, 2)) for S in combinations(words, k)):
            best = k
        else:
            break
    return best


def test_histogram_small_case():
    assert distance_histogram(5, 2) == {2: 30, 4: 15}
    assert sum(distance_histogram(5, 2).values()) == 45
    assert set(distance_histogram(6, 1)) == {2}
    assert set(distance_histogram(8, 4)) == {2, 4, 6, 8}


@pytest.mark.parametrize("n", range(1, 11))
def test_lemma_exhaustive(n):
    for w in range(1, n):
        assert check_lemma1(n, w)
        assert all(d % 2 == 0 and d >= 2 for d in distance_histogram(n, w))


def test_graph_structure():
    g = DistanceGraph(6, 3, 4)
    assert len(g) == 20
    for a in range(20):
        assert not g.adj[a] >> a & 1
        for b in range(20):
            assert (g.adj[a] >> b & 1) == (g.adj[b] >> a & 1)
            if a != b:
                assert (g.adj[a] >> b & 1) == (g.symbol(a).distance(g.symbol(b)) >= 4)


def _check_witness(witness, n, w, thr):
    assert all(s.weight == w and s.n_t == n for s in witness)
    assert all(a.distance(b) >= thr for i, a in enumerate(witness) for b in witness[i + 1:])


@pytest.mark.parametrize("n,w,thr,expected", [
    (5, 2, 4, 2), (5, 2, 6, 1), (7, 3, 6, 2), (6, 3, 4, 4), (8, 4, 4, 14), (10, 5, 4, 36),
    (11, 5, 4, 66), (12, 4, 4, 51), (9, 6, 4, 12),
])
def test_known_maxima(n, w, thr, expected):
    size, witness = max_set_with_min_distance(n, w, thr, use_corollary_ceiling=False)
    assert size == expected == len(witness)
    _check_witness(witness, n, w, thr)


@pytest.mark.parametrize("n,w,thr", [(5, 2, 4), (6, 2, 4), (6, 3, 4), (6, 3, 6), (7, 2, 4), (7, 5, 4)])
def test_against_brute_force(n, w, thr):
    assert max_set_with_min_distance(n, w, thr, use_corollary_ceiling=False)[0] == brute_force_max(n, w, thr)


def test_reference_witness_is_valid():
    size, witness = max_set_with_min_distance(5, 2, 4)
    assert size == 2
    _check_witness(witness, 5, 2, 4)
    ref = [BinarySymbol.from_string("11000"), BinarySymbol.from_string("00110")]
    _check_witness(ref, 5, 2, 4)


def test_budget_enforced():
    with pytest.raises(BudgetExceededError):
        max_set_with_min_distance(12, 5, 4)
    with pytest.raises(DomainError):
        max_set_with_min_distance(5, 6, 4)


def test_corollary_values():
    assert corollary_bound(5, 2, 4) == 2
    assert corollary_bound(6, 3, 4) == 5
    assert corollary_bound(7, 3, 6) == 2
    with pytest.raises(ValueError):
        corollary_bound(7, 3, 8)


def test_johnson_ceiling_is_upper_bound():
    for n, w, thr in [(9, 4, 4), (10, 3, 4), (11, 3, 4), (8, 4, 6)]:
        assert max_set_with_min_distance(n, w, thr, use_corollary_ceiling=False)[0] <= johnson_ceiling(n, w, thr)


@pytest.mark.parametrize("n,m", [(5, 3), (4, 2), (8, 5), (7, 4), (6, 4)])
def test_theorem_certificates(n, m):
    rep = check_theorem1(n, m)
    assert rep.certified
    assert rep.max_d4_set < 2**m


def test_corollaries_small_range():
    rows = check_corollaries(6)
    assert rows and all(r.holds for r in rows)
    assert {(r.n_t_active, r.threshold): r.exact for r in rows} == {(2, 4): 3, (3, 4): 4, (3, 6): 2, (4, 4): 3}


def test_instance_enumeration():
    inst = corollary_instances()
    assert all(comb(n, w) <= 500 for n, w, _ in inst)
    assert (12, 4, 4) in inst and (31, 2, 4) in inst and (12, 5, 4) not in inst


@pytest.mark.parametrize("n", [6, 8])
def test_density_at_half_weight(n):
    w = n // 2
    size, _ = max_set_with_min_distance(n, w, 4, use_corollary_ceiling=False)
    assert size / comb(n, w) <= 2 / n * 1.15
