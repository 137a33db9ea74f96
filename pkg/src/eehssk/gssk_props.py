"""Distance structure of constant-weight (GSSK) alphabets.

Checks the pairwise distance set of a weight class, and finds the largest
subset with a given minimum distance by exact branch and bound over the
compatibility graph.  Vertex sets are Python ints used as bitsets.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .constellation import BinarySymbol, enumerate_weight_class
from .errors import BudgetExceededError, DomainError

DEFAULT_BUDGET = 500


def _check_weight(n_t: int, n_t_active: int) -> None:
    if n_t < 1 or not 1 <= n_t_active <= n_t:
        raise DomainError(f"need 1 <= n_t_active <= n_t, got n_t={n_t}, n_t_active={n_t_active}")


@dataclass(frozen=True)
class DistanceGraph:
    """Weight-``w`` words of length ``n``; edges join words at distance >= ``threshold``."""

    n: int
    w: int
    threshold: int

    def __post_init__(self):
        _check_weight(self.n, self.w)
        masks = [sum(1 << i for i in c) for c in itertools.combinations(range(self.n), self.w)]
        N = len(masks)
        adj = [0] * N
        for a in range(N):
            for b in range(a + 1, N):
                if (masks[a] ^ masks[b]).bit_count() >= self.threshold:
                    adj[a] |= 1 << b
                    adj[b] |= 1 << a
        cols = [sum(1 << k for k in range(N) if masks[k] >> j & 1) for j in range(self.n)]
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "cols", cols)

    def __len__(self):
        return len(self.masks)

    def symbol(self, v: int) -> BinarySymbol:
        return BinarySymbol.from_support(self.n, [j for j in range(self.n) if self.masks[v] >> j & 1])


def distance_histogram(n_t: int, n_t_active: int) -> dict[int, int]:
    """Count of unordered pairs at each distance within the weight class."""
    _check_weight(n_t, n_t_active)
    M = np.array([s.bits for s in enumerate_weight_class(n_t, n_t_active)], dtype=np.int32)
    overlap = M @ M.T
    iu = np.triu_indices(len(M), k=1)
    d = 2 * (n_t_active - overlap[iu])
    vals, counts = np.unique(d, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def check_lemma1(n_t: int, n_t_active: int) -> bool:
    """Distances in a weight class are exactly the even values ``2 .. 2 min(w, n - w)``."""
    hist = distance_histogram(n_t, n_t_active)
    expected = set(range(2, 2 * min(n_t_active, n_t - n_t_active) + 1, 2))
    return set(hist) == expected


def _color_order(P: int, adj: list[int]) -> list[tuple[int, int]]:
    """Greedy sequential coloring of ``P``: (vertex, color number) in color order."""
    order = []
    k = 0
    U = P
    while U:
        k += 1
        Q = U
        while Q:
            v = (Q & -Q).bit_length() - 1
            Q &= ~(1 << v)
            Q &= ~adj[v]
            U &= ~(1 << v)
            order.append((v, k))
    return order


LOCAL_SEARCH_STEPS = 20_000
LOCAL_SEARCH_RESTARTS = 4


def _local_search(g: DistanceGraph, k: int, seed: int, steps: int = LOCAL_SEARCH_STEPS) -> list[int] | None:
    """Min-conflicts swap search for ``k`` pairwise compatible words (None on failure)."""
    N = len(g)
    if k > N:
        return None
    B = np.array([[m >> j & 1 for j in range(g.n)] for m in g.masks], dtype=np.int16)
    conflict = (2 * (g.w - B @ B.T) < g.threshold).astype(np.int32)
    np.fill_diagonal(conflict, 0)
    rng = np.random.default_rng(seed)
    in_set = np.zeros(N, dtype=bool)
    in_set[rng.choice(N, k, replace=False)] = True
    conf = conflict[:, in_set].sum(axis=1)
    tabu = np.zeros(N, dtype=np.int64)
    cost = int(conf[in_set].sum()) // 2
    for step in range(steps):
        if cost == 0:
            return [int(v) for v in np.nonzero(in_set)[0]]
        members = np.nonzero(in_set)[0]
        u = rng.choice(members[conf[members] > 0])
        outside = np.nonzero(~in_set & (tabu <= step))[0]
        delta = conf[outside] - conflict[outside, u] - conf[u]
        best = delta.min()
        v = rng.choice(outside[delta == best])
        in_set[u], in_set[v] = False, True
        conf += conflict[:, v] - conflict[:, u]
        cost += int(best)
        # a very short tenure works best on these highly regular graphs
        tabu[u] = step + 2 + rng.integers(0, 2)
    return None


def _branch_and_bound(g: DistanceGraph, a1: int, a0: int, ceil: int, deadline: float | None) -> list[int]:
    n, w = g.n, g.w
    adj, cols, masks = g.adj, g.cols, g.masks
    best: list[int] = [0]

    def johnson(size: int, P: int, counts: list[int]) -> int:
        s1 = s0 = 0
        for j in range(n):
            c = counts[j]
            s1 += min(a1, c + (P & cols[j]).bit_count())
            s0 += min(a0, size - c + (P & ~cols[j]).bit_count())
        return min(s1 // w, s0 // (n - w))

    def expand(C: list[int], P: int, counts: list[int]):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceededError("clique search exceeded its time limit")
        if johnson(len(C), P, counts) <= len(best):
            return
        for v, c in reversed(_color_order(P, adj)):
            if len(C) + c <= len(best):
                return
            C2 = C + [v]
            P2 = P & adj[v]
            counts2 = [counts[j] + (masks[v] >> j & 1) for j in range(n)]
            if P2:
                expand(C2, P2, counts2)
            elif len(C2) > len(best):
                best[:] = C2
                if len(C2) >= ceil:
                    raise _Stop
            P &= ~(1 << v)

    # coordinate permutations act transitively, so some optimum contains vertex 0
    try:
        if ceil > 1:
            expand([0], adj[0], [masks[0] >> j & 1 for j in range(n)])
    except _Stop:
        pass
    return best


class _Stop(Exception):
    pass


def _trivial(n: int, w: int, threshold: int) -> int | None:
    if w < 0 or w > n:
        return 0
    if w == 0 or w == n or threshold > 2 * min(w, n - w):
        return 1
    if threshold <= 2:
        return comb(n, w)
    return None


@lru_cache(maxsize=None)
def _exact_size(n: int, threshold: int, w: int) -> int:
    t = _trivial(n, w, threshold)
    return t if t is not None else len(_solve(n, min(w, n - w), threshold, None, None)[1])


def johnson_ceiling(n: int, w: int, threshold: int) -> int:
    """``min(floor(n A(n-1, w-1) / w), floor(n A(n-1, w) / (n - w)))`` with exact ``A`` one length down."""
    t = _trivial(n, w, threshold)
    if t is not None:
        return t
    return min(n * _exact_size(n - 1, threshold, w - 1) // w, n * _exact_size(n - 1, threshold, w) // (n - w))


def _solve(n: int, w: int, threshold: int, deadline: float | None,
           ceiling: int | None) -> tuple[DistanceGraph, list[int]]:
    """Largest compatible vertex set of the weight-``w`` graph (``w <= n / 2``)."""
    g = DistanceGraph(n, w, threshold)
    ceil = johnson_ceiling(n, w, threshold)
    if ceiling is not None:
        ceil = min(ceil, ceiling)
    # a witness meeting the ceiling settles the maximum without any tree search
    for seed in range(LOCAL_SEARCH_RESTARTS):
        found = _local_search(g, ceil, seed)
        if found is not None:
            return g, found
    a1 = _exact_size(n - 1, threshold, w - 1)
    a0 = _exact_size(n - 1, threshold, w)
    return g, _branch_and_bound(g, a1, a0, ceil, deadline)


def max_set_with_min_distance(n_t: int, n_t_active: int, threshold: int, budget: int = DEFAULT_BUDGET,
                              use_corollary_ceiling: bool = True,
                              time_limit: float | None = None) -> tuple[int, list[BinarySymbol]]:
    """Exact largest subset of the weight class with pairwise distance >= ``threshold``.

    ``budget`` caps the graph size (number of words); ``time_limit`` caps
    wall-clock seconds of tree search.  With ``use_corollary_ceiling`` the
    closed-form bound for thresholds 4 and 6 also stops the search early,
    which presumes that bound; leave it off to certify the bound itself.
    """
    _check_weight(n_t, n_t_active)
    if comb(n_t, n_t_active) > budget:
        raise BudgetExceededError(f"C({n_t},{n_t_active}) = {comb(n_t, n_t_active)} words exceed the budget of {budget}")
    words = enumerate_weight_class(n_t, n_t_active)
    t = _trivial(n_t, n_t_active, threshold)
    if t is not None:
        return t, words[:t]
    ceiling = None
    if use_corollary_ceiling and threshold in (4, 6):
        ceiling = corollary_bound(n_t, n_t_active, threshold)
    # complementing every word preserves distances, so search the lighter side
    flip = 2 * n_t_active > n_t
    w = n_t - n_t_active if flip else n_t_active
    deadline = None if time_limit is None else time.monotonic() + time_limit
    g, found = _solve(n_t, w, threshold, deadline, ceiling)
    full = (1 << n_t) - 1
    masks = [(g.masks[v] ^ full) if flip else g.masks[v] for v in found]
    witness = [BinarySymbol.from_support(n_t, [j for j in range(n_t) if m >> j & 1]) for m in masks]
    return len(witness), witness


@dataclass(frozen=True)
class Theorem1Report:
    n_t: int
    rate: int
    n_t_active: int
    max_d4_set: int
    alphabet_dmin: int

    @property
    def certified(self) -> bool:
        """No ``2**rate`` words of the class can be pairwise 4 apart, so ``d_min`` is 2."""
        return self.max_d4_set < 2**self.rate and self.alphabet_dmin == 2


def check_theorem1(n_t: int, rate: int, budget: int = DEFAULT_BUDGET) -> Theorem1Report:
    """Certify that every GSSK alphabet at ``(n_t, rate)`` has minimum distance 2."""
    from .constellation import build_gssk, choose_gssk_nt

    w = choose_gssk_nt(n_t, rate)
    if w == 1 or 4 > 2 * min(w, n_t - w):
        largest = 1
    else:
        largest, _ = max_set_with_min_distance(n_t, w, 4, budget, use_corollary_ceiling=False)
    return Theorem1Report(n_t, rate, w, largest, build_gssk(n_t, rate).d_min)


def corollary_bound(n_t: int, n_t_active: int, threshold: int) -> int:
    C = comb(n_t, n_t_active)
    if threshold == 4:
        return C // (n_t - n_t_active + 1)
    if threshold == 6:
        w = n_t_active
        return C // (n_t * w - w * w + 1)
    raise ValueError("closed-form bound given for thresholds 4 and 6 only")


@dataclass(frozen=True)
class CorollaryRow:
    n_t: int
    n_t_active: int
    threshold: int
    exact: int
    bound: int
    seconds: float

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound


def corollary_instances(budget: int = DEFAULT_BUDGET) -> list[tuple[int, int, int]]:
    """Every nontrivial ``(n_t, n_t_active, threshold)`` whose weight class fits the budget."""
    out = []
    n = 4
    while comb(n, 2) <= budget:
        for w in range(2, n - 1):
            if comb(n, w) > budget:
                continue
            for thr in (4, 6):
                if thr <= 2 * min(w, n - w):
                    out.append((n, w, thr))
        n += 1
    return out


def check_corollaries(n_t: int | None = None, n_t_active: int | None = None,
                      budget: int = DEFAULT_BUDGET) -> list[CorollaryRow]:
    """Exact maxima against the closed-form bounds.

    Without arguments, every instance within ``budget`` is checked.  The
    search runs without the closed-form ceiling so it cannot confirm
    itself.  Instances where the threshold exceeds the class diameter are
    skipped (the maximum there is trivially one).
    """
    rows = []
    for n, w, thr in corollary_instances(budget):
        if (n_t is not None and n != n_t) or (n_t_active is not None and w != n_t_active):
            continue
        t0 = time.monotonic()
        exact, _ = max_set_with_min_distance(n, w, thr, budget, use_corollary_ceiling=False)
        rows.append(CorollaryRow(n, w, thr, exact, corollary_bound(n, w, thr), time.monotonic() - t0))
    return rows
