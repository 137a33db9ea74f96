"""Independent reference computations used by several test modules."""

import numpy as np


def simplex_grid_min_power(class_sizes, rate, step=1e-3):
    """Brute-force minimum average power over class masses on a simplex grid.

    Each class ``i`` receives total mass ``q_i`` spread evenly over its
    ``n_i`` members; a point is feasible when its entropy reaches ``rate``.
    Returns ``inf`` when no grid point is feasible.
    """
    w = np.array(list(class_sizes), dtype=float)
    n = np.array(list(class_sizes.values()), dtype=float)
    k = len(w)
    N = int(round(1 / step))
    if k == 1:
        q = np.array([[1.0]])
    elif k == 2:
        a = np.arange(N + 1) / N
        q = np.stack([a, 1 - a], axis=1)
    elif k == 3:
        a, b = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
        keep = a + b <= N
        a, b = a[keep] / N, b[keep] / N
        q = np.stack([a, b, np.clip(1 - a - b, 0, None)], axis=1)
    else:
        raise ValueError("grid oracle handles at most three classes")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(q > 0, q * (np.log2(n) - np.log2(q)), 0.0).sum(axis=1)
    power = q @ w
    feasible = h >= rate
    return float(power[feasible].min()) if feasible.any() else float("inf")


def huffman_expected_length(priors):
    """Textbook Huffman cost via repeated merging (no code assignment)."""
    import heapq

    heap = list(map(float, priors))
    heapq.heapify(heap)
    total = 0.0
    while len(heap) > 1:
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        total += a + b
        heapq.heappush(heap, a + b)
    return total
