"""Gray-mapped square and rectangular QAM used as a comparison baseline."""

from __future__ import annotations

import itertools

import numpy as np

from .errors import RateInfeasibleError


def gray(n: int) -> int:
    return n ^ (n >> 1)


def pam_levels(bits: int) -> np.ndarray:
    """Amplitude for each label: ``levels[label]`` with Gray-adjacent neighbours."""
    if bits == 0:
        return np.zeros(1)
    size = 2**bits
    amp = np.arange(size) * 2.0 - (size - 1)
    levels = np.empty(size)
    for pos in range(size):
        levels[gray(pos)] = amp[pos]
    return levels


def qam_constellation(bits: int) -> np.ndarray:
    """Unit average energy QAM points indexed by their bit label.

    Even ``bits`` give square QAM; odd ``bits`` a rectangular grid with
    the extra bit on the in-phase axis (8-QAM is 4 x 2).  The label's
    leading bits select the in-phase level.
    """
    if bits < 1:
        raise RateInfeasibleError("QAM needs at least one bit per symbol")
    bi = (bits + 1) // 2
    bq = bits // 2
    li, lq = pam_levels(bi), pam_levels(bq)
    pts = np.array([li[k >> bq] + 1j * lq[k & (2**bq - 1)] for k in range(2**bits)])
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


def multi_antenna_qam(rate: int, n_t: int) -> tuple[np.ndarray, list[str]]:
    """Independent QAM streams on ``n_t`` antennas carrying ``rate`` bits jointly.

    Returns the ``n_t x 2**rate`` candidate matrix and each column's label;
    antenna 0 carries the leading bits.
    """
    if rate % n_t:
        raise RateInfeasibleError(f"{rate} bits cannot be split evenly over {n_t} antennas")
    per = rate // n_t
    pts = qam_constellation(per)
    cols, labels = [], []
    for combo in itertools.product(range(2**per), repeat=n_t):
        cols.append([pts[c] for c in combo])
        labels.append("".join(format(c, f"0{per}b") for c in combo))
    return np.array(cols, dtype=complex).T, labels
