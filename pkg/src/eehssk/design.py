"""Entropy-constrained minimum-power priors over weight classes.

Minimising ``sum_i i |C_i| P_i`` subject to ``sum_i |C_i| P_i = 1`` and an
entropy floor of ``m`` bits gives the tilted family ``P_i ∝ beta**i``
with ``0 < beta <= 1``.  Both rate and average power grow with ``beta``,
so the tilt hitting a target rate is found by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, log2
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .constellation import CodePartition, build_code_dmin
from .errors import MonotonicityError, NonConvergenceError, RateInfeasibleError

RATE_TOL = 1e-9
MONOTONE_GRID = 1000


@dataclass(frozen=True)
class DesignProblem:
    """Class sizes ``{i: |C_i|}``, RF-chain limit ``max_rf`` and target ``rate`` in bits."""

    class_sizes: Mapping[int, int]
    max_rf: int
    rate: float

    def __post_init__(self):
        sizes = {int(i): int(n) for i, n in self.class_sizes.items()}
        if any(n <= 0 for n in sizes.values()) or any(i < 1 for i in sizes):
            raise ValueError(f"class sizes must be positive with weights >= 1: {sizes}")
        if self.max_rf < 1:
            raise ValueError("max_rf must be at least 1")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")
        object.__setattr__(self, "class_sizes", dict(sorted(sizes.items())))
        if not self.admissible:
            raise RateInfeasibleError(f"no class of weight <= {self.max_rf}")

    @classmethod
    def from_code(cls, code: CodePartition, max_rf: int, rate: float) -> "DesignProblem":
        return cls(code.class_sizes, max_rf, rate)

    @classmethod
    def for_antennas(cls, n_t: int, d_min: int, max_rf: int, rate: float) -> "DesignProblem":
        return cls.from_code(build_code_dmin(n_t, d_min), max_rf, rate)

    @property
    def admissible(self) -> dict[int, int]:
        return {i: n for i, n in self.class_sizes.items() if i <= self.max_rf}

    @property
    def capacity(self) -> float:
        """Rate at ``beta = 1``: every admissible codeword equiprobable."""
        return log2(sum(self.admissible.values()))

    @property
    def floor_rate(self) -> float:
        """Rate in the ``beta -> 0+`` limit: only the lightest class is used."""
        adm = self.admissible
        return log2(adm[min(adm)])

    def with_rate(self, rate: float) -> "DesignProblem":
        return DesignProblem(self.class_sizes, self.max_rf, rate)


@dataclass(frozen=True)
class DesignSolution:
    """Optimal per-class priors.

    ``beta == 0.0`` together with ``at_zero_limit`` stands for the limit
    ``beta -> 0+``; the returned priors are the limiting ones.
    """

    beta: float
    priors: dict[int, float]
    rate: float
    avg_power: float
    constraint_active: bool
    at_zero_limit: bool = False
    class_sizes: dict[int, int] = field(default_factory=dict, repr=False)


def _log_priors(sizes: Mapping[int, int], beta: float) -> dict[int, float]:
    w = np.array(list(sizes), dtype=float)
    n = np.array(list(sizes.values()), dtype=float)
    lb = log(beta)
    log_norm = logsumexp(np.log(n) + w * lb)
    return {i: i * lb - log_norm for i in sizes}


def _limit_priors(sizes: Mapping[int, int]) -> dict[int, float]:
    i0 = min(sizes)
    return {i: (1.0 / sizes[i] if i == i0 else 0.0) for i in sizes}


def priors_for_beta(problem: DesignProblem, beta: float) -> dict[int, float]:
    """``P_i = beta**i / sum_j |C_j| beta**j`` over the admissible classes."""
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    return {i: float(np.exp(lp)) for i, lp in _log_priors(problem.admissible, beta).items()}


def rate_of_beta(problem: DesignProblem, beta: float) -> float:
    sizes = problem.admissible
    if beta == 0:
        return problem.floor_rate
    lp = _log_priors(sizes, beta)
    # 0 log 0 = 0: underflowed classes contribute nothing
    return float(sum(-n * np.exp(lp[i]) * lp[i] / log(2) for i, n in sizes.items() if np.isfinite(lp[i])))


def power_of_beta(problem: DesignProblem, beta: float) -> float:
    sizes = problem.admissible
    if beta == 0:
        return float(min(sizes))
    lp = _log_priors(sizes, beta)
    return float(sum(i * n * np.exp(lp[i]) for i, n in sizes.items()))


def _curves(problem: DesignProblem, betas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sizes = problem.admissible
    w = np.array(list(sizes), dtype=float)
    n = np.array(list(sizes.values()), dtype=float)
    logit = np.log(n)[None, :] + np.log(betas)[:, None] * w[None, :]
    lp_cls = logit - logsumexp(logit, axis=1, keepdims=True)  # log mass per class
    mass = np.exp(lp_cls)
    lp_sym = lp_cls - np.log(n)[None, :]
    rate = -(mass * lp_sym).sum(axis=1) / log(2)
    power = (mass * w[None, :]).sum(axis=1)
    return rate, power


def check_monotone(problem: DesignProblem, points: int = MONOTONE_GRID) -> None:
    """Raise MonotonicityError if rate or power decreases along a beta grid."""
    betas = np.linspace(1.0 / points, 1.0, points)
    rate, power = _curves(problem, betas)
    slack = 1e-12
    for name, vals in (("rate", rate), ("power", power)):
        drops = np.flatnonzero(np.diff(vals) < -slack * np.maximum(1.0, np.abs(vals[1:])))
        if drops.size:
            k = int(drops[0])
            raise MonotonicityError(
                f"{name} decreases between beta={betas[k]:.4g} and {betas[k + 1]:.4g}: "
                f"{vals[k]!r} -> {vals[k + 1]!r}")


def _solution(problem: DesignProblem, beta: float, active: bool) -> DesignSolution:
    sizes = problem.admissible
    if beta == 0:
        return DesignSolution(0.0, _limit_priors(sizes), problem.floor_rate, float(min(sizes)),
                              active, at_zero_limit=True, class_sizes=dict(sizes))
    return DesignSolution(beta, priors_for_beta(problem, beta), rate_of_beta(problem, beta),
                          power_of_beta(problem, beta), active, class_sizes=dict(sizes))


def solve(problem: DesignProblem, max_iter: int = 2000) -> DesignSolution:
    """Minimum average power priors meeting ``problem.rate``."""
    m = problem.rate
    cap = problem.capacity
    if m > cap + 1e-12:
        raise RateInfeasibleError(f"rate {m} exceeds capacity log2({sum(problem.admissible.values())}) = {cap:.6f}")
    if m <= problem.floor_rate:
        return _solution(problem, 0.0, active=False)
    if len(problem.admissible) == 1 or abs(m - cap) <= RATE_TOL:
        return _solution(problem, 1.0, active=True)
    check_monotone(problem)
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        r = rate_of_beta(problem, mid)
        if abs(r - m) <= RATE_TOL:
            return _solution(problem, mid, active=True)
        if r < m:
            lo = mid
        else:
            hi = mid
        if hi - lo <= np.spacing(hi):
            break
    r = rate_of_beta(problem, hi)
    if abs(r - m) <= RATE_TOL:
        return _solution(problem, hi, active=True)
    raise NonConvergenceError(f"bisection stalled at beta={hi!r}", achieved=abs(r - m))


def min_power_at_rate(problem: DesignProblem, rate: float) -> float:
    """Point of the optimum locus at ``rate`` (NaN above capacity)."""
    if rate > problem.capacity + 1e-12:
        return float("nan")
    return solve(problem.with_rate(rate)).avg_power


def optimum_locus(problem: DesignProblem, beta_grid: Sequence[float]) -> list[tuple[float, float]]:
    """``(rate, avg_power)`` along the tilt family; ``0`` means the ``0+`` limit."""
    out = []
    for b in beta_grid:
        if not 0 <= b <= 1:
            raise ValueError(f"beta grid value {b} outside (0, 1]")
        out.append((rate_of_beta(problem, b), power_of_beta(problem, b)))
    return out
