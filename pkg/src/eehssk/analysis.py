"""Pairwise error probability and averaged symbol error estimates.

For a symbol pair at Hamming distance ``d`` with prior log-ratio ``L`` the
pairwise error probability is ``E[Q(sqrt(Z) + L / (N0 sqrt(Z)))]`` where
``Z / s2`` is chi-square with ``2 n_r`` degrees of freedom and
``s2 = Es d / (2 n_t N0)``.  ``nt_norm=False`` drops the ``1 / n_t``
factor, which is what the unnormalised signal model actually produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, special, stats

from .constellation import Alphabet, BinarySymbol
from .errors import DomainError, NonConvergenceError

QUAD_ABS_TOL = 1e-10
TAIL_MASS = 1e-14


def qfunc(x):
    """Gaussian tail probability ``Q(x)``."""
    return 0.5 * special.erfc(np.asarray(x) / math.sqrt(2.0))


@dataclass(frozen=True)
class PepInputs:
    d: int
    log_ratio: float
    snr: float
    n_t: int
    n_r: int
    es: float = 1.0
    nt_norm: bool = True

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("distance must be at least 1")
        if self.snr <= 0:
            raise ValueError("snr must be positive")
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("antenna counts must be positive")

    @property
    def n0(self) -> float:
        return self.es / self.snr

    @property
    def sigma_z2(self) -> float:
        denom = 2.0 * self.n_t if self.nt_norm else 2.0
        return self.snr * self.d / denom

    @property
    def z_distribution(self):
        """Frozen Gamma(shape ``n_r``, scale ``2 sigma_z^2``) law of ``Z``."""
        return stats.gamma(a=self.n_r, scale=2.0 * self.sigma_z2)


def _gamma_logpdf_const(k: int, scale: float) -> float:
    return -math.lgamma(k) - k * math.log(scale)


def pep_exact(inputs: PepInputs, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Pairwise error probability by adaptive Gauss-Kronrod quadrature."""
    k, scale = inputs.n_r, 2.0 * inputs.sigma_z2
    shift = inputs.log_ratio / inputs.n0
    if scale < 1e-300:
        return float(qfunc(0.0)) if shift == 0 else float(shift < 0)
    upper = float(stats.gamma.isf(TAIL_MASS, a=k, scale=scale))
    c = _gamma_logpdf_const(k, scale)
    sqrt2 = math.sqrt(2.0)

    def integrand(x):
        if x <= 0:
            if shift == 0:
                return 0.5 * (1.0 if k == 1 else 0.0) * math.exp(c)
            return 0.0 if shift > 0 else (math.exp(c) if k == 1 else 0.0)
        r = math.sqrt(x)
        q = 0.5 * math.erfc((r + shift / r) / sqrt2)
        return q * math.exp(c + (k - 1) * math.log(x) - x / scale)

    # the Q factor lives on a scale of order one while the Gamma tail may
    # stretch far beyond it, so integrate over geometrically growing pieces
    edges = {0.0, upper}
    edge = 1e-3
    while edge < upper:
        edges.add(edge)
        edge *= 10.0
    if 0 < abs(shift) < upper:
        edges.add(abs(shift))
    edges = sorted(edges)
    val = err = 0.0
    for a, b in zip(edges, edges[1:]):
        v, e = integrate.quad(integrand, a, b, epsabs=abs_tol / len(edges), epsrel=0.0, limit=500)
        val += v
        err += e
    if err > abs_tol:
        raise NonConvergenceError(f"PEP quadrature error estimate {err:.3g} above {abs_tol:.1g}", achieved=err)
    return float(min(max(val, 0.0), 1.0))


def gamma_normalization(inputs: PepInputs) -> float:
    """Quadrature of the density of ``Z`` alone; should be 1."""
    k, scale = inputs.n_r, 2.0 * inputs.sigma_z2
    upper = float(stats.gamma.isf(TAIL_MASS, a=k, scale=scale))
    c = _gamma_logpdf_const(k, scale)
    f = lambda x: math.exp(c + (k - 1) * math.log(x) - x / scale) if x > 0 else (math.exp(c) if k == 1 else 0.0)
    val, _ = integrate.quad(f, 0.0, upper, epsabs=1e-13, epsrel=1e-13, limit=500)
    return val


def pep_chernoff(inputs: PepInputs) -> float:
    """Chernoff-type upper bound; valid for nonnegative log-ratios."""
    if inputs.log_ratio < 0:
        raise DomainError("Chernoff bound requires a nonnegative prior log-ratio")
    return 0.5 * math.exp(-inputs.log_ratio / inputs.n0) * (inputs.sigma_z2 + 1.0) ** (-inputs.n_r)


@dataclass(frozen=True)
class SerEstimate:
    estimate: float
    union_bound: float


def symbol_error_estimate(alphabet: Alphabet | tuple[Sequence[BinarySymbol], Sequence[float]],
                          snr: float, n_t: int, n_r: int, use_bound: bool = False,
                          nt_norm: bool = True, es: float = 1.0) -> SerEstimate:
    """Prior-weighted pairwise average and plain union sum of PEPs.

    ``estimate`` weights ``i -> j`` by ``P(i) P(j) / (1 - P(i))``;
    ``union_bound`` by ``P(i)``.  With ``use_bound`` the Chernoff form
    replaces quadrature for pairs with ``L >= 0``; pairs with ``L < 0``
    fall outside its domain and keep the exact value.
    """
    if isinstance(alphabet, Alphabet):
        symbols, priors = alphabet.symbols, alphabet.priors
    else:
        symbols, priors = alphabet
    priors = [float(p) for p in priors]
    if len(symbols) < 2:
        raise ValueError("need at least two symbols")
    cache: dict[tuple[int, float], float] = {}

    def pep(d, L):
        key = (d, round(L, 12))
        if key not in cache:
            inp = PepInputs(d, L, snr, n_t, n_r, es=es, nt_norm=nt_norm)
            cache[key] = pep_chernoff(inp) if use_bound and L >= 0 else pep_exact(inp)
        return cache[key]

    est = union = 0.0
    for i, (si, pi) in enumerate(zip(symbols, priors)):
        if pi <= 0:
            continue
        row = 0.0
        cond = 0.0
        for j, (sj, pj) in enumerate(zip(symbols, priors)):
            if i == j or pj <= 0:
                continue
            p = pep(si.distance(sj), math.log(pi / pj))
            row += p
            cond += pj / (1.0 - pi) * p
        est += pi * cond
        union += pi * row
    return SerEstimate(est, union)
