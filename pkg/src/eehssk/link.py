"""Flat Rayleigh MIMO link ``y = H sqrt(Es) x + v`` and MAP symbol detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constellation import Alphabet, BinarySymbol
from .errors import DimensionMismatchError

METRICS = ("derived", "eq5")
_CHUNK = 4096


@dataclass(frozen=True)
class LinkConfig:
    """Antenna counts, per-antenna transmit power ``es`` and noise level ``n0``.

    Noise is circularly symmetric with total per-entry variance ``n0 / 2``.
    """

    n_t: int
    n_r: int
    es: float = 1.0
    n0: float = 1.0
    sigma_h2: float = 1.0

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("antenna counts must be positive")
        if self.es <= 0 or self.n0 < 0 or self.sigma_h2 <= 0:
            raise ValueError("es and sigma_h2 must be positive, n0 nonnegative")

    @property
    def snr(self) -> float:
        return self.es / self.n0


def complex_normal(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Circular complex Gaussian samples with ``E|z|^2 = variance``."""
    s = np.sqrt(variance / 2.0)
    return s * rng.standard_normal(shape) + 1j * s * rng.standard_normal(shape)


def draw_channel(config: LinkConfig, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """One ``n_r x n_t`` channel, or a stack of ``size`` of them."""
    shape = (config.n_r, config.n_t) if size is None else (size, config.n_r, config.n_t)
    return complex_normal(rng, shape, config.sigma_h2)


def _vector(symbol, n_t: int) -> np.ndarray:
    x = symbol.as_array() if isinstance(symbol, BinarySymbol) else np.asarray(symbol)
    if x.shape != (n_t,):
        raise DimensionMismatchError(f"symbol of shape {x.shape} on a {n_t}-antenna link")
    return x


def transmit(config: LinkConfig, channel: np.ndarray, symbol, rng: np.random.Generator) -> np.ndarray:
    """Received vector for one channel use."""
    if channel.shape != (config.n_r, config.n_t):
        raise DimensionMismatchError(f"channel shape {channel.shape} != {(config.n_r, config.n_t)}")
    x = _vector(symbol, config.n_t)
    y = np.sqrt(config.es) * channel @ x
    if config.n0 > 0:
        y = y + complex_normal(rng, config.n_r, config.n0 / 2.0)
    return y


def map_metrics(channels: np.ndarray, received: np.ndarray, candidates: np.ndarray,
                log_priors: np.ndarray, es: float, n0: float, metric: str = "derived") -> np.ndarray:
    """Detection metric of every candidate for a stack of channel uses.

    ``channels`` is ``(n, n_r, n_t)``, ``received`` ``(n, n_r)`` and
    ``candidates`` ``(n_t, K)``.  ``derived`` weights the distance by
    ``2 / n0`` as the Gaussian likelihood requires; ``eq5`` drops it.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    n, n_r, n_t = channels.shape
    hc = (channels.reshape(n * n_r, n_t) @ candidates).reshape(n, n_r, -1)
    diff = received[:, :, None] - np.sqrt(es) * hc
    dist = (diff.real ** 2 + diff.imag ** 2).sum(axis=1)
    if metric == "derived":
        if n0 == 0:
            return dist
        dist = dist * (2.0 / n0)
    return dist - log_priors[None, :]


def detect_indices(channels: np.ndarray, received: np.ndarray, candidates: np.ndarray,
                   priors: Sequence[float], es: float, n0: float, metric: str = "derived") -> np.ndarray:
    """Index of the MAP candidate per channel use; ties go to the lowest index."""
    log_p = np.log(np.asarray(priors, dtype=float))
    out = np.empty(len(received), dtype=np.int64)
    for a in range(0, len(received), _CHUNK):
        b = a + _CHUNK
        out[a:b] = np.argmin(map_metrics(channels[a:b], received[a:b], candidates, log_p, es, n0, metric), axis=1)
    return out


def detect_map(config: LinkConfig, channel: np.ndarray, y: np.ndarray, alphabet: Alphabet,
               metric: str = "derived") -> BinarySymbol:
    """MAP estimate of the transmitted symbol from one received vector."""
    if any(p <= 0 for p in alphabet.priors):
        raise ValueError("MAP detection needs strictly positive priors")
    k = detect_indices(channel[None], np.asarray(y)[None], alphabet.matrix(), alphabet.priors,
                       config.es, config.n0, metric)[0]
    return alphabet.symbols[int(k)]


def detect_ml(config: LinkConfig, channel: np.ndarray, y: np.ndarray, symbols: Sequence[BinarySymbol]) -> BinarySymbol:
    """Minimum-distance detection, ignoring priors."""
    c = np.array([s.bits for s in symbols], dtype=float).T
    dist = np.linalg.norm(np.asarray(y)[:, None] - np.sqrt(config.es) * channel @ c, axis=0) ** 2
    return symbols[int(np.argmin(dist))]


def eb_from_es(es: float, avg_power: float, rate: float) -> float:
    """Energy per bit: ``Es * E[x^H x] / m``."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return es * avg_power / rate


def es_from_eb(eb: float, avg_power: float, rate: float) -> float:
    if avg_power <= 0:
        raise ValueError("avg_power must be positive")
    return eb * rate / avg_power


def n0_for_ebn0_db(ebn0_db: float, avg_power: float, rate: float, es: float = 1.0) -> float:
    """Noise level giving the requested ``Eb/N0`` at fixed ``es``."""
    return eb_from_es(es, avg_power, rate) / 10.0 ** (ebn0_db / 10.0)
