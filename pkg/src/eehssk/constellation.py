"""SSK-family symbol sets: weight classes, GSSK/HSSK alphabets and codes.

Symbols are activation patterns over ``n_t`` transmit antennas written
left to right, e.g. ``00011`` activates the two right-most antennas.
Within a weight class the canonical order lists supports in lexicographic
order of their positions counted from the right, so the weight-2 class
over five antennas starts ``00011, 00101, 01001, 10001, 00110``.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, log2
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateAlphabetError, InvalidCodeError, RateInfeasibleError

PRIOR_TOL = 1e-12


@dataclass(frozen=True, order=True)
class BinarySymbol:
    """Antenna activation pattern; ``weight`` is the number of active antennas."""

    bits: tuple[int, ...]
    weight: int = field(init=False, compare=False)

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"symbol entries must be 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "weight", sum(bits))

    @classmethod
    def from_string(cls, s: str) -> "BinarySymbol":
        s = s.strip().strip("[]").replace(",", "").replace(" ", "")
        if not s:
            raise ValueError("empty symbol string")
        return cls(tuple(int(c) for c in s))

    @classmethod
    def from_support(cls, n_t: int, support: Iterable[int]) -> "BinarySymbol":
        """Build from antenna positions counted from the right (0 = last entry)."""
        bits = [0] * n_t
        for k in support:
            bits[n_t - 1 - k] = 1
        return cls(tuple(bits))

    @property
    def n_t(self) -> int:
        return len(self.bits)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=float)

    def distance(self, other: "BinarySymbol") -> int:
        if len(other.bits) != len(self.bits):
            raise ValueError("symbols of different length")
        return sum(a != b for a, b in zip(self.bits, other.bits))

    def __str__(self):
        return "".join(map(str, self.bits))


def enumerate_weight_class(n_t: int, i: int) -> list[BinarySymbol]:
    """All ``C(n_t, i)`` symbols of weight ``i`` in canonical order."""
    if not 0 <= i <= n_t:
        raise ValueError(f"weight {i} outside 0..{n_t}")
    return [BinarySymbol.from_support(n_t, c) for c in itertools.combinations(range(n_t), i)]


def _as_matrix(symbols: Sequence[BinarySymbol]) -> np.ndarray:
    return np.array([s.bits for s in symbols], dtype=np.int8)


def pairwise_distances(symbols: Sequence[BinarySymbol]) -> np.ndarray:
    b = _as_matrix(symbols)
    return (b[:, None, :] != b[None, :, :]).sum(axis=-1)


def _min_distance(symbols: Sequence[BinarySymbol]) -> int:
    if len(symbols) < 2:
        raise DegenerateAlphabetError("minimum distance needs at least two symbols")
    d = pairwise_distances(symbols)
    np.fill_diagonal(d, np.iinfo(d.dtype).max)
    return int(d.min())


@dataclass(frozen=True)
class CodePartition:
    """A binary code split into weight classes ``{i: C_i}``.

    The all-zero word never appears; it is reserved as the idle symbol.
    """

    n_t: int
    classes: Mapping[int, tuple[BinarySymbol, ...]]

    def __post_init__(self):
        clean = {}
        for i in sorted(self.classes):
            members = tuple(self.classes[i])
            if not members:
                continue
            if i == 0:
                raise InvalidCodeError("the all-zero word is reserved and cannot be a codeword")
            if any(s.weight != i or s.n_t != self.n_t for s in members):
                raise InvalidCodeError(f"class {i} holds a word of the wrong weight or length")
            if len(set(members)) != len(members):
                raise InvalidCodeError(f"class {i} contains duplicates")
            clean[i] = members
        object.__setattr__(self, "classes", clean)

    @property
    def class_sizes(self) -> dict[int, int]:
        return {i: len(c) for i, c in self.classes.items()}

    @property
    def max_weight(self) -> int:
        return max(self.classes)

    @property
    def symbols(self) -> list[BinarySymbol]:
        """Codewords in ascending weight, canonical order inside each class."""
        return [s for i in sorted(self.classes) for s in self.classes[i]]

    def restrict(self, max_rf: int) -> "CodePartition":
        """Keep only classes needing at most ``max_rf`` RF chains."""
        return CodePartition(self.n_t, {i: c for i, c in self.classes.items() if i <= max_rf})

    def __len__(self):
        return sum(len(c) for c in self.classes.values())


@dataclass(frozen=True)
class Alphabet:
    """Ordered modulation alphabet with priors and an optional bit mapping."""

    symbols: tuple[BinarySymbol, ...]
    priors: tuple[float, ...]
    bitmap: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "priors", tuple(float(p) for p in self.priors))
        if len(self.symbols) != len(self.priors):
            raise ValueError("one prior per symbol required")
        if not self.symbols:
            raise DegenerateAlphabetError("empty alphabet")
        n_t = self.symbols[0].n_t
        if any(s.n_t != n_t for s in self.symbols):
            raise ValueError("symbols of mixed length")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if any(p < 0 for p in self.priors) or abs(sum(self.priors) - 1.0) > PRIOR_TOL:
            raise ValueError(f"priors must be nonnegative and sum to 1, got sum {sum(self.priors)!r}")
        if self.bitmap is not None:
            bitmap = tuple(self.bitmap)
            if len(bitmap) != len(self.symbols):
                raise ValueError("one bit string per symbol required")
            if not _is_prefix_free(bitmap):
                raise ValueError("bit mapping is not prefix-free")
            object.__setattr__(self, "bitmap", bitmap)

    @property
    def n_t(self) -> int:
        return self.symbols[0].n_t

    @cached_property
    def d_min(self) -> int:
        return _min_distance(self.symbols)

    @property
    def avg_power(self) -> float:
        return float(sum(p * s.weight for s, p in zip(self.symbols, self.priors)))

    @property
    def entropy(self) -> float:
        return float(-sum(p * log2(p) for p in self.priors if p > 0))

    def matrix(self) -> np.ndarray:
        """``n_t x K`` real matrix whose columns are the symbols."""
        return _as_matrix(self.symbols).T.astype(float)

    def __len__(self):
        return len(self.symbols)

    def to_table(self) -> str:
        out = io.StringIO()
        out.write("bits_string,weight,prior,codeword\n")
        for k, (s, p) in enumerate(zip(self.symbols, self.priors)):
            code = self.bitmap[k] if self.bitmap is not None else "-"
            out.write(f"{s},{s.weight},{p!r},{code}\n")
        return out.getvalue()

    @classmethod
    def from_table(cls, text: str) -> "Alphabet":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if lines[0].replace(" ", "") != "bits_string,weight,prior,codeword":
            raise ValueError("unrecognized alphabet table header")
        symbols, priors, codes = [], [], []
        for ln in lines[1:]:
            bits, weight, prior, code = (f.strip() for f in ln.split(","))
            s = BinarySymbol.from_string(bits)
            if s.weight != int(weight):
                raise ValueError(f"row {ln!r}: weight column disagrees with bits")
            symbols.append(s)
            priors.append(float(prior))
            codes.append(code)
        bitmap = None if all(c == "-" for c in codes) else tuple(codes)
        return cls(tuple(symbols), tuple(priors), bitmap)


def _is_prefix_free(codes: Sequence[str]) -> bool:
    ordered = sorted(codes)
    return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))


def min_distance(obj: Alphabet | CodePartition | Sequence[BinarySymbol]) -> int:
    """Exhaustive minimum pairwise Hamming distance."""
    if isinstance(obj, Alphabet):
        return obj.d_min
    if isinstance(obj, CodePartition):
        return _min_distance(obj.symbols)
    return _min_distance(list(obj))


def _natural_bitmap(m: int) -> tuple[str, ...]:
    return tuple(format(k, f"0{m}b") for k in range(2**m)) if m > 0 else ("",)


def _equiprobable(symbols: Sequence[BinarySymbol], m: int) -> Alphabet:
    return Alphabet(tuple(symbols), (2.0**-m,) * len(symbols), _natural_bitmap(m))


def choose_gssk_nt(n_t: int, m: int) -> int:
    """Smallest active-antenna count whose weight class holds ``2**m`` symbols."""
    if m < 1:
        raise RateInfeasibleError("GSSK needs at least one bit per symbol")
    for n in range(1, n_t // 2 + 1):
        if 2**m <= comb(n_t, n):
            return n
    raise RateInfeasibleError(
        f"{m} bits exceed GSSK capacity C({n_t},{n_t // 2}) = {comb(n_t, n_t // 2)}")


def build_gssk(n_t: int, m: int) -> Alphabet:
    """Lexicographic GSSK alphabet with fixed-length natural binary mapping."""
    n = choose_gssk_nt(n_t, m)
    return _equiprobable(enumerate_weight_class(n_t, n)[: 2**m], m)


def build_ssk(n_t: int, m: int) -> Alphabet:
    if m < 1 or 2**m > n_t:
        raise RateInfeasibleError(f"SSK with {n_t} antennas carries at most floor(log2 {n_t}) bits")
    return _equiprobable(enumerate_weight_class(n_t, 1)[: 2**m], m)


def odd_weight_partition(n_t: int) -> CodePartition:
    """The (n_t, n_t - 1) parity-check code shifted to odd weights (d = 2)."""
    return CodePartition(n_t, {i: tuple(enumerate_weight_class(n_t, i)) for i in range(1, n_t + 1, 2)})


def lexicode(n_t: int, d_min: int) -> CodePartition:
    """Greedy code over nonzero words scanned by weight, then canonical order."""
    kept: list[BinarySymbol] = []
    kept_bits = np.zeros((0, n_t), dtype=np.int8)
    for i in range(1, n_t + 1):
        for s in enumerate_weight_class(n_t, i):
            row = np.array(s.bits, dtype=np.int8)
            if kept_bits.shape[0] == 0 or (kept_bits != row).sum(axis=1).min() >= d_min:
                kept.append(s)
                kept_bits = np.vstack([kept_bits, row])
    return _partition_from_words(n_t, kept)


def _partition_from_words(n_t: int, words: Iterable[BinarySymbol]) -> CodePartition:
    classes: dict[int, list[BinarySymbol]] = {}
    for s in words:
        classes.setdefault(s.weight, []).append(s)
    order = {i: {s: k for k, s in enumerate(enumerate_weight_class(n_t, i))} for i in classes}
    return CodePartition(n_t, {i: tuple(sorted(c, key=order[i].__getitem__)) for i, c in classes.items()})


def build_code_dmin(n_t: int, d_min: int, generator: Iterable | None = None) -> CodePartition:
    """Weight-partitioned code with minimum distance at least ``d_min``.

    ``generator`` may list external codewords (strings or BinarySymbols);
    the all-zero word is dropped from it.
    """
    if d_min < 2:
        raise ValueError("d_min must be at least 2")
    if generator is not None:
        words = [w if isinstance(w, BinarySymbol) else BinarySymbol.from_string(str(w)) for w in generator]
        if any(w.n_t != n_t for w in words):
            raise InvalidCodeError(f"external codewords must have length {n_t}")
        words = [w for w in words if w.weight > 0]
        if len(set(words)) != len(words):
            raise InvalidCodeError("external code has repeated words")
        if len(words) >= 2 and _min_distance(words) < d_min:
            raise InvalidCodeError(f"external code has distance below {d_min}")
        code = _partition_from_words(n_t, words)
    elif d_min == 2:
        code = odd_weight_partition(n_t)
    else:
        code = lexicode(n_t, d_min)
    if len(code) >= 2:
        assert _min_distance(code.symbols) >= d_min
    return code


def build_hssk(n_t: int, m: int, d_min: int = 2, generator: Iterable | None = None) -> Alphabet:
    """Equiprobable HSSK alphabet of ``2**m`` codewords, lightest classes first."""
    code = build_code_dmin(n_t, d_min, generator)
    if 2**m > len(code):
        raise RateInfeasibleError(f"{m} bits exceed the {len(code)} codewords available at d_min={d_min}")
    return _equiprobable(code.symbols[: 2**m], m)


def build_hssk_dmin2(n_t: int, m: int) -> Alphabet:
    return build_hssk(n_t, m, d_min=2)


def alphabet_from_priors(code: CodePartition, class_priors: Mapping[int, float]) -> Alphabet:
    """Alphabet of every codeword whose class prior is positive."""
    symbols, priors = [], []
    for i, members in code.classes.items():
        p = class_priors.get(i, 0.0)
        if p > 0:
            symbols.extend(members)
            priors.extend([p] * len(members))
    total = sum(priors)
    return Alphabet(tuple(symbols), tuple(p / total for p in priors))
