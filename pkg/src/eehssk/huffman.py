"""Prefix-code bit mapping for nonuniform symbol priors.

The transmitter parses i.i.d. source bits with the code table, so a
symbol with a length-``k`` code is sent with probability ``2**-k``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

from .constellation import Alphabet, BinarySymbol
from .errors import DegenerateAlphabetError, UnknownSymbolError


@dataclass(frozen=True)
class CodebookEntry:
    symbol: Hashable
    code: str

    @property
    def probability(self) -> float:
        return 2.0 ** -len(self.code)


class PrefixCodebook:
    """Immutable symbol <-> bit-string table.

    ``entries`` keep the canonical symbol order used to build the code.
    """

    def __init__(self, entries: Iterable[CodebookEntry]):
        self._entries = tuple(entries)
        if len(self._entries) < 2:
            raise DegenerateAlphabetError("a codebook needs at least two symbols")
        self._by_code = {e.code: e for e in self._entries}
        self._by_symbol = {e.symbol: e for e in self._entries}
        if len(self._by_code) != len(self._entries) or len(self._by_symbol) != len(self._entries):
            raise ValueError("duplicate symbol or code string")
        if not self.is_prefix_free():
            raise ValueError("code strings are not prefix-free")
        self._index = {e.symbol: k for k, e in enumerate(self._entries)}

    @property
    def entries(self) -> tuple[CodebookEntry, ...]:
        return self._entries

    @property
    def symbols(self) -> list:
        return [e.symbol for e in self._entries]

    @property
    def codes(self) -> list[str]:
        return [e.code for e in self._entries]

    @property
    def lengths(self) -> list[int]:
        return [len(e.code) for e in self._entries]

    @property
    def max_len(self) -> int:
        return max(self.lengths)

    @property
    def min_len(self) -> int:
        return min(self.lengths)

    @property
    def probabilities(self) -> list[float]:
        return [e.probability for e in self._entries]

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def code_of(self, symbol) -> str:
        try:
            return self._by_symbol[symbol].code
        except KeyError:
            raise UnknownSymbolError(symbol) from None

    def index_of(self, symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbolError(symbol) from None

    def is_prefix_free(self) -> bool:
        ordered = sorted(self._by_code)
        return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(c)) for c in self._by_code), Fraction(0))

    def alphabet(self) -> Alphabet:
        """Alphabet carrying the achieved priors ``2**-len`` and this bit mapping."""
        return Alphabet(tuple(self.symbols), tuple(self.probabilities), tuple(self.codes))

    def decode_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Lookup over every ``max_len``-bit window: (entry index, code length)."""
        L = self.max_len
        idx = np.full(2**L, -1, dtype=np.int64)
        length = np.zeros(2**L, dtype=np.int64)
        for k, e in enumerate(self._entries):
            span = 2 ** (L - len(e.code))
            start = int(e.code, 2) * span if e.code else 0
            idx[start:start + span] = k
            length[start:start + span] = len(e.code)
        return idx, length

    def __repr__(self):
        return f"PrefixCodebook({len(self)} symbols, max_len={self.max_len})"


def huffman_lengths(priors: Sequence[float]) -> list[int]:
    """Huffman code lengths with a deterministic merge order.

    Smaller total probability merges first; among equal totals the node
    holding later symbols merges first, so later symbols end up no shorter.
    """
    if len(priors) < 2:
        raise DegenerateAlphabetError("Huffman coding needs at least two symbols")
    heap = [(float(p), -k, [k]) for k, p in enumerate(priors)]
    heapq.heapify(heap)
    lengths = [0] * len(priors)
    while len(heap) > 1:
        pa, ka, a = heapq.heappop(heap)
        pb, kb, b = heapq.heappop(heap)
        for k in a:
            lengths[k] += 1
        for k in b:
            lengths[k] += 1
        heapq.heappush(heap, (pa + pb, min(ka, kb), a + b))
    return lengths


def canonical_codes(lengths: Sequence[int]) -> list[str]:
    """Assign codes by (length, position), counting upward."""
    order = sorted(range(len(lengths)), key=lambda k: (lengths[k], k))
    codes = [""] * len(lengths)
    code, prev = 0, lengths[order[0]]
    for n, k in enumerate(order):
        if n:
            code = (code + 1) << (lengths[k] - prev)
        prev = lengths[k]
        codes[k] = format(code, f"0{lengths[k]}b")
    return codes


def build_codebook(symbols: Sequence[Hashable], priors: Sequence[float] | None = None) -> PrefixCodebook:
    """Huffman codebook over the positive-prior symbols, in the given order.

    ``symbols`` may also be an :class:`Alphabet`, whose priors are then used.
    """
    if isinstance(symbols, Alphabet):
        priors = symbols.priors if priors is None else priors
        symbols = symbols.symbols
    if priors is None or len(priors) != len(symbols):
        raise ValueError("one prior per symbol required")
    if any(p < 0 for p in priors):
        raise ValueError("priors must be nonnegative")
    kept = [(s, p) for s, p in zip(symbols, priors) if p > 0]
    if len(kept) < 2:
        raise DegenerateAlphabetError("need at least two symbols with positive prior")
    lengths = huffman_lengths([p for _, p in kept])
    codes = canonical_codes(lengths)
    return PrefixCodebook(CodebookEntry(s, c) for (s, _), c in zip(kept, codes))


def fixed_length_codebook(alphabet: Alphabet) -> PrefixCodebook:
    """Codebook from an alphabet's own bit mapping (e.g. GSSK/HSSK tables)."""
    if alphabet.bitmap is None:
        raise ValueError("alphabet carries no bit mapping")
    return PrefixCodebook(CodebookEntry(s, c) for s, c in zip(alphabet.symbols, alphabet.bitmap))


def achieved_stats(codebook: PrefixCodebook) -> tuple[float, float]:
    """(bits per symbol, average power) under i.i.d. equiprobable source bits."""
    rate = sum(2.0 ** -len(e.code) * len(e.code) for e in codebook)
    power = sum(2.0 ** -len(e.code) * _weight(e.symbol) for e in codebook)
    return rate, power


def _weight(symbol) -> float:
    if isinstance(symbol, BinarySymbol):
        return symbol.weight
    return float(np.sum(np.abs(np.asarray(symbol)) ** 2))


def _bit_string(bits) -> str:
    if isinstance(bits, str):
        return bits
    return "".join("1" if b else "0" for b in bits)


def bits_to_symbols(codebook: PrefixCodebook, bits) -> tuple[list, int]:
    """Greedy prefix parse; a trailing incomplete fragment is left unconsumed."""
    bits = _bit_string(bits)
    out = []
    pos = start = 0
    by_code = codebook._by_code
    L = codebook.max_len
    while pos < len(bits):
        pos += 1
        e = by_code.get(bits[start:pos])
        if e is not None:
            out.append(e.symbol)
            start = pos
        elif pos - start >= L:
            raise ValueError("bit stream not parseable by an incomplete code")
    return out, start


def symbols_to_bits(codebook: PrefixCodebook, symbols: Iterable) -> str:
    return "".join(codebook.code_of(s) for s in symbols)
