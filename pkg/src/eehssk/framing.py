"""Frame-based transmission with residual-bit borrowing and length-based error detection.

Each frame of ``F`` source bits is parsed into symbols.  If the frame ends
inside a codeword, the leading bits of the next frame complete it and the
receiver drops whatever it recovers beyond ``F`` bits.  A correct frame
therefore always decodes to between ``F`` and ``F + L_max - 1`` bits;
anything outside that window is flagged.  Frames are separated on the air
by the all-zero idle symbol, which no codebook contains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .constellation import BinarySymbol
from .huffman import PrefixCodebook, _bit_string, bits_to_symbols, symbols_to_bits

ARQ_MODES = ("off", "paper", "real")
DEFAULT_FRAME_BITS = 100


@dataclass(frozen=True)
class FramePlan:
    codebook: PrefixCodebook
    frame_bits: int = DEFAULT_FRAME_BITS

    def __post_init__(self):
        if self.frame_bits < self.codebook.max_len:
            raise ValueError(f"frame of {self.frame_bits} bits shorter than the longest codeword "
                             f"({self.codebook.max_len})")

    @property
    def max_len(self) -> int:
        return self.codebook.max_len

    @property
    def idle(self):
        first = self.codebook.symbols[0]
        if isinstance(first, BinarySymbol):
            return BinarySymbol((0,) * first.n_t)
        return None

    def ed_window(self) -> tuple[int, int]:
        """Inclusive range of recovered lengths accepted as plausible."""
        return self.frame_bits, self.frame_bits + self.max_len - 1


@dataclass(frozen=True)
class FrameVerdict:
    recovered_bits: int
    ed_flag: bool
    bit_errors: int
    frame_error: bool
    payload: str = ""
    retransmitted: bool = False


def frame_to_symbols(plan: FramePlan, frame, next_frame=None) -> tuple[list, int]:
    """Symbols for one frame and the number of bits borrowed from ``next_frame``.

    Past the end of the stream (``next_frame`` missing or too short) the
    final codeword is completed with zero bits instead.
    """
    frame = _bit_string(frame)
    if len(frame) != plan.frame_bits:
        raise ValueError(f"frame has {len(frame)} bits, plan expects {plan.frame_bits}")
    symbols, used = bits_to_symbols(plan.codebook, frame)
    if used == len(frame):
        return symbols, 0
    fragment = frame[used:]
    extra = _bit_string(next_frame) if next_frame is not None else ""
    by_code = plan.codebook._by_code
    for k in range(1, plan.max_len + 1):
        tail = (extra[:k] + "0" * k)[:k]
        e = by_code.get(fragment + tail)
        if e is not None:
            symbols.append(e.symbol)
            return symbols, k
    raise AssertionError("complete prefix code always finishes a fragment")  # pragma: no cover


def symbols_to_frame(plan: FramePlan, detected: Sequence, truth=None) -> FrameVerdict:
    """Re-encode detected symbols, keep the first ``F`` bits, and check them."""
    bits = symbols_to_bits(plan.codebook, detected)
    lo, hi = plan.ed_window()
    n = len(bits)
    payload = bits[: plan.frame_bits]
    ed = n < lo or n > hi
    if truth is None:
        return FrameVerdict(n, ed, 0, ed, payload)
    truth = _bit_string(truth)
    errors = sum(a != b for a, b in zip(payload, truth)) + (plan.frame_bits - len(payload))
    return FrameVerdict(n, ed, errors, errors > 0, payload)


Link = Callable[[Sequence, np.random.Generator], list]


def run_arq(plan: FramePlan, link: Link, frame, next_frame=None, mode: str = "off",
            rng: np.random.Generator | None = None) -> FrameVerdict:
    """Send one frame; on a flagged frame apply the chosen retransmission policy.

    ``paper`` counts a flagged frame as delivered (ideal retransmission);
    ``real`` resends it once over fresh channel draws and keeps that result.
    """
    if mode not in ARQ_MODES:
        raise ValueError(f"ARQ mode must be one of {ARQ_MODES}")
    rng = np.random.default_rng() if rng is None else rng
    symbols, _ = frame_to_symbols(plan, frame, next_frame)
    verdict = symbols_to_frame(plan, link(symbols, rng), frame)
    if mode == "off" or not verdict.ed_flag:
        return verdict
    if mode == "paper":
        return FrameVerdict(verdict.recovered_bits, True, 0, False, _bit_string(frame), retransmitted=True)
    again = symbols_to_frame(plan, link(symbols, rng), frame)
    return FrameVerdict(again.recovered_bits, again.ed_flag, again.bit_errors, again.frame_error,
                        again.payload, retransmitted=True)


def stream_to_symbols(plan: FramePlan, bits) -> list:
    """Whole stream to an on-air sequence: frames separated by one idle symbol.

    The last partial frame is zero-padded to ``F`` bits.
    """
    bits = _bit_string(bits)
    F = plan.frame_bits
    n_frames = max(1, -(-len(bits) // F))
    padded = bits.ljust(n_frames * F, "0")
    out = []
    for k in range(n_frames):
        frame = padded[k * F:(k + 1) * F]
        nxt = padded[(k + 1) * F:(k + 2) * F] or None
        symbols, _ = frame_to_symbols(plan, frame, nxt)
        if k:
            out.append(plan.idle)
        out.extend(symbols)
    return out


def symbols_to_stream(plan: FramePlan, sequence: Sequence, n_bits: int | None = None) -> str:
    """Inverse of :func:`stream_to_symbols` for a genie-synchronised receiver."""
    idle = plan.idle
    frames, current = [], []
    for s in sequence:
        if s == idle:
            frames.append(current)
            current = []
        else:
            current.append(s)
    frames.append(current)
    bits = "".join(symbols_to_frame(plan, f).payload for f in frames)
    return bits if n_bits is None else bits[:n_bits]
