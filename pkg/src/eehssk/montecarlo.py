"""Seeded frame-level link simulation and power-versus-rate sweeps.

Every batch of frames draws from its own stream keyed by
``(seed, grid index, batch index)``, so results do not depend on how many
workers run batches or in which order they finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .constellation import (Alphabet, BinarySymbol, alphabet_from_priors, build_code_dmin, build_gssk,
                            build_hssk, build_ssk)
from .design import DesignProblem, min_power_at_rate, optimum_locus, solve
from .errors import RateInfeasibleError
from .framing import ARQ_MODES, DEFAULT_FRAME_BITS, FramePlan
from .huffman import PrefixCodebook, achieved_stats, build_codebook, fixed_length_codebook, CodebookEntry
from .link import complex_normal, detect_indices, n0_for_ebn0_db
from .qam import multi_antenna_qam

SCHEMES = ("ssk", "gssk", "hssk", "ee-hssk", "qam-baseline")
FADING = ("per-symbol", "per-frame")
Z95 = 1.959963984540054


@dataclass(frozen=True)
class Scheme:
    """A ready-to-transmit symbol set: codebook plus on-air vectors."""

    name: str
    n_t: int
    codebook: PrefixCodebook
    candidates: np.ndarray = field(repr=False)
    rate: float
    avg_power: float

    @property
    def priors(self) -> np.ndarray:
        return np.array(self.codebook.probabilities)

    @property
    def alphabet(self) -> Alphabet | None:
        if isinstance(self.codebook.symbols[0], BinarySymbol):
            return self.codebook.alphabet()
        return None


def _binary_scheme(name: str, n_t: int, codebook: PrefixCodebook) -> Scheme:
    cand = np.array([s.bits for s in codebook.symbols], dtype=float).T
    rate, power = achieved_stats(codebook)
    return Scheme(name, n_t, codebook, cand.astype(complex), rate, power)


def build_scheme(name: str, n_t: int, rate: float, d_min: int = 2, max_rf: int | None = None) -> Scheme:
    """Construct one of ``SCHEMES`` at the requested rate."""
    if name not in SCHEMES:
        raise ValueError(f"unknown scheme {name!r}; choose from {SCHEMES}")
    if name == "ee-hssk":
        code = build_code_dmin(n_t, d_min)
        sol = solve(DesignProblem.from_code(code, max_rf or n_t, rate))
        book = build_codebook(alphabet_from_priors(code, sol.priors))
        return _binary_scheme(name, n_t, book)
    if name == "qam-baseline":
        if rate != int(rate):
            raise RateInfeasibleError("QAM baseline needs an integer rate")
        cand, labels = multi_antenna_qam(int(rate), n_t)
        book = PrefixCodebook(CodebookEntry(k, lab) for k, lab in enumerate(labels))
        power = float(np.mean(np.sum(np.abs(cand) ** 2, axis=0)))
        return Scheme(name, n_t, book, cand, float(rate), power)
    if rate != int(rate):
        raise RateInfeasibleError(f"{name} needs an integer rate")
    m = int(rate)
    builders = {"ssk": lambda: build_ssk(n_t, m), "gssk": lambda: build_gssk(n_t, m),
                "hssk": lambda: build_hssk(n_t, m, d_min)}
    return _binary_scheme(name, n_t, fixed_length_codebook(builders[name]()))


@dataclass(frozen=True)
class SimSpec:
    scheme: str
    n_t: int
    n_r: int
    rate: float
    ebn0_grid: tuple[float, ...]
    d_min: int = 2
    max_rf: int | None = None
    frame_bits: int = DEFAULT_FRAME_BITS
    min_frame_errors: int = 300
    max_frames: int = 200_000
    seed: int = 0
    arq: str = "off"
    fading: str = "per-symbol"
    metric: str = "derived"
    batch_frames: int = 500
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ebn0_grid", tuple(float(x) for x in self.ebn0_grid))
        if not self.ebn0_grid:
            raise ValueError("Eb/N0 grid is empty")
        if self.min_frame_errors < 1 or self.max_frames < 1 or self.batch_frames < 1:
            raise ValueError("stop rule and batch size must be positive")
        if self.arq not in ARQ_MODES:
            raise ValueError(f"arq must be one of {ARQ_MODES}")
        if self.fading not in FADING:
            raise ValueError(f"fading must be one of {FADING}")

    def build(self) -> Scheme:
        return build_scheme(self.scheme, self.n_t, self.rate, self.d_min, self.max_rf)


def half_width(errors: int, trials: int) -> float:
    """95% normal-approximation half-width of a binomial proportion."""
    if trials == 0:
        return float("nan")
    p = errors / trials
    return Z95 * math.sqrt(p * (1 - p) / trials)


@dataclass
class SimPoint:
    ebn0_db: float
    symbols: int = 0
    symbol_errors: int = 0
    frames: int = 0
    frame_errors: int = 0
    frame_errors_no_arq: int = 0
    ed_flags: int = 0
    bit_errors: int = 0
    reliable: bool = True

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols if self.symbols else float("nan")

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def fer_no_arq(self) -> float:
        return self.frame_errors_no_arq / self.frames if self.frames else float("nan")

    @property
    def ser_ci(self) -> float:
        return half_width(self.symbol_errors, self.symbols)

    @property
    def fer_ci(self) -> float:
        return half_width(self.frame_errors, self.frames)

    def add(self, other: "SimPoint") -> None:
        for name in ("symbols", "symbol_errors", "frames", "frame_errors", "frame_errors_no_arq",
                     "ed_flags", "bit_errors"):
            setattr(self, name, getattr(self, name) + getattr(other, name))


@dataclass
class SimResult:
    spec: SimSpec
    rate: float
    avg_power: float
    points: list[SimPoint]

    @property
    def reliable(self) -> bool:
        return all(p.reliable for p in self.points)

    def csv_rows(self) -> list[str]:
        rows = ["ebn0_db,ser,ser_ci,fer,fer_ci,symbols,frames"]
        for p in self.points:
            rows.append(f"{p.ebn0_db:g},{p.ser:.6e},{p.ser_ci:.3e},{p.fer:.6e},{p.fer_ci:.3e},{p.symbols},{p.frames}")
        return rows

    def to_dict(self) -> dict:
        return {"spec": asdict(self.spec), "rate": self.rate, "avg_power": self.avg_power,
                "points": [dict(asdict(p), ser=p.ser, fer=p.fer, ser_ci=p.ser_ci, fer_ci=p.fer_ci)
                           for p in self.points]}


class _Framer:
    """Vectorised frame parsing for one codebook."""

    def __init__(self, codebook: PrefixCodebook, frame_bits: int):
        self.F = frame_bits
        self.L = codebook.max_len
        self.lmin = codebook.min_len
        self.table_idx, self.table_len = codebook.decode_table()
        self.codes = codebook.codes
        self.lengths = np.array(codebook.lengths)
        self.weights = 1 << np.arange(self.L - 1, -1, -1)

    def parse(self, bits: np.ndarray) -> np.ndarray:
        """``bits`` is ``(B + 1, F)``; row ``b + 1`` supplies borrowed bits for row ``b``.

        Returns ``(B, S)`` codebook indices, ``-1`` past each frame's end.
        """
        B = bits.shape[0] - 1
        ext = np.concatenate([bits[:B], bits[1:, : self.L]], axis=1)
        win = np.lib.stride_tricks.sliding_window_view(ext, self.L, axis=1)[:, : self.F] @ self.weights
        pos = np.zeros(B, dtype=np.int64)
        rows = np.arange(B)
        steps = []
        while True:
            active = pos < self.F
            if not active.any():
                break
            w = win[rows, np.minimum(pos, self.F - 1)]
            k = self.table_idx[w]
            steps.append(np.where(active, k, -1))
            pos += np.where(active, self.table_len[w], 0)
        return np.stack(steps, axis=1)


def _channel_uses(scheme: Scheme, n_r: int, sent: np.ndarray, frame_of: np.ndarray, n_frames: int,
                  n0: float, fading: str, metric: str, rng: np.random.Generator) -> np.ndarray:
    n = len(sent)
    if fading == "per-symbol":
        H = complex_normal(rng, (n, n_r, scheme.n_t), 1.0)
    else:
        H = complex_normal(rng, (n_frames, n_r, scheme.n_t), 1.0)[frame_of]
    x = scheme.candidates[:, sent].T
    y = np.einsum("nrt,nt->nr", H, x) + complex_normal(rng, (n, n_r), n0 / 2.0)
    return detect_indices(H, y, scheme.candidates, scheme.priors, 1.0, n0, metric)


def _frame_verdict(framer: _Framer, truth: np.ndarray, detected: Sequence[int]) -> tuple[bool, int, bool]:
    """(ed flag, bit errors, frame error) for one frame."""
    bits = "".join(framer.codes[k] for k in detected)
    F = framer.F
    n = len(bits)
    ed = n < F or n > F + framer.L - 1
    payload = np.frombuffer(bits[:F].encode(), dtype=np.uint8) - 48
    errors = int(np.count_nonzero(payload != truth[: len(payload)])) + (F - len(payload))
    return ed, errors, errors > 0


def _simulate_batch(scheme: Scheme, framer: _Framer, spec: SimSpec, n0: float, n_frames: int,
                    rng: np.random.Generator) -> SimPoint:
    bits = rng.integers(0, 2, size=(n_frames + 1, framer.F), dtype=np.int64)
    syms = framer.parse(bits)
    mask = syms >= 0
    sent = syms[mask]
    frame_of = np.nonzero(mask)[0]
    det = _channel_uses(scheme, spec.n_r, sent, frame_of, n_frames, n0, spec.fading, spec.metric, rng)
    wrong = det != sent
    out = SimPoint(0.0, symbols=len(sent), symbol_errors=int(wrong.sum()), frames=n_frames)
    bad_frames = np.unique(frame_of[wrong])
    if not len(bad_frames):
        return out
    starts = np.concatenate([[0], np.cumsum(mask.sum(axis=1))])
    flagged = []
    for f in bad_frames:
        ed, errs, ferr = _frame_verdict(framer, bits[f], det[starts[f]:starts[f + 1]])
        out.bit_errors += errs
        out.frame_errors_no_arq += ferr
        out.ed_flags += ed
        if ed:
            flagged.append(f)
        elif ferr:
            out.frame_errors += 1
    if spec.arq == "off":
        out.frame_errors += len(flagged)
    elif spec.arq == "real" and flagged:
        sel = np.isin(frame_of, flagged)
        det2 = _channel_uses(scheme, spec.n_r, sent[sel], frame_of[sel], n_frames, n0, spec.fading,
                             spec.metric, rng)
        starts2 = np.concatenate([[0], np.cumsum(mask[flagged].sum(axis=1))])
        for j, f in enumerate(flagged):
            _, _, ferr = _frame_verdict(framer, bits[f], det2[starts2[j]:starts2[j + 1]])
            out.frame_errors += ferr
    return out


def batch_rng(seed: int, point: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(point, batch))))


def run_link_sim(spec: SimSpec, progress=None) -> SimResult:
    """SER/FER over the Eb/N0 grid, stopping per point on frame errors or a frame budget."""
    scheme = spec.build()
    plan = FramePlan(scheme.codebook, spec.frame_bits)
    framer = _Framer(plan.codebook, plan.frame_bits)
    points = []
    pool = ThreadPoolExecutor(spec.workers) if spec.workers > 1 else None
    try:
        for gi, ebn0 in enumerate(spec.ebn0_grid):
            n0 = n0_for_ebn0_db(ebn0, scheme.avg_power, scheme.rate)
            total = SimPoint(ebn0)
            batch = 0
            done = False
            while not done:
                sizes = []
                for k in range(max(1, spec.workers)):
                    start = (batch + k) * spec.batch_frames
                    if start >= spec.max_frames:
                        break
                    sizes.append((batch + k, min(spec.batch_frames, spec.max_frames - start)))
                if not sizes:
                    break
                work = lambda bs: _simulate_batch(scheme, framer, spec, n0, bs[1], batch_rng(spec.seed, gi, bs[0]))
                results = list(pool.map(work, sizes)) if pool else [work(bs) for bs in sizes]
                for r in results:
                    total.add(r)
                    batch += 1
                    if total.frame_errors_no_arq >= spec.min_frame_errors:
                        done = True
                        break
            total.reliable = total.frame_errors_no_arq >= spec.min_frame_errors
            points.append(total)
            if progress:
                progress(total)
    finally:
        if pool:
            pool.shutdown()
    return SimResult(spec, scheme.rate, scheme.avg_power, points)


def qam_baseline(spec: SimSpec, progress=None) -> SimResult:
    """Gray-mapped QAM over the same channel model with ML detection."""
    return run_link_sim(replace(spec, scheme="qam-baseline"), progress)


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    target_rate: float
    rate_bits: float
    avg_power: float
    theoretical_power: float


def lower_hull(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Lower convex envelope of (rate, power) points, i.e. what time-sharing achieves."""
    pts = sorted(set(points))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    # only the nondecreasing branch matters: below the lightest point power cannot drop
    k = min(range(len(hull)), key=lambda j: (hull[j][1], -hull[j][0]))
    return hull[k:]


def hull_power_at(hull: Sequence[tuple[float, float]], rate: float) -> float:
    """Power needed for ``rate`` on a time-sharing envelope (NaN past its end)."""
    xs = [p[0] for p in hull]
    if rate <= xs[0]:
        return hull[0][1]
    if rate > xs[-1] + 1e-12:
        return float("nan")
    return float(np.interp(rate, xs, [p[1] for p in hull]))


def ee_hssk_envelope(n_t: int, d_min: int = 2, max_rf: int | None = None,
                     step: float = 0.05) -> list[tuple[float, float]]:
    """Time-sharing envelope of EE-HSSK designs over a fine grid of target rates.

    Huffman mapping lands each design at an achieved rate slightly off its
    target, so schemes are compared at a common rate through this envelope.
    """
    problem = DesignProblem.from_code(build_code_dmin(n_t, d_min), max_rf or n_t, 0.0)
    targets = list(np.arange(problem.floor_rate, problem.capacity, step)) + [problem.capacity]
    points = []
    for r in targets:
        sch = build_scheme("ee-hssk", n_t, float(r), d_min, max_rf)
        points.append((sch.rate, sch.avg_power))
    return lower_hull(points)


def _scheme_label(name: str, n_t: int, d_min: int, max_rf: int | None) -> str:
    label = name
    if name == "ee-hssk":
        label += f"-M{max_rf or n_t}"
    if name in ("hssk", "ee-hssk") and d_min != 2:
        label += f"-d{d_min}"
    return label


def run_power_rate_sweep(n_t: int, rates: Sequence[float], d_min: int = 2,
                         max_rfs: Sequence[int] | None = None,
                         schemes: Sequence[str] = ("gssk", "hssk", "ee-hssk"),
                         locus_points: int = 200) -> tuple[list[SweepRow], list[str]]:
    """Achieved (rate, power) of each scheme plus the optimum locus.

    ``theoretical_power`` is the optimum at the scheme's achieved rate for
    the class structure the scheme draws from.  Infeasible rates are
    skipped and reported in the returned notes.
    """
    max_rfs = list(max_rfs) if max_rfs else [n_t]
    code = build_code_dmin(n_t, d_min)
    rows, notes = [], []
    for name in schemes:
        variants = max_rfs if name == "ee-hssk" else [None]
        for M in variants:
            problem = DesignProblem.from_code(code, M or n_t, 0.0)
            label = _scheme_label(name, n_t, d_min, M)
            for r in rates:
                try:
                    sch = build_scheme(name, n_t, r, d_min, M)
                except RateInfeasibleError as exc:
                    notes.append(f"{label} rate {r:g}: {exc}")
                    continue
                theo = min_power_at_rate(problem, sch.rate)
                rows.append(SweepRow(label, float(r), sch.rate, sch.avg_power, theo))
    for M in max_rfs:
        problem = DesignProblem.from_code(code, M, 0.0)
        betas = [0.0] + list(np.geomspace(1e-4, 1.0, locus_points - 1))
        for rate, power in optimum_locus(problem, betas):
            rows.append(SweepRow(f"optimum-M{M}", float("nan"), rate, power, power))
    return rows, notes


def sweep_csv(rows: Sequence[SweepRow]) -> list[str]:
    out = ["scheme,rate_bits,avg_power,theoretical_power"]
    out += [f"{r.scheme},{r.rate_bits:.6f},{r.avg_power:.6f},{r.theoretical_power:.6f}" for r in rows]
    return out


def crossing_db(ebn0: Sequence[float], values: Sequence[float], target: float) -> float:
    """Eb/N0 where a decreasing error curve first reaches ``target``.

    Log-linear interpolation between grid points; NaN if never crossed.
    """
    x = np.asarray(ebn0, dtype=float)
    y = np.asarray(values, dtype=float)
    for k in range(len(x) - 1):
        a, b = y[k], y[k + 1]
        if a >= target >= b and a > 0:
            if b <= 0:
                return float(x[k + 1])
            la, lb, lt = math.log10(a), math.log10(b), math.log10(target)
            return float(x[k] + (x[k + 1] - x[k]) * (la - lt) / (la - lb)) if la != lb else float(x[k])
    return float("nan")
