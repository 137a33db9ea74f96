"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line summary; ``conftest.py`` prints PASS/FAIL
lines for all criteria at the end of the run.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from eehssk.analysis import PepInputs, pep_chernoff, pep_exact
from eehssk.constellation import alphabet_from_priors, build_code_dmin, build_gssk, build_hssk_dmin2, choose_gssk_nt
from eehssk.design import DesignProblem, min_power_at_rate, priors_for_beta, solve
from eehssk.errors import RateInfeasibleError
from eehssk.framing import FramePlan, frame_to_symbols, symbols_to_frame
from eehssk.gssk_props import check_corollaries, check_lemma1, check_theorem1, max_set_with_min_distance
from eehssk.huffman import achieved_stats, bits_to_symbols, build_codebook, symbols_to_bits
from eehssk.montecarlo import SimSpec, build_scheme, crossing_db, ee_hssk_envelope, hull_power_at, run_link_sim

from conftest import ACCEPTANCE_DETAILS
from oracles import simplex_grid_min_power


def note(number, text):
    ACCEPTANCE_DETAILS[number] = text
    print(f"criterion {number}: {text}")


def test_criterion_1_optimizer_exactness():
    t0 = time.perf_counter()
    full = solve(DesignProblem({1: 5, 3: 10, 5: 1}, 5, 4.0))
    assert full.beta == 1.0
    assert all(p == pytest.approx(1 / 16, abs=1e-15) for p in full.priors.values())
    assert abs(full.rate - 4.0) <= 1e-9
    ssk = solve(DesignProblem({1: 4, 3: 4}, 4, 2.0))
    assert ssk.at_zero_limit and ssk.priors[1] == 0.25 and ssk.priors[3] == 0.0
    cap = DesignProblem.for_antennas(10, 2, 3, 0.0).capacity
    assert abs(cap - 7.0224) <= 1e-3
    elapsed = time.perf_counter() - t0
    note(1, f"beta=1 rate={full.rate:.9f}; SSK limit P1=1/4; capacity={cap:.4f}; {elapsed:.3f}s")
    assert elapsed < 1.0


def test_criterion_2_simplex_grid_oracle():
    t0 = time.perf_counter()
    cases = [({1: 5, 3: 10}, r) for r in (2.5, 3.0, 3.5)]
    cases += [({1: 5, 3: 10, 5: 1}, r) for r in (2.5, 3.0, 3.5, 3.9)]
    cases += [({1: 7, 3: 35, 5: 21}, r) for r in (3.0, 4.0, 5.0, 5.8)]
    cases += [({1: 10, 3: 120}, r) for r in (4.0, 6.0, 7.0)]
    cases += [({2: 6, 4: 3, 5: 2}, r) for r in (2.8, 3.2)]
    worst = -math.inf
    for sizes, rate in cases:
        sol = solve(DesignProblem(sizes, max(sizes), rate))
        grid = simplex_grid_min_power(sizes, rate, step=1e-3)
        worst = max(worst, sol.avg_power - grid)
    elapsed = time.perf_counter() - t0
    note(2, f"{len(cases)} problems; largest grid undercut {worst:.2e} (limit 1e-3); {elapsed:.1f}s")
    assert worst <= 1e-3
    assert elapsed < 60


def test_criterion_3_tables():
    gssk = build_gssk(5, 3)
    assert [str(s) for s in gssk.symbols] == ["00011", "00101", "01001", "10001",
                                              "00110", "01010", "10010", "01100"]
    assert gssk.bitmap == ("000", "001", "010", "011", "100", "101", "110", "111")
    hssk = build_hssk_dmin2(5, 4)
    assert [str(s) for s in hssk.symbols] == [
        "00001", "00010", "00100", "01000", "10000",
        "00111", "01011", "10011", "01101", "10101", "11001", "01110", "10110", "11010", "11100",
        "11111"]
    assert hssk.bitmap == tuple(format(k, "04b") for k in range(16))
    code = build_code_dmin(5, 2)
    priors = solve(DesignProblem.from_code(code, 3, 3.0)).priors
    book = build_codebook(alphabet_from_priors(code, priors))
    lengths = {1: sorted(len(e.code) for e in book if e.symbol.weight == 1),
               3: sorted(len(e.code) for e in book if e.symbol.weight == 3)}
    assert lengths == {1: [2, 2, 3, 3, 3], 3: [6] * 6 + [7] * 4}
    rate, power = achieved_stats(book)
    note(3, f"GSSK and HSSK tables exact; EE-HSSK lengths {lengths}; rate {rate}, power {power}")
    assert rate == 2.90625 and power == 1.25


def _check_codebook(book, priors, rng):
    codes = book.codes
    ordered = sorted(codes)
    assert not any(b.startswith(a) for a, b in zip(ordered, ordered[1:]))
    L = book.max_len
    assert sum(1 << (L - len(c)) for c in codes) == 1 << L
    bits = "".join("1" if b else "0" for b in rng.integers(0, 2, 48))
    symbols, used = bits_to_symbols(book, bits)
    assert symbols_to_bits(book, symbols) == bits[:used]
    lengths = np.array(book.lengths)
    p = np.asarray(priors)
    order = np.argsort(-p, kind="stable")
    # higher prior never gets a strictly longer code
    ps, ls = p[order], lengths[order]
    for k in range(len(ps) - 1):
        if ps[k] > ps[k + 1]:
            assert ls[k] <= ls[k + 1:].min()


def test_criterion_4_huffman_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    n_trials = 100_000
    for _ in range(n_trials):
        k = rng.integers(1, 4)
        weights = np.sort(rng.choice(np.arange(1, 8), size=k, replace=False))
        sizes = {int(w): int(rng.integers(1, 7)) for w in weights}
        if sum(sizes.values()) < 2:
            sizes[int(weights[0])] = 2
        beta = float(rng.uniform(0.02, 1.0))
        cls = priors_for_beta(DesignProblem(sizes, 7, 0.0), beta)
        priors = [cls[w] for w, n in sizes.items() for _ in range(n)]
        book = build_codebook(list(range(len(priors))), priors)
        _check_codebook(book, priors, rng)
    assert book.kraft_sum() == Fraction(1)
    elapsed = time.perf_counter() - t0
    note(4, f"{n_trials} random class structures: prefix-free, Kraft=1, round trip, ordering; {elapsed:.1f}s")
    assert elapsed < 60


def test_criterion_5_power_vs_rate():
    t0 = time.perf_counter()
    worst_locus, worst_gap = 0.0, -math.inf
    for n_t in (7, 10):
        code = build_code_dmin(n_t, 2)
        env = {M: ee_hssk_envelope(n_t, 2, M) for M in (3, n_t)}
        full = DesignProblem.from_code(code, n_t, 0.0)
        cap3 = DesignProblem.from_code(code, 3, 0.0).capacity
        # achieved power of designs at the tested target rates against the optimum at the achieved rate
        for M in (3, n_t):
            problem = DesignProblem.from_code(code, M, 0.0)
            for target in np.arange(1.0, math.floor(problem.capacity) + 1e-9, 0.5):
                sch = build_scheme("ee-hssk", n_t, float(target), 2, M)
                worst_locus = max(worst_locus, sch.avg_power / min_power_at_rate(problem, sch.rate) - 1)
        for m in range(1, int(full.capacity) + 1):
            ee = hull_power_at(env[n_t], m)
            for name in ("gssk", "hssk"):
                try:
                    other = build_scheme(name, n_t, m).avg_power
                except RateInfeasibleError:
                    continue
                assert ee <= other + 1e-12, f"{n_t=} {m=} {name}: {ee} > {other}"
            if m < cap3 - 0.1:
                gap = hull_power_at(env[3], m) / ee - 1
                worst_gap = max(worst_gap, gap)
    elapsed = time.perf_counter() - t0
    note(5, f"EE-HSSK <= GSSK/HSSK at all integer rates; worst excess over optimum {worst_locus:.4f} "
            f"(limit 0.03); worst M=3 gap {worst_gap:.4f} (limit 0.02); {elapsed:.1f}s")
    assert worst_locus <= 0.03
    assert worst_gap <= 0.02
    assert elapsed < 10


def test_criterion_6_pep_consistency():
    t0 = time.perf_counter()
    grid = [(d, snr_db, n_r) for d in (1, 2, 3, 4, 6) for snr_db in range(-10, 40, 5) for n_r in (1, 2, 4, 7)]
    assert len(grid) == 200
    for d, snr_db, n_r in grid:
        inp = PepInputs(d, 0.0, 10 ** (snr_db / 10), 7, n_r)
        assert pep_exact(inp) <= pep_chernoff(inp)
    rng = np.random.default_rng(6)
    n = 10_000_000
    worst = 0.0
    mc_grid = [(d, snr_db, n_r, L) for d, snr_db, n_r, L in
               [(1, -5, 1, 0.0), (2, 0, 1, 0.0), (2, 5, 2, 0.0), (3, 3, 2, 0.5), (1, 0, 3, 0.0),
                (2, -3, 4, 0.0), (4, 0, 1, 1.0), (2, 2, 2, -0.5), (3, -2, 3, 0.2), (5, -6, 2, 0.0),
                (1, 8, 1, 0.0), (2, 10, 1, 0.3), (6, -4, 1, 0.0), (2, 0, 5, 0.0), (1, 4, 2, 0.0),
                (3, 0, 1, -1.0), (2, -8, 7, 0.0), (4, -5, 3, 0.7), (1, 2, 4, 0.0), (2, 6, 3, 0.0)]]
    for d, snr_db, n_r, L in mc_grid:
        inp = PepInputs(d, L, 10 ** (snr_db / 10), 7, n_r)
        z = inp.z_distribution.rvs(size=n, random_state=rng)
        hits = np.count_nonzero(rng.standard_normal(n) > np.sqrt(z) + L / (inp.n0 * np.sqrt(z)))
        p_hat = hits / n
        se = math.sqrt(max(p_hat * (1 - p_hat), 1e-300) / n)
        worst = max(worst, abs(pep_exact(inp) - p_hat) / se)
    elapsed = time.perf_counter() - t0
    note(6, f"exact <= Chernoff on 200 points; worst |exact - MC| = {worst:.2f} SE over 20 points; {elapsed:.0f}s")
    assert worst <= 3
    assert elapsed < 300


CRITERION7_GRID = tuple(float(x) for x in range(-5, 3))


@pytest.fixture(scope="module")
def link_runs():
    t0 = time.perf_counter()
    runs = {}
    for scheme, seed in (("gssk", 2024), ("ee-hssk", 2025)):
        spec = SimSpec(scheme, 7, 7, 4, CRITERION7_GRID, min_frame_errors=300, max_frames=200_000, seed=seed,
                       arq="paper")
        runs[scheme] = run_link_sim(spec)
    return runs, time.perf_counter() - t0


def _crossing_interval(points, value, ci, target):
    x = [p.ebn0_db for p in points]
    mid = crossing_db(x, [value(p) for p in points], target)
    lo = crossing_db(x, [max(value(p) - ci(p), 0.0) for p in points], target)
    hi = crossing_db(x, [value(p) + ci(p) for p in points], target)
    return mid, lo, hi


def _monotone(points, value, ci):
    return all(value(b) <= value(a) + ci(a) + ci(b) for a, b in zip(points, points[1:]))


@pytest.mark.slow
def test_criterion_7_link_gap(link_runs):
    runs, elapsed = link_runs
    g, e = runs["gssk"].points, runs["ee-hssk"].points
    ser = lambda p: p.ser
    ser_ci = lambda p: p.ser_ci
    fer = lambda p: p.fer_no_arq
    fer_ci = lambda p: 1.959963984540054 * math.sqrt(p.fer_no_arq * (1 - p.fer_no_arq) / p.frames)
    lines, ok = [], True
    for label, value, ci, target in (("SER", ser, ser_ci, 1e-3), ("FER", fer, fer_ci, 1e-2)):
        gm, glo, ghi = _crossing_interval(g, value, ci, target)
        em, elo, ehi = _crossing_interval(e, value, ci, target)
        gap = gm - em
        # widest and narrowest gaps consistent with the confidence bands
        gap_hi, gap_lo = ghi - elo, glo - ehi
        ok &= gap_lo <= 2.75 and gap_hi >= 0.75
        lines.append(f"{label} gap {gap:.2f} dB [{gap_lo:.2f}, {gap_hi:.2f}]")
        ok &= _monotone(g, value, ci) and _monotone(e, value, ci)
    note(7, "; ".join(lines) + f"; target 1.5-2 +/- 0.75 dB; monotone; {elapsed / 60:.1f} min")
    assert ok
    assert elapsed < 20 * 60


def test_criterion_8_appendix_certification():
    t0 = time.perf_counter()
    for n in range(1, 11):
        for w in range(1, n + 1):
            assert check_lemma1(n, w) or w == n
    certified = 0
    for n in range(2, 9):
        for m in range(1, 20):
            try:
                choose_gssk_nt(n, m)
            except RateInfeasibleError:
                break
            assert check_theorem1(n, m).certified
            certified += 1
    rows = check_corollaries()
    assert all(r.holds for r in rows)
    assert max_set_with_min_distance(5, 2, 4, use_corollary_ceiling=False)[0] == 2 == \
        next(r.bound for r in rows if (r.n_t, r.n_t_active, r.threshold) == (5, 2, 4))
    assert max_set_with_min_distance(7, 3, 6, use_corollary_ceiling=False)[0] == 2 == \
        next(r.bound for r in rows if (r.n_t, r.n_t_active, r.threshold) == (7, 3, 6))
    elapsed = time.perf_counter() - t0
    tight = sum(r.exact == r.bound for r in rows)
    note(8, f"lemma for n<=10; {certified} GSSK (n, m) certified; {len(rows)} corollary instances hold "
            f"({tight} tight); {elapsed:.0f}s")
    assert elapsed < 300


@pytest.mark.slow
def test_criterion_9_framing(link_runs, table3_codebook):
    plan = FramePlan(table3_codebook, 100)
    rng = np.random.default_rng(9)
    frames = ["".join(map(str, rng.integers(0, 2, 100))) for _ in range(10_001)]
    for a, b in zip(frames, frames[1:]):
        symbols, borrowed = frame_to_symbols(plan, a, b)
        v = symbols_to_frame(plan, symbols, a)
        assert v.payload == a and not v.ed_flag and v.recovered_bits == 100 + borrowed
    # constructed patterns: recovered length swept across the window edges
    lo, hi = plan.ed_window()
    codes = {len(c): s for s, c in zip(table3_codebook.symbols, table3_codebook.codes)}
    checked = 0
    for target in range(lo - 8, hi + 9):
        parts, remaining = [], target
        while remaining > 0:
            k = next(k for k in (7, 6, 3, 2) if k <= remaining and remaining - k != 1)
            parts.append(codes[k])
            remaining -= k
        if remaining:
            continue
        v = symbols_to_frame(plan, parts)
        assert v.recovered_bits == target
        assert v.ed_flag == (target < 100 or target > 100 + plan.max_len - 1)
        checked += 1
    runs, _ = link_runs
    for p in runs["ee-hssk"].points + runs["gssk"].points:
        assert p.fer <= p.fer_no_arq
    note(9, f"10^4 noiseless frames lossless; {checked} constructed lengths match the window; "
            "paper-ARQ FER <= plain FER at every point")
