"""Command-line front end.

Every subcommand also reads ``--config FILE``, a plain ``key = value`` file
whose keys are the long option names (dashes or underscores).  Flags given
on the command line win over the file; ``SSK_SEED`` wins over both for the
seed.  Exit codes: 0 success, 2 infeasible request, 3 unreliable statistics.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import PepInputs, pep_chernoff, pep_exact, symbol_error_estimate
from .constellation import alphabet_from_priors, build_code_dmin
from .design import DesignProblem, optimum_locus, solve
from .errors import BudgetExceededError, DomainError, EEHSSKError, RateInfeasibleError
from .framing import ARQ_MODES
from .gssk_props import check_corollaries, check_lemma1, check_theorem1, max_set_with_min_distance
from .huffman import achieved_stats, build_codebook
from .link import METRICS
from .montecarlo import SCHEMES, SimSpec, run_link_sim, run_power_rate_sweep, sweep_csv

EXIT_OK, EXIT_INFEASIBLE, EXIT_UNRELIABLE = 0, 2, 3


def read_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _floats(text: str) -> list[float]:
    """``"0:2:10"`` (start:step:stop inclusive) or a comma list."""
    if ":" in text:
        start, step, stop = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def _write(lines: list[str], path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_design(args) -> int:
    problem = DesignProblem.for_antennas(args.nt, args.dmin, args.max_rf or args.nt, args.rate)
    sol = solve(problem)
    beta = "0+" if sol.at_zero_limit else f"{sol.beta:.9f}"
    print(f"beta            {beta}")
    print(f"rate_bits       {sol.rate:.9f}")
    print(f"avg_power       {sol.avg_power:.9f}")
    print(f"capacity_bits   {problem.capacity:.9f}")
    print(f"constraint      {'active' if sol.constraint_active else 'inactive'}")
    print("weight,class_size,prior")
    for i in sorted(sol.priors):
        print(f"{i},{sol.class_sizes[i]},{sol.priors[i]:.9g}")
    if args.locus:
        betas = [0.0] + [k / (args.locus_points - 1) for k in range(1, args.locus_points)]
        rows = ["beta,rate_bits,avg_power"]
        rows += [f"{b:g},{r:.9f},{p:.9f}" for b, (r, p) in zip(betas, optimum_locus(problem, betas))]
        _write(rows, args.locus)
    return EXIT_OK


def cmd_table(args) -> int:
    code = build_code_dmin(args.nt, args.dmin)
    sol = solve(DesignProblem.from_code(code, args.max_rf or args.nt, args.rate))
    book = build_codebook(alphabet_from_priors(code, sol.priors))
    width = book.max_len
    print(f"{'source bits':<{max(width, 11)}}  symbol")
    for e in sorted(book, key=lambda e: (len(e.code), e.code)):
        print(f"{e.code:<{max(width, 11)}}  {e.symbol}")
    rate, power = achieved_stats(book)
    print(f"# achieved rate {rate:.6f} bits, average power {power:.6f}")
    return EXIT_OK


def cmd_pep(args) -> int:
    inp = PepInputs(args.d, args.L, 10 ** (args.snr_db / 10), args.nt, args.nr, nt_norm=not args.no_nt_norm)
    print(f"{pep_chernoff(inp) if args.bound else pep_exact(inp):.12e}")
    return EXIT_OK


def cmd_ser_estimate(args) -> int:
    code = build_code_dmin(args.nt, args.dmin)
    sol = solve(DesignProblem.from_code(code, args.max_rf or args.nt, args.rate))
    alphabet = build_codebook(alphabet_from_priors(code, sol.priors)).alphabet()
    rows = ["snr_db,estimate,union_bound"]
    for snr_db in _floats(args.snr_db):
        est = symbol_error_estimate(alphabet, 10 ** (snr_db / 10), args.nt, args.nr, use_bound=args.bound,
                                    nt_norm=not args.no_nt_norm)
        rows.append(f"{snr_db:g},{est.estimate:.6e},{est.union_bound:.6e}")
    _write(rows, args.out)
    return EXIT_OK


def _seed(args) -> int:
    env = os.environ.get("SSK_SEED")
    return int(env) if env else int(args.seed)


def cmd_simulate(args) -> int:
    spec = SimSpec(scheme=args.scheme, n_t=args.nt, n_r=args.nr or args.nt, rate=args.rate,
                   ebn0_grid=tuple(_floats(args.ebn0)), d_min=args.dmin, max_rf=args.max_rf,
                   frame_bits=args.frame_bits, min_frame_errors=args.min_frame_errors,
                   max_frames=args.max_frames, seed=_seed(args), arq=args.arq,
                   fading="per-frame" if args.block_fading else "per-symbol", metric=args.metric,
                   workers=args.workers)
    progress = None
    if args.verbose:
        progress = lambda p: print(f"# {p.ebn0_db:g} dB: SER {p.ser:.3e} FER {p.fer:.3e} "
                                   f"({p.frames} frames)", file=sys.stderr)
    result = run_link_sim(spec, progress)
    _write(result.csv_rows(), args.out)
    if args.json:
        Path(args.json).write_text(json.dumps(result.to_dict(), indent=2))
    if not result.reliable:
        bad = ", ".join(f"{p.ebn0_db:g}" for p in result.points if not p.reliable)
        print(f"warning: frame budget hit before {spec.min_frame_errors} frame errors at {bad} dB",
              file=sys.stderr)
        return EXIT_UNRELIABLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    max_rfs = [int(x) for x in str(args.max_rf).split(",")] if args.max_rf else None
    rows, notes = run_power_rate_sweep(args.nt, _floats(args.rates), args.dmin, max_rfs,
                                       schemes=args.schemes.split(","))
    _write(sweep_csv(rows), args.out)
    for note in notes:
        print(f"note: skipped {note}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    n = args.nt
    lemma = [(w, check_lemma1(n, w)) for w in range(1, n + 1)]
    print(f"even pairwise distances within every weight class of length {n}: "
          f"{'ok' if all(ok for _, ok in lemma) else 'FAILED'}")
    ok = all(v for _, v in lemma)
    if args.rate:
        rep = check_theorem1(n, args.rate, budget=args.budget)
        print(f"GSSK n_t={n} m={args.rate}: active={rep.n_t_active} largest distance-4 set "
              f"{rep.max_d4_set} vs {2 ** args.rate} symbols -> {'certified' if rep.certified else 'NOT certified'}")
        ok &= rep.certified
    rows = check_corollaries(n, args.ntx, budget=args.budget)
    lines = ["n_t,n_t_active,threshold,exact,bound,holds"]
    lines += [f"{r.n_t},{r.n_t_active},{r.threshold},{r.exact},{r.bound},{int(r.holds)}" for r in rows]
    _write(lines, args.out)
    ok &= all(r.holds for r in rows)
    if args.ntx and args.threshold:
        size, witness = max_set_with_min_distance(n, args.ntx, args.threshold, budget=args.budget)
        print(f"largest set at distance >= {args.threshold}: {size}: " + " ".join(map(str, witness)))
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eehssk", description="Energy-efficient SSK-family alphabets: design, "
                                "codebooks, error analysis and link simulation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rate_type=float):
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--nt", type=int, required=False, help="transmit antennas")
        sp.add_argument("--dmin", type=int, default=2)
        sp.add_argument("--max-rf", type=int, default=None, help="most simultaneously active antennas")
        sp.add_argument("--rate", type=rate_type, help="target bits per symbol")

    sp = sub.add_parser("design", help="optimal class priors for a target rate")
    common(sp)
    sp.add_argument("--locus", help="write the beta-swept rate/power curve to this CSV")
    sp.add_argument("--locus-points", type=int, default=101)
    sp.set_defaults(func=cmd_design, required=("nt", "rate"))

    sp = sub.add_parser("table", help="print the Huffman codebook")
    common(sp)
    sp.set_defaults(func=cmd_table, required=("nt", "rate"))

    sp = sub.add_parser("pep", help="pairwise error probability for one symbol pair")
    sp.add_argument("--config")
    sp.add_argument("--d", type=int)
    sp.add_argument("--L", type=float, default=0.0, help="prior log-ratio ln(P_i / P_j)")
    sp.add_argument("--snr-db", type=float)
    sp.add_argument("--nt", type=int)
    sp.add_argument("--nr", type=int)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="bound", action="store_false")
    g.add_argument("--bound", dest="bound", action="store_true")
    sp.add_argument("--no-nt-norm", action="store_true", help="drop the 1/n_t factor in the distance scaling")
    sp.set_defaults(func=cmd_pep, bound=False, required=("d", "snr_db", "nt", "nr"))

    sp = sub.add_parser("ser-estimate", help="analytical symbol error estimate of an EE-HSSK design")
    common(sp)
    sp.add_argument("--nr", type=int)
    sp.add_argument("--snr-db", default="0:2:20", help="start:step:stop or comma list")
    sp.add_argument("--bound", action="store_true", help="use the Chernoff form where it applies")
    sp.add_argument("--no-nt-norm", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ser_estimate, required=("nt", "nr", "rate"))

    sp = sub.add_parser("simulate", help="Monte Carlo SER/FER versus Eb/N0")
    common(sp)
    sp.add_argument("--scheme", choices=SCHEMES, default="ee-hssk")
    sp.add_argument("--nr", type=int, help="receive antennas (default: n_t)")
    sp.add_argument("--ebn0", default="0:2:16", help="Eb/N0 grid in dB: start:step:stop or comma list")
    sp.add_argument("--frame-bits", type=int, default=100)
    sp.add_argument("--min-frame-errors", type=int, default=300)
    sp.add_argument("--max-frames", type=int, default=200_000)
    sp.add_argument("--seed", type=int, default=0, help="overridden by SSK_SEED")
    sp.add_argument("--arq", choices=ARQ_MODES, default="off")
    sp.add_argument("--block-fading", action="store_true", help="one channel per frame instead of per symbol")
    sp.add_argument("--metric", choices=METRICS, default="derived")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--json", help="also write the full result as JSON")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_simulate, required=("nt", "rate"))

    sp = sub.add_parser("sweep-power-rate", help="achieved and optimal average power versus rate")
    sp.add_argument("--config")
    sp.add_argument("--nt", type=int)
    sp.add_argument("--dmin", type=int, default=2)
    sp.add_argument("--max-rf", default=None, help="comma list of M values for EE-HSSK")
    sp.add_argument("--rates", default="1:1:6")
    sp.add_argument("--schemes", default="gssk,hssk,ee-hssk")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep, required=("nt",))

    sp = sub.add_parser("verify", help="certify distance properties of constant-weight alphabets")
    sp.add_argument("--config")
    sp.add_argument("--nt", type=int)
    sp.add_argument("--ntx", type=int, default=None, help="restrict to one number of active antennas")
    sp.add_argument("--rate", type=int, default=None, help="also certify the GSSK alphabet at this rate")
    sp.add_argument("--threshold", type=int, default=None, help="print a witness set at this distance")
    sp.add_argument("--budget", type=int, default=500, help="largest weight class searched")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify, required=("nt",))
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = {k.replace("-", "_"): v for k, v in read_config(args.config).items()}
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        unknown = set(cfg) - set(known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        defaults = {}
        for key, text in cfg.items():
            action = known[key]
            if action.const is not None and action.nargs == 0:
                defaults[key] = text.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = action.type(text) if action.type else text
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    missing = [k for k in args.required if getattr(args, k, None) is None]
    if missing:
        parser.error("missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args)
    except (RateInfeasibleError, DomainError, BudgetExceededError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EEHSSKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
