"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
stderr; results go to ``-o`` files or to stdout as CSV.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import baselines, bench, fileio, jade, synth
from .core import NoiseSpec, Signal, SignalError, add_noise
from .fif import FifConfig, decompose
from .plot import emit_plot
from .spline import SplineError

log = logging.getLogger("jadeif")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _input_args(p):
    p.add_argument("input", nargs="?", default="-", help="CSV or WAV file; '-' reads CSV from stdin")
    p.add_argument("--rate", type=float, help="sample rate (Hz) for single-column CSV")
    p.add_argument("-o", "--output", default="-", help="output CSV ('-' for stdout)")


def _fif_args(p):
    d = FifConfig()
    p.add_argument("--xi", type=float, default=d.xi)
    p.add_argument("--delta", type=float, default=d.delta)
    p.add_argument("--max-imfs", type=int, default=d.max_imfs)
    p.add_argument("--max-inner-iterations", type=int, default=d.max_inner_iterations)
    p.add_argument("--extension-factor", type=int, default=d.extension_factor)
    p.add_argument("--remainder-tol", type=float, default=d.remainder_tol)


def _jade_args(p):
    p.add_argument("--monotonic-segments", action="store_true",
                   help="cut at extrema instead of zero crossings")
    p.add_argument("--window", type=int, help="moving-average window (odd)")
    p.add_argument("--no-refine", action="store_true", help="keep crossing knots on the sample grid")
    p.add_argument("--section-knots", type=_floats, default=None,
                   help="extra knots per section as fractions of a half period, e.g. 0.25,0.75")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = _Parser(prog="jadeif", description="Phase and frequency estimation by template alignment.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic fixture as CSV")
    p.add_argument("fixture", choices=synth.FIXTURES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-db", type=float, help="scale the noise to this SNR instead of the default level")
    p.add_argument("--gamma", type=float, help="noise scale (default: 0.05 for ex1/ex2, 0 otherwise)")
    p.add_argument("--n-samples", type=int)
    p.add_argument("-o", "--output", default="-")

    p = sub.add_parser("decompose", parents=[common], help="FIF decomposition")
    _input_args(p)
    _fif_args(p)

    p = sub.add_parser("jade", parents=[common], help="phase, frequency and amplitude of one component")
    _input_args(p)
    _jade_args(p)
    p.add_argument("--truth-crossings", action="store_true",
                   help="take crossings from the input's 'clean' column")
    p.add_argument("--crossings", type=_floats, help="comma-separated crossing indices")
    p.add_argument("--partition", type=_floats, help="comma-separated spline partition points")

    p = sub.add_parser("baseline", parents=[common], help="HT, NHT or DQ phase")
    p.add_argument("method", choices=sorted(baselines.METHODS))
    _input_args(p)

    p = sub.add_parser("pipeline", parents=[common], help="decompose, estimate, reconstruct")
    _input_args(p)
    _fif_args(p)
    _jade_args(p)
    p.add_argument("--imfs", type=_ints, help="1-based IMF indices (default: all)")
    p.add_argument("--plot", help="also write an SVG of input and composite")

    bp = sub.add_parser("bench", help="benchmarks")
    bsub = bp.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)
    p = bsub.add_parser("sweep", parents=[common], help="SNR sweep of phase error")
    p.add_argument("--fixture", default="ex1", help="ex1, ex2 or a CSV with time,value,phase")
    p.add_argument("--method", default="jade", choices=bench.METHODS)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--snr-db", type=_floats, default=list(bench.TABLE1_SNR))
    p.add_argument("--truth-crossings", action="store_true")
    p.add_argument("--format", choices=("csv", "table"), default="csv")
    p.add_argument("-o", "--output", default="-")
    _jade_args(p)

    p = bsub.add_parser("compare", parents=[common], help="phase error of every method")
    p.add_argument("--fixture", default="ex2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-db", type=float)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--plot", help="write an SVG of the phase curves")
    _jade_args(p)

    p = sub.add_parser("plot", parents=[common], help="SVG of CSV columns")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--columns", help="comma-separated column names (default: all but time)")
    p.add_argument("--title")
    p.add_argument("-o", "--output", required=True)
    return top


# -- config -----------------------------------------------------------------

def _subparser(parser, args):
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    p = action.choices[args.command]
    if args.command == "bench":
        inner = next(a for a in p._actions if isinstance(a, argparse._SubParsersAction))
        p = inner.choices[args.bench_command]
    return p


def read_config(path) -> dict:
    """``key = value`` lines; '#' starts a comment."""
    out = {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict):
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, raw in cfg.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r}")
        a = actions[key]
        if isinstance(a, argparse._StoreTrueAction):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean")
            defaults[key] = raw.lower() in ("true", "1", "yes")
        else:
            try:
                val = a.type(raw) if a.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
            if a.choices is not None and val not in a.choices:
                raise UsageError(f"config key {key!r}: {val!r} not in {sorted(a.choices)}")
            defaults[key] = val
    sub.set_defaults(**defaults)


# -- helpers ----------------------------------------------------------------

def _load(args) -> Signal:
    path = args.input
    if path != "-" and path.lower().endswith(".wav"):
        return fileio.read_wav(path)
    return fileio.read_csv(path, args.rate)


def _fif_config(args) -> FifConfig:
    try:
        return FifConfig(delta=args.delta, max_inner_iterations=args.max_inner_iterations,
                         max_imfs=args.max_imfs, xi=args.xi,
                         extension_factor=args.extension_factor, remainder_tol=args.remainder_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _jade_config(args) -> jade.JadeConfig:
    kw = dict(window=args.window, refine=not args.no_refine, monotonic=args.monotonic_segments)
    if args.section_knots is not None:
        kw["section_knots"] = tuple(args.section_knots)
    try:
        return jade.JadeConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _synth_columns(args) -> dict:
    n = args.n_samples
    if args.fixture == "duffing":
        x, v = synth.duffing_solve(synth.DuffingParams())
        clean, extra = v, {"x": x.samples}
        truth = None
    elif args.fixture == "ex3":
        clean, (t1, t2) = synth.two_component(n or 2000)
        truth = None
        extra = {"phase_1": t1.cos_phase(), "frequency_1": t1.frequency,
                 "phase_2": t2.cos_phase(), "frequency_2": t2.frequency}
    else:
        clean, truth = synth.fixture(args.fixture, noise=NoiseSpec(0.0, 0), n_samples=n)
        extra = {}
    if args.snr_db is not None:
        noisy = clean.with_samples(clean.samples + bench.noise_for(clean, args.snr_db, args.seed))
    else:
        default = synth.EX1_GAMMA if args.fixture in ("ex1", "ex2") else 0.0
        gamma = default if args.gamma is None else args.gamma
        if gamma < 0:
            raise UsageError("--gamma must be non-negative")
        noisy = add_noise(clean, NoiseSpec(gamma, args.seed))
    cols = {"time": clean.times, "value": noisy.samples, "clean": clean.samples}
    if truth is not None:
        cols.update(phase=truth.cos_phase(), frequency=truth.frequency, amplitude=truth.amplitude)
    cols.update(extra)
    return cols


# -- commands ---------------------------------------------------------------

def cmd_synth(args):
    fileio.write_table(_synth_columns(args), args.output)


def cmd_decompose(args):
    fileio.write_results(decompose(_load(args), _fif_config(args)), args.output)


def cmd_jade(args):
    cfg = _jade_config(args)
    if args.truth_crossings and args.crossings:
        raise UsageError("--truth-crossings and --crossings are exclusive")
    crossings = args.crossings
    if args.truth_crossings:
        sig, cols = fileio.read_columns(args.input, required=("value", "clean"))
        crossings = jade.truth_crossings(cols["clean"])
    else:
        sig = _load(args)
    r = jade.estimate(sig, cfg, partition=args.partition, crossings=crossings)
    for note in r.notes:
        log.info(note)
    cols = fileio.result_columns(r)
    cols["time"] = sig.times
    fileio.write_table(cols, args.output)


def cmd_baseline(args):
    sig = _load(args)
    phase, freq = baselines.METHODS[args.method](sig)
    fileio.write_table({"time": sig.times, "phase_rad": phase, "if_hz": freq}, args.output)


def cmd_pipeline(args):
    sig = _load(args)
    sel = None if args.imfs is None else [i - 1 for i in args.imfs]
    res = bench.pipeline(sig, _fif_config(args), sel, _jade_config(args))
    for note in res.notes:
        log.warning(note)
    cols = {"time": sig.times, "value": sig.samples}
    for i, rec in zip(res.estimated, res.reconstructions):
        cols[f"recon_{i + 1}"] = rec
    cols["composite"] = res.composite
    log.info("composite interior correlation %.4f, relative error %.4f",
             res.composite_correlation, res.composite_error)
    fileio.write_table(cols, args.output)
    if args.plot:
        emit_plot([{"input": sig.samples, "composite": res.composite}], args.plot, sig.times,
                  "composite reconstruction")


def cmd_sweep(args):
    report = bench.snr_sweep(args.fixture, args.snr_db, args.seeds, args.method,
                             args.truth_crossings, _jade_config(args), args.seed)
    if args.format == "table":
        fileio._atomic_write(args.output, bench.format_table(report) + "\n")
    else:
        fileio.write_results(report, args.output)


def cmd_compare(args):
    ref = bench.reference(args.fixture)
    if args.snr_db is not None:
        noise = bench.noise_for(ref.clean, args.snr_db, args.seed)
    else:
        noise = synth.EX2_GAMMA * NoiseSpec(1.0, args.seed).draws(len(ref.clean))
    noisy = ref.clean.with_samples(ref.clean.samples + noise)
    out = bench.compare_methods(noisy, ref.phase, jade_config=_jade_config(args))
    lines = ["method,epsilon,error"]
    for name, o in out.items():
        lines.append(f"{name},{o.epsilon:.12g},{o.error or ''}")
    fileio._atomic_write(args.output, "\n".join(lines) + "\n")
    if args.plot:
        panels = [{"truth": np.mod(ref.phase + np.pi, 2 * np.pi) - np.pi}]
        for name, o in out.items():
            if o.phase is not None:
                panels.append({name: np.mod(o.phase + np.pi, 2 * np.pi) - np.pi})
        emit_plot(panels, args.plot, ref.clean.times, "wrapped phase")


def cmd_plot(args):
    _, cols = fileio.read_columns(args.input, required=())
    names = [c for c in cols if c != "time"] if args.columns is None else args.columns.split(",")
    missing = [c for c in names if c not in cols]
    if missing:
        raise SignalError(f"missing columns {', '.join(missing)}")
    emit_plot({c: cols[c] for c in names}, args.output, cols["time"], args.title)


COMMANDS = {"synth": cmd_synth, "decompose": cmd_decompose, "jade": cmd_jade,
            "baseline": cmd_baseline, "pipeline": cmd_pipeline, "plot": cmd_plot}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(_subparser(parser, args), read_config(args.config))
            args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s", stream=sys.stderr)
        if args.command == "bench":
            {"sweep": cmd_sweep, "compare": cmd_compare}[args.bench_command](args)
        else:
            COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except UsageError as exc:
        sys.stderr.write(f"jadeif: error: {exc}\n")
        return 1
    except (SignalError, SplineError, RuntimeError) as exc:
        sys.stderr.write(f"jadeif: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
