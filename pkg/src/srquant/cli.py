"""Command-line front end: ``srquant <subcommand> ...``.

Exit codes: 0 success, 2 usage, 3 parse/format or I/O, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from pathlib import Path

import numpy as np

from . import noise_model
from .errors import InvalidConfiguration, NumericFailure, ScanFormatError
from .estimators import Method, estimate
from .scan_pipeline import ScanDataset, ingest, run_scan, simulate_scan, write_dataset
from .signal_synth import (DEFAULT_F0, DEFAULT_SAMPLES, SignalSpec, make_phantom, snr_db_to_amplitude,
                           synthesize)
from .sr_theory import optimal_threshold, theory_curve, threshold_sweep

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _resolve_seed(args):
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbits(63)
        print(f"seed={args.seed}")
    return args.seed


def _resolve_amplitude(args, default=0.1):
    if args.snr_db is not None and args.amplitude is not None:
        raise UsageError("give --snr-db or --amplitude, not both")
    if args.snr_db is not None:
        return snr_db_to_amplitude(args.snr_db)
    amp = default if args.amplitude is None else args.amplitude
    if not (amp >= 0 and math.isfinite(amp)):
        raise UsageError(f"--amplitude must be non-negative, got {amp}")
    return amp


def _normalized_f0(f0, rate_hz):
    """Hz when ``rate_hz`` is given, cycles/sample otherwise."""
    if rate_hz is not None:
        if not rate_hz > 0:
            raise UsageError("--rate-hz must be positive")
        f0 = f0 / rate_hz
    if not 0 < f0 < 0.5:
        raise UsageError(f"normalized f0 must lie in (0, 0.5), got {f0}")
    return f0


def _positive(name, value):
    if value is not None and not value > 0:
        raise UsageError(f"--{name} must be positive, got {value}")


def cmd_simulate(args):
    seed = _resolve_seed(args)
    f0_norm = _normalized_f0(args.f0, args.rate_hz)
    _positive("samples", args.samples)
    _positive("sigma", args.sigma)
    if args.phantom:
        if args.positions < 7 and args.phantom != "flat":
            raise UsageError("--positions must be at least 7 for a phantom")
        amp = None if args.amplitude is None and args.snr_db is None else _resolve_amplitude(args)
        phantom = make_phantom(args.phantom, args.positions, amp)
        ds = simulate_scan(phantom, args.samples, seed, f0_norm, args.sigma)
    else:
        amp = _resolve_amplitude(args)
        rng = np.random.default_rng(seed)
        phase = float(rng.uniform(0, 2 * np.pi)) if args.phase is None else args.phase
        spec = SignalSpec(amp, f0_norm, phase, args.sigma, args.samples, seed)
        ts = synthesize(spec)
        manifest = {"f0": f0_norm, "seed": seed, "amplitude": amp, "snr_db": args.snr_db,
                    "phase": phase, "sigma": args.sigma, "samples": args.samples, "positions": 1}
        ds = ScanDataset((0.0,), {0.0: ts}, f0_norm, None, "synthetic", f"seed={seed}", manifest)
    if args.rate_hz is not None:
        ds.f0, ds.rate_hz = args.f0, args.rate_hz
    mpath = write_dataset(ds, args.out)
    print(f"wrote {args.out} and {mpath}")
    return EXIT_OK


def _load_series(args):
    path = Path(args.input)
    text_head = path.read_text(encoding="utf-8").split("\n", 1)[0].strip()
    if text_head.startswith("position"):
        ds = ingest(path, f0=args.f0, rate_hz=args.rate_hz)
        pos = ds.positions[0] if args.position is None else float(args.position)
        if pos not in ds.series:
            raise UsageError(f"position {pos} not in {path}")
        return ds.series[pos].samples, ds.f0_normalized
    try:
        x = np.loadtxt(path, ndmin=1, dtype=float)
    except ValueError as exc:
        raise ScanFormatError(f"{path}: {exc}") from None
    if x.ndim != 1:
        raise ScanFormatError(f"{path}: expected a single column of samples")
    if args.f0 is None:
        raise UsageError("--f0 is required for a plain one-column series")
    return x, _normalized_f0(args.f0, args.rate_hz)


def cmd_estimate(args):
    x, f0 = _load_series(args)
    f0 *= 1.0 + args.freq_offset
    est = estimate(x, args.method, f0=f0, gamma=args.gamma, sigma=args.sigma)
    row = est.as_row()
    if args.format == "json":
        print(json.dumps(row))
    else:
        print(",".join(row))
        print(",".join(str(v).lower() if isinstance(v, bool) else str(v) for v in row.values()))
    return EXIT_OK


def cmd_theory(args):
    if not 0 < args.gamma_min < args.gamma_max or not args.gamma_step > 0:
        raise UsageError("need 0 < gamma-min < gamma-max and gamma-step > 0")
    amp = _resolve_amplitude(args)
    n = int(round((args.gamma_max - args.gamma_min) / args.gamma_step)) + 1
    gammas = np.round(np.linspace(args.gamma_min, args.gamma_max, n), 12)
    curve = theory_curve(gammas, amp)
    g_opt = optimal_threshold()
    print(f"gamma_opt={g_opt:.10f}")
    if args.out:
        curve.to_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_sweep(args):
    seed = _resolve_seed(args)
    amp = _resolve_amplitude(args)
    _positive("trials", args.trials)
    _positive("samples", args.samples)
    f0 = _normalized_f0(args.f0, args.rate_hz)
    n = int(round((args.gamma_max - args.gamma_min) / args.gamma_step)) + 1
    gammas = np.round(np.linspace(args.gamma_min, args.gamma_max, n), 12)
    res = threshold_sweep(amp, args.sigma, args.trials, args.samples, gammas, f0, seed)
    print(f"mean_argmax={res.mean_argmax:.6f}")
    print(f"argmax_std={float(np.std(res.argmaxes)):.6f}")
    if args.out:
        res.curve.to_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_scan(args):
    if args.input:
        ds = ingest(args.input, f0=args.f0, rate_hz=args.rate_hz)
    else:
        seed = _resolve_seed(args)
        if args.positions < 7:
            raise UsageError("--positions must be at least 7")
        amp = None if args.amplitude is None and args.snr_db is None else _resolve_amplitude(args)
        phantom = make_phantom(args.phantom or "high", args.positions, amp)
        f0 = _normalized_f0(DEFAULT_F0 if args.f0 is None else args.f0, args.rate_hz)
        ds = simulate_scan(phantom, args.samples, seed, f0, args.sigma)
    profile = run_scan(ds, args.method, gamma=args.gamma, freq_offset=args.freq_offset)
    det = profile.detection
    if det is not None:
        print(f"object_detected={str(det.object_detected).lower()}")
        print(f"edge_positions={'' if det.edge_positions is None else '%r,%r' % det.edge_positions}")
        corr = "" if det.profile_correlation is None else repr(det.profile_correlation)
        print(f"profile_correlation={corr}")
    failed = sum(not e.converged for e in profile.per_position.values())
    print(f"positions={len(profile.positions)} failed={failed}")
    if args.out:
        profile.to_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_fitnoise(args):
    path = Path(args.input)
    head = path.read_text(encoding="utf-8").split("\n", 1)[0].strip()
    if head.startswith("position"):
        ds = ingest(path, f0=DEFAULT_F0)
        x = np.concatenate([ds.series[p].samples for p in ds.positions])
    else:
        try:
            x = np.loadtxt(path, ndmin=1, dtype=float)
        except ValueError as exc:
            raise ScanFormatError(f"{path}: {exc}") from None
    s = noise_model.fit_scale(x)
    print(f"scale={s!r}")
    print(f"sigma={s * noise_model.A_NORM!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="srquant", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def signal_flags(sp, f0_default=DEFAULT_F0):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--snr-db", type=float)
        sp.add_argument("--amplitude", type=float)
        sp.add_argument("--f0", type=float, default=f0_default,
                        help="cycles/sample, or Hz when --rate-hz is given")
        sp.add_argument("--rate-hz", type=float)
        sp.add_argument("--sigma", type=float, default=1.0)
        sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    sp = sub.add_parser("simulate", help="write a synthetic series or phantom scan")
    signal_flags(sp)
    sp.add_argument("--phantom", choices=["rod", "high", "low", "flat"])
    sp.add_argument("--positions", type=int, default=41)
    sp.add_argument("--phase", type=float, help="default: drawn from the seed")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    methods = [m.value for m in Method]
    sp = sub.add_parser("estimate", help="estimate the amplitude of one series")
    sp.add_argument("--input", required=True)
    sp.add_argument("--method", required=True, choices=methods)
    sp.add_argument("--f0", type=float, help="overrides the manifest")
    sp.add_argument("--rate-hz", type=float)
    sp.add_argument("--freq-offset", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, help="default: optimal threshold")
    sp.add_argument("--sigma", type=float, help="default: estimated from the data")
    sp.add_argument("--position", type=float, help="scan position (default: first)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("theory", help="output SNR curve and optimal threshold")
    sp.add_argument("--snr-db", type=float)
    sp.add_argument("--amplitude", type=float)
    sp.add_argument("--gamma-min", type=float, default=0.05)
    sp.add_argument("--gamma-max", type=float, default=3.0)
    sp.add_argument("--gamma-step", type=float, default=0.01)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_theory)

    sp = sub.add_parser("sweep", help="Monte Carlo threshold sweep")
    signal_flags(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--gamma-min", type=float, default=0.5)
    sp.add_argument("--gamma-max", type=float, default=1.6)
    sp.add_argument("--gamma-step", type=float, default=0.01)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("scan", help="estimate a profile across a scan and detect the object")
    signal_flags(sp, f0_default=None)
    sp.add_argument("--input", help="scan CSV; default simulates --phantom")
    sp.add_argument("--phantom", choices=["rod", "high", "low", "flat"])
    sp.add_argument("--positions", type=int, default=41)
    sp.add_argument("--method", required=True, choices=methods)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--freq-offset", type=float, default=0.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fitnoise", help="fit the Rayleigh scale of a noise record")
    sp.add_argument("--input", required=True)
    sp.set_defaults(func=cmd_fitnoise)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "gamma", None) is not None and not args.gamma > 0:
            raise UsageError("--gamma must be positive")
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"srquant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScanFormatError, OSError) as exc:
        print(f"srquant: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except InvalidConfiguration as exc:
        print(f"srquant: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericFailure, FloatingPointError) as exc:
        print(f"srquant: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"srquant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
