"""Command line front end: ``csr estimate | certify | simulate``.

Exit codes: 0 ok, 1 input error, 2 degenerate (zero-margin) estimate,
3 certificate below the level requested with ``--require``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import montecarlo as mc
from .estimators import MeasurementPair, classical_test, compressed_test, fourier_test, l0_oracle
from .guarantees import VERDICT_ALIASES, VERDICT_RANK, NoiseInfo, certify_noise_free, certify_noisy, verdict_rank
from .sensing import FrequencySet, SensingMatrix, measure, partial_fourier, read_matrix_csv
from .signal import read_signal_csv

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_CERT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors become a single ``error:`` line instead of usage text."""

    def error(self, message):
        raise InputError(message)


def _g(x) -> str:
    return f"{x:.12g}"


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x", help="reference signal CSV (re[,im] per line)")
    p.add_argument("--y", help="shifted signal CSV")
    p.add_argument("--z", help="compressed shifted signal CSV")
    p.add_argument("--v", help="compressed reference signal CSV")
    p.add_argument("--n", type=int, help="signal length (required with --z/--v)")
    p.add_argument("--freqs", help="comma-separated frequency indices, e.g. 1,3,7")
    p.add_argument("--matrix", help="generic sensing matrix CSV (m rows of 2n interleaved re,im)")


def _load(args):
    """Resolve the input mode into (mode, x, y, A, measurement pair)."""
    signals = args.x is not None or args.y is not None
    measured = args.z is not None or args.v is not None
    if signals and measured:
        raise InputError("give either --x/--y or --z/--v, not both")
    if not (signals or measured):
        raise InputError("no input: give --x/--y or --z/--v")
    if args.freqs is not None and args.matrix is not None:
        raise InputError("--freqs and --matrix are mutually exclusive")
    if signals:
        if args.x is None or args.y is None:
            raise InputError("both --x and --y are required")
        x, y = read_signal_csv(args.x), read_signal_csv(args.y)
        if x.size != y.size:
            raise InputError(f"dimension mismatch: x has {x.size} samples, y has {y.size}")
        if args.n is not None and args.n != x.size:
            raise InputError(f"dimension mismatch: --n {args.n} but signals have {x.size} samples")
        A = None
        if args.freqs is not None:
            A = partial_fourier(FrequencySet.parse(args.freqs, x.size))
        elif args.matrix is not None:
            A = read_matrix_csv(args.matrix)
            if A.n != x.size:
                raise InputError(f"dimension mismatch: matrix has n={A.n}, signals have {x.size}")
        mp = None if A is None else MeasurementPair(measure(A, y), measure(A, x), x.size, A.freqs)
        return "signals", x, y, A, mp
    if args.z is None or args.v is None:
        raise InputError("both --z and --v are required")
    if args.n is None:
        raise InputError("--n is required with --z/--v")
    z, v = read_signal_csv(args.z), read_signal_csv(args.v)
    if z.size != v.size:
        raise InputError(f"dimension mismatch: z has {z.size} values, v has {v.size}")
    if args.matrix is not None:
        A = read_matrix_csv(args.matrix)
        if A.shape != (z.size, args.n):
            raise InputError(f"dimension mismatch: matrix {A.shape} vs m={z.size}, n={args.n}")
        return "measurements", None, None, A, MeasurementPair(z, v, args.n)
    if args.freqs is None:
        raise InputError("--freqs (or --matrix) is required with --z/--v")
    fs = FrequencySet.parse(args.freqs, args.n)
    if fs.m != z.size:
        raise InputError(f"dimension mismatch: {fs.m} frequencies but {z.size} measurements")
    return "measurements", None, None, partial_fourier(fs), MeasurementPair(z, v, args.n, fs)


def _estimate(args, mode, x, y, A, mp):
    method = args.method
    if method == "auto":
        if A is None:
            method = "classical"
        elif A.freqs is not None:
            method = "fourier"
        else:
            method = "compressed"
    if method == "classical":
        if x is None:
            raise InputError("classical method needs --x/--y")
        return classical_test(x, y, method="direct" if args.count else "fft")
    if method == "l0":
        if x is None:
            raise InputError("l0 method needs --x/--y")
        return l0_oracle(y if A is None else mp.z, x, A)
    if A is None:
        raise InputError(f"method {method} needs --freqs or --matrix")
    if method == "fourier":
        if A.freqs is None:
            raise InputError("fourier method needs --freqs")
        return fourier_test(mp)
    return compressed_test(mp, A)


def cmd_estimate(args) -> int:
    loaded = _load(args)
    est = _estimate(args, *loaded)
    if args.scores:
        with open(args.scores, "w") as fh:
            fh.write("shift,score\n")
            for s, val in enumerate(est.scores):
                fh.write(f"{s},{_g(val)}\n")
    mult = "n/a" if est.multiplies is None else str(est.multiplies)
    print(f"shift: {est.s_star}")
    print(f"margin: {_g(est.margin)}")
    print(f"method: {est.method}")
    print(f"multiplies: {mult}")
    if est.degenerate:
        print("error: degenerate input, shift is ambiguous (zero margin)", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_certify(args) -> int:
    mode, x, y, A, mp = _load(args)
    if args.require is not None:
        verdict_rank(args.require)
    noisy = args.noisy or args.noise_z_norm is not None or args.noise_v_norm is not None
    if noisy and (args.noise_z_norm is None or args.noise_v_norm is None):
        raise InputError("noise norms required: give --noise-z-norm and --noise-v-norm")
    if mode == "signals" and not noisy:
        if A is None:
            A = SensingMatrix(np.eye(x.size))
            est = classical_test(x, y)
        else:
            est = fourier_test(mp) if A.freqs is not None else compressed_test(mp, A)
        cert = certify_noise_free(A, x, s_star=est.s_star)
    else:
        if A is None or A.freqs is None:
            raise InputError("noisy certificates need partial Fourier measurements (--freqs)")
        noise = NoiseInfo(args.noise_z_norm, args.noise_v_norm, "user_bound") if noisy else NoiseInfo.none()
        est = fourier_test(mp)
        cert = certify_noisy(est, mp.z, mp.v, noise, A.freqs)
    payload = cert.to_dict()
    payload["s_star"] = est.s_star
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    if args.require is not None and not cert.at_least(args.require):
        print(f"error: certificate verdict {cert.verdict} is below required {args.require}", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


def _parse_int_or_random(text: str):
    return "random" if text == "random" else int(text)


def _config(args) -> mc.TrialConfig:
    cfg = mc.PRESETS[args.preset] if args.preset else mc.TrialConfig()
    overrides = {}
    if args.n is not None:
        overrides["n"] = args.n
    if args.m is not None:
        overrides["m"] = _parse_int_or_random(args.m)
    if args.shift is not None:
        overrides["shift"] = _parse_int_or_random(args.shift)
    if args.freq_policy is not None:
        pol = args.freq_policy
        overrides["freq_policy"] = pol if pol in mc.FREQ_POLICIES else tuple(int(k) for k in pol.split(","))
    if args.snr is not None:
        overrides["snr"] = None if args.snr <= 0 else args.snr
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.ms is not None:
        overrides["ms"] = tuple(int(k) for k in args.ms.split(","))
    if "n" in overrides and args.preset and "ms" not in overrides and cfg.ms is not None:
        overrides["ms"] = tuple(range(1, overrides["n"] + 1))
    try:
        return replace(cfg, **overrides)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid config: {exc}") from None


def cmd_simulate(args) -> int:
    cfg = _config(args)
    try:
        workers = mc.resolve_workers()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if cfg.snr is None:
        result = mc.run_noise_free_suite(cfg, workers)
    else:
        result = mc.run_noisy_suite(cfg, workers)
    summary = mc.summarize(result)
    if args.out:
        mc.write_outputs(result, args.out)
    print(f"success_rate: {_g(summary['success_rate'])}")
    for m, rate in summary["success_rate_per_m"].items():
        line = f"m={m} success_rate={_g(rate)}"
        if "certificate_rate_per_m" in summary:
            line += f" certificate_rate={_g(summary['certificate_rate_per_m'][m])}"
        print(line)
    if args.text_histogram:
        print(mc.text_histogram(result.histogram))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csr", description="Compressive shift retrieval")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the cyclic shift between two signals")
    _add_inputs(p)
    p.add_argument("--method", choices=["auto", "fourier", "compressed", "classical", "l0"], default="auto")
    p.add_argument("--scores", help="write the per-shift score vector to this CSV")
    p.add_argument("--count", action="store_true", help="use the direct classical path so multiplies are counted")
    p.set_defaults(func=cmd_estimate)

    levels = sorted(set(VERDICT_RANK) | set(VERDICT_ALIASES))
    p = sub.add_parser("certify", help="emit a recovery certificate as JSON")
    _add_inputs(p)
    p.add_argument("--noisy", action="store_true", help="treat measurements as noisy (needs noise norms)")
    p.add_argument("--noise-z-norm", type=float, help="bound on ||e_z||_2")
    p.add_argument("--noise-v-norm", type=float, help="bound on ||e_v||_2")
    p.add_argument("--require", choices=levels, help="exit 3 unless the verdict reaches this level")
    p.add_argument("--out", help="also write the certificate JSON to this file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="run a Monte Carlo suite")
    p.add_argument("--preset", choices=sorted(mc.PRESETS))
    p.add_argument("--n", type=int)
    p.add_argument("--m", help="sample dimension or 'random'")
    p.add_argument("--ms", help="comma-separated sample dimensions for noisy sweeps")
    p.add_argument("--shift", help="true shift or 'random'")
    p.add_argument("--freq-policy", help="rejection | uniform | ladder | explicit list like 1,3")
    p.add_argument("--snr", type=float, help="target SNR (<= 0 for noise-free)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory for suite.csv, histogram.csv, summary.json")
    p.add_argument("--text-histogram", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
