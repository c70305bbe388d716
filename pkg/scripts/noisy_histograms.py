"""Noisy Monte Carlo at SNR 2 and 10: shift histograms per m plus certificate rates.

Usage: python3 scripts/noisy_histograms.py [--trials N] [--seed S] [--out DIR]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from csr import montecarlo as mc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default=None, help="writes <out>/sec4-low and <out>/sec4-high")
    args = ap.parse_args()

    for name in ("sec4-low", "sec4-high"):
        cfg = replace(mc.PRESETS[name], trials=args.trials, seed=args.seed)
        res = mc.run_noisy_suite(cfg)
        print(f"== {name} (SNR={cfg.snr}) ==")
        print(" m  success  cert(noise)  agree  cert(true)")
        for m in cfg.sweep():
            agree = res.certified_agreement[m]
            print(f"{m:>2}  {res.histogram.success_rate[m]:.4f}   {res.certificate_rate[m]:.4f}"
                  f"       {'-' if agree is None else f'{agree:.3f}'}  {res.true_shift_certified_rate[m]:.4f}")
        print("violations:", res.violations)
        print(mc.text_histogram(res.histogram, width=30))
        if args.out:
            mc.write_outputs(res, Path(args.out) / name)


if __name__ == "__main__":
    main()
