"""Noise-free Monte Carlo: random m, random shift, rejection-drawn frequencies.

Usage: python3 scripts/noise_free_experiment.py [--trials N] [--seed S] [--out DIR]
"""

import argparse
from dataclasses import replace

from csr import montecarlo as mc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = replace(mc.PRESETS["sec3"], trials=args.trials, seed=args.seed)
    res = mc.run_noise_free_suite(cfg)
    print(f"trials={len(res.records)} success_rate={res.success_rate:.6f} failures={len(res.failures)}")
    for m, rate in res.histogram.success_rate.items():
        print(f"  m={m}: {int(res.histogram.row(m).sum())} trials, success {rate:.4f}")
    verdicts = {}
    for r in res.records:
        verdicts[r.certificate.verdict] = verdicts.get(r.certificate.verdict, 0) + 1
    print("certificate verdicts:", verdicts)
    if args.out:
        mc.write_outputs(res, args.out)


if __name__ == "__main__":
    main()
