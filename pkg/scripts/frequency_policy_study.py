"""Certificate rate at m=2 under several frequency draw policies.

The noise certificate depends strongly on which two DFT bins are kept, so
this compares random draws against fixed choices at the same SNR.

Usage: python3 scripts/frequency_policy_study.py [--trials N] [--snr R]
"""

import argparse

from csr import montecarlo as mc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--snr", type=float, default=10.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    policies = ["rejection", "uniform", "ladder", (1, 3), (1, 2), (1, 5), (0, 1)]
    for pol in policies:
        cfg = mc.TrialConfig(n=10, shift=5, freq_policy=pol, snr=args.snr, trials=args.trials, seed=args.seed, ms=(2,))
        res = mc.run_noisy_suite(cfg)
        label = pol if isinstance(pol, str) else ",".join(map(str, pol))
        print(f"{label:>10}: certificate rate {res.certificate_rate[2]:.4f}, success {res.histogram.success_rate[2]:.4f}")


if __name__ == "__main__":
    main()
