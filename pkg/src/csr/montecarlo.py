"""Monte Carlo reproduction of the noise-free and noisy shift-retrieval experiments.

Every trial draws from its own PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(suite, m, trial))``, so a run is a pure
function of its config: serial and parallel execution give bit-identical
records.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import gcd
from pathlib import Path

import numpy as np

from .estimators import MeasurementPair, fourier_test
from .guarantees import NoiseInfo, RecoveryCertificate, certify_noise_free, certify_noisy
from .sensing import FrequencySet, measure_fourier, partial_fourier
from .signal import argmax_smallest, correlation_scores, cyclic_shift

NOISE_FREE_STREAM = 0
NOISY_STREAM = 1
FREQ_POLICIES = ("rejection", "uniform", "ladder")


@dataclass(frozen=True)
class TrialConfig:
    """Monte Carlo configuration.

    ``m`` and ``shift`` are an int or ``"random"`` (uniform on 1..n-1).
    ``freq_policy`` is one of :data:`FREQ_POLICIES` or an explicit tuple of
    frequency indices. ``snr=None`` means noise-free. ``ms`` lists the
    sample dimensions swept by the noisy suite (default 1..n).
    """

    n: int = 10
    m: int | str = "random"
    shift: int | str = "random"
    freq_policy: str | tuple[int, ...] = "rejection"
    snr: float | None = None
    trials: int = 10000
    seed: int = 0
    ms: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.snr is not None and not self.snr > 0:
            raise ValueError("snr must be > 0")
        for name in ("m", "shift"):
            val = getattr(self, name)
            if val == "random":
                continue
            if not isinstance(val, (int, np.integer)):
                raise ValueError(f"{name} must be an int or 'random', got {val!r}")
        if self.m != "random" and not 1 <= self.m <= self.n:
            raise ValueError(f"m must lie in 1..{self.n}")
        if isinstance(self.freq_policy, str):
            if self.freq_policy not in FREQ_POLICIES:
                raise ValueError(f"unknown frequency policy {self.freq_policy!r}")
        else:
            fs = FrequencySet(self.n, tuple(self.freq_policy))
            object.__setattr__(self, "freq_policy", fs.ks)
            if self.m not in ("random", fs.m):
                raise ValueError("explicit frequency set disagrees with m")
        if self.ms is not None:
            ms = tuple(int(m) for m in self.ms)
            if not ms or any(not 1 <= m <= self.n for m in ms):
                raise ValueError(f"ms must lie in 1..{self.n}")
            object.__setattr__(self, "ms", ms)

    def sweep(self) -> tuple[int, ...]:
        if self.ms is not None:
            return self.ms
        if not isinstance(self.freq_policy, str):
            return (len(self.freq_policy),)
        if self.m != "random":
            return (int(self.m),)
        return tuple(range(1, self.n + 1))


PRESETS = {
    "sec3": TrialConfig(n=10, m="random", shift="random", freq_policy="rejection", trials=10000),
    "sec4-low": TrialConfig(n=10, shift=5, freq_policy="ladder", snr=2.0, trials=10000, ms=tuple(range(1, 11))),
    "sec4-high": TrialConfig(n=10, shift=5, freq_policy="ladder", snr=10.0, trials=10000, ms=tuple(range(1, 11))),
}


@dataclass
class TrialRecord:
    trial: int
    m: int
    ks: tuple[int, ...]
    true_shift: int
    estimated_shift: int
    margin: float
    certificate: RecoveryCertificate
    snr_realized: float = float("inf")
    noise_free_shift: int | None = None
    classical_shift: int | None = None

    @property
    def success(self) -> bool:
        return self.estimated_shift == self.true_shift


@dataclass
class HistogramResult:
    """Counts of estimated shifts, one row of n bins per sample dimension."""

    n: int
    ms: tuple[int, ...]
    counts: np.ndarray
    success_rate: dict[int, float]

    def row(self, m: int) -> np.ndarray:
        return self.counts[self.ms.index(m)]


@dataclass
class NoiseFreeSuiteResult:
    config: TrialConfig
    records: list[TrialRecord]
    success_rate: float
    failures: list[TrialRecord]
    histogram: HistogramResult


@dataclass
class NoisySuiteResult:
    config: TrialConfig
    records: list[TrialRecord]
    histogram: HistogramResult
    certificate_rate: dict[int, float]
    certified_agreement: dict[int, float | None]
    true_shift_certified_rate: dict[int, float]
    violations: dict[str, int] = field(default_factory=dict)


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def sample_signal(n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. uniform(0, 1) real samples."""
    return rng.uniform(0.0, 1.0, size=n).astype(np.complex128)


def add_calibrated_noise(v, snr: float, rng: np.random.Generator):
    """Add complex Gaussian noise rescaled so ``||v||^2 / ||e||^2 == snr`` exactly.

    Returns ``(v + e, e)``.
    """
    v = np.asarray(v, dtype=np.complex128)
    if not snr > 0:
        raise ValueError("snr must be > 0")
    power = float(np.sum(np.abs(v) ** 2))
    if power == 0:
        raise ValueError("cannot calibrate noise against a zero signal")
    e = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
    e *= np.sqrt(power / snr) / np.linalg.norm(e)
    return v + e, e


def coprime_ladder(n: int) -> tuple[int, ...]:
    """Frequencies coprime to n in ascending order, then the remaining ones (DC included) ascending."""
    return tuple(sorted(range(n), key=lambda k: (gcd(k, n) != 1, k)))


def draw_frequencies(policy, n: int, m: int, rng: np.random.Generator) -> FrequencySet:
    """Frequency set of size m under ``policy``.

    ``rejection`` draws m distinct indices uniformly and redraws until one
    is coprime to n; ``uniform`` accepts any draw; ``ladder`` takes the
    first m entries of :func:`coprime_ladder` and consumes no randomness.
    """
    if not isinstance(policy, str):
        return FrequencySet(n, tuple(policy))
    if policy == "ladder":
        return FrequencySet(n, tuple(sorted(coprime_ladder(n)[:m])))
    while True:
        ks = sorted(int(k) for k in rng.choice(n, size=m, replace=False))
        if policy == "uniform" or any(gcd(k, n) == 1 for k in ks):
            return FrequencySet(n, tuple(ks))


def _draw_int(spec, n, rng):
    return int(rng.integers(1, n)) if spec == "random" else int(spec)


def noise_free_trial(cfg: TrialConfig, i: int) -> TrialRecord:
    rng = trial_rng(cfg.seed, NOISE_FREE_STREAM, 0, i)
    n = cfg.n
    m = len(cfg.freq_policy) if not isinstance(cfg.freq_policy, str) else _draw_int(cfg.m, n, rng)
    l = _draw_int(cfg.shift, n, rng) % n
    fs = draw_frequencies(cfg.freq_policy, n, m, rng)
    x = sample_signal(n, rng)
    mp = MeasurementPair(measure_fourier(fs, cyclic_shift(x, l)), measure_fourier(fs, x), n, fs)
    est = fourier_test(mp)
    cert = certify_noise_free(partial_fourier(fs), x, s_star=est.s_star)
    return TrialRecord(i, m, fs.ks, l, est.s_star, est.margin, cert)


def noisy_trial(cfg: TrialConfig, m: int, i: int) -> TrialRecord:
    rng = trial_rng(cfg.seed, NOISY_STREAM, m, i)
    n = cfg.n
    l = _draw_int(cfg.shift, n, rng) % n
    fs = draw_frequencies(cfg.freq_policy, n, m, rng)
    x = sample_signal(n, rng)
    v = measure_fourier(fs, x)
    z = measure_fourier(fs, cyclic_shift(x, l))
    zt, ez = add_calibrated_noise(z, cfg.snr, rng)
    vt, ev = add_calibrated_noise(v, cfg.snr, rng)
    est = fourier_test(MeasurementPair(zt, vt, n, fs))
    clean = fourier_test(MeasurementPair(z, v, n, fs))
    noise = NoiseInfo(float(np.linalg.norm(ez)), float(np.linalg.norm(ev)))
    cert = certify_noisy(est, zt, vt, noise, fs)
    classical = None
    if fs.m == n:
        # full spectrum: lift back to time domain and run plain cross-correlation
        order = np.argsort(fs.array)
        xt = np.fft.ifft(vt[order]) * np.sqrt(n)
        yt = np.fft.ifft(zt[order]) * np.sqrt(n)
        classical = argmax_smallest(correlation_scores(xt, yt))
    snr = float(np.sum(np.abs(z) ** 2) / np.sum(np.abs(ez) ** 2))
    return TrialRecord(i, m, fs.ks, l, est.s_star, est.margin, cert, snr, clean.s_star, classical)


def _run_chunk(args):
    cfg, tasks = args
    if cfg.snr is None:
        return [noise_free_trial(cfg, i) for _, i in tasks]
    return [noisy_trial(cfg, m, i) for m, i in tasks]


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit value, else CSR_THREADS (0 = all cores), else 1."""
    if workers is None:
        env = os.environ.get("CSR_THREADS", "1").strip() or "1"
        try:
            workers = int(env)
        except ValueError:
            raise ValueError(f"CSR_THREADS must be an integer, got {env!r}") from None
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    return workers or (os.cpu_count() or 1)


def _run_tasks(cfg: TrialConfig, tasks: list[tuple[int, int]], workers: int | None) -> list[TrialRecord]:
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) < 2:
        return _run_chunk((cfg, tasks))
    size = -(-len(tasks) // (4 * workers))
    chunks = [(cfg, tasks[j : j + size]) for j in range(0, len(tasks), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so records come back in task order
        return [rec for chunk in pool.map(_run_chunk, chunks) for rec in chunk]


def _histogram(records: list[TrialRecord], n: int, ms: tuple[int, ...]) -> HistogramResult:
    counts = np.zeros((len(ms), n), dtype=np.int64)
    hits = np.zeros(len(ms), dtype=np.int64)
    for r in records:
        j = ms.index(r.m)
        counts[j, r.estimated_shift] += 1
        hits[j] += r.success
    totals = counts.sum(axis=1)
    rate = {m: float(hits[j] / totals[j]) if totals[j] else float("nan") for j, m in enumerate(ms)}
    return HistogramResult(n, ms, counts, rate)


def run_noise_free_suite(cfg: TrialConfig, workers: int | None = None) -> NoiseFreeSuiteResult:
    """Noise-free trials scored against the true shift."""
    if cfg.snr is not None:
        cfg = replace(cfg, snr=None)
    records = _run_tasks(cfg, [(0, i) for i in range(cfg.trials)], workers)
    ms = tuple(sorted({r.m for r in records}))
    failures = [r for r in records if not r.success]
    rate = 1.0 - len(failures) / len(records)
    return NoiseFreeSuiteResult(cfg, records, rate, failures, _histogram(records, cfg.n, ms))


def run_noisy_suite(cfg: TrialConfig, workers: int | None = None) -> NoisySuiteResult:
    """Noisy trials for every m in the sweep, with certificates checked against the truth."""
    if cfg.snr is None:
        raise ValueError("noisy suite requires an snr")
    ms = cfg.sweep()
    records = _run_tasks(cfg, [(m, i) for m in ms for i in range(cfg.trials)], workers)
    cert_rate, agree, true_rate = {}, {}, {}
    violations = {"noise_unaffected": 0, "true_shift": 0}
    for m in ms:
        rows = [r for r in records if r.m == m]
        certified = [r for r in rows if r.certificate.details["noise_unaffected"]]
        cert_rate[m] = len(certified) / len(rows)
        agree[m] = (sum(r.estimated_shift == r.noise_free_shift for r in certified) / len(certified)) if certified else None
        true_cert = [r for r in rows if r.certificate.verdict in ("per_column_true_shift", "true_shift_guaranteed")]
        true_rate[m] = len(true_cert) / len(rows)
    for r in records:
        if r.certificate.details["noise_unaffected"] and r.estimated_shift != r.noise_free_shift:
            violations["noise_unaffected"] += 1
        if r.certificate.verdict in ("per_column_true_shift", "true_shift_guaranteed") and not r.success:
            violations["true_shift"] += 1
    return NoisySuiteResult(cfg, records, _histogram(records, cfg.n, ms), cert_rate, agree, true_rate, violations)


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def write_suite_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "m", "l", "s_hat", "snr", "verdict", "delta_zv", "min_gap", "margin"])
        for r in records:
            c = r.certificate
            w.writerow([r.trial, r.m, r.true_shift, r.estimated_shift, _fmt(r.snr_realized), c.verdict,
                        _fmt(c.delta_zv), _fmt(c.min_gap), _fmt(r.margin)])


def write_histogram_csv(hist: HistogramResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "shift", "count"])
        for j, m in enumerate(hist.ms):
            for s in range(hist.n):
                w.writerow([m, s, int(hist.counts[j, s])])


def _round(x):
    if x is None:
        return None
    return float(f"{x:.12g}")


def summarize(result) -> dict:
    cfg = result.config
    out = {
        "n": cfg.n,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "snr": cfg.snr,
        "freq_policy": cfg.freq_policy if isinstance(cfg.freq_policy, str) else list(cfg.freq_policy),
        "success_rate_per_m": {str(m): _round(v) for m, v in result.histogram.success_rate.items()},
    }
    if isinstance(result, NoiseFreeSuiteResult):
        out["success_rate"] = _round(result.success_rate)
        out["failures"] = len(result.failures)
    else:
        out["success_rate"] = _round(float(np.mean([r.success for r in result.records])))
        out["certificate_rate_per_m"] = {str(m): _round(v) for m, v in result.certificate_rate.items()}
        out["certified_agreement_per_m"] = {str(m): _round(v) for m, v in result.certified_agreement.items()}
        out["true_shift_certified_rate_per_m"] = {str(m): _round(v) for m, v in result.true_shift_certified_rate.items()}
        out["violations"] = dict(result.violations)
    return out


def write_outputs(result, out_dir) -> dict[str, Path]:
    """Write ``suite.csv``, ``histogram.csv`` and ``summary.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"suite": out / "suite.csv", "histogram": out / "histogram.csv", "summary": out / "summary.json"}
    write_suite_csv(result.records, paths["suite"])
    write_histogram_csv(result.histogram, paths["histogram"])
    paths["summary"].write_text(json.dumps(summarize(result), indent=2, sort_keys=True) + "\n")
    return paths


def text_histogram(hist: HistogramResult, width: int = 40) -> str:
    """Fixed-width bar chart of the shift histogram, one block per m."""
    lines = []
    for j, m in enumerate(hist.ms):
        row = hist.counts[j]
        top = max(int(row.max()), 1)
        lines.append(f"m={m}  success={hist.success_rate[m]:.4f}")
        for s, c in enumerate(row):
            lines.append(f"  {s:>3} | {'#' * round(width * c / top):<{width}} {int(c)}")
    return "\n".join(lines)
