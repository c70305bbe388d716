"""Recovery certificates for noise-free and noisy shift estimates.

A certificate is one-sided: when it fires, the estimate is guaranteed; when
it does not, nothing is claimed.

Verdicts, weakest first:

``inconclusive``
    no sufficient condition holds.
``noise_unaffected``
    every pair of columns of the noisy compressed dictionary is farther
    apart than the noise threshold ``delta_zv``, so the noisy estimate equals
    the one noise-free measurements would give.
``per_column_true_shift``
    the column of the estimated shift is farther than
    ``max(delta_zv, 2 ||e_v||)`` from every other column: the estimate is the
    true shift.
``true_shift_guaranteed``
    the all-pairs gap exceeds both ``delta_zv`` and ``2 ||e_v||``.
``noise_free_guaranteed``
    noise-free certificate: A commutes with shifts, is a tight frame, and
    the compressed dictionary has distinct columns.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from math import gcd

import numpy as np

from .estimators import MeasurementPair, ShiftEstimate, fourier_scores
from .sensing import (
    DEFAULT_CHECK_TOL,
    FrequencySet,
    SensingMatrix,
    commutation_check,
    compress_dictionary,
    fourier_gap_profile,
    min_column_gap,
    shifted_dictionary,
    tight_frame_check,
)

log = logging.getLogger(__name__)

VERDICT_RANK = {
    "inconclusive": 0,
    "noise_unaffected": 1,
    "per_column_true_shift": 2,
    "true_shift_guaranteed": 3,
    "noise_free_guaranteed": 3,
}
# CLI aliases for --require
VERDICT_ALIASES = {"true_shift": "per_column_true_shift", "none": "inconclusive"}


def verdict_rank(verdict: str) -> int:
    verdict = VERDICT_ALIASES.get(verdict, verdict)
    try:
        return VERDICT_RANK[verdict]
    except KeyError:
        raise ValueError(f"unknown verdict {verdict!r}") from None


@dataclass(frozen=True)
class NoiseInfo:
    """Norms of the measurement errors on z and v."""

    e_z_norm: float
    e_v_norm: float
    source: str = "known_realization"

    def __post_init__(self):
        if self.source not in ("known_realization", "user_bound"):
            raise ValueError(f"unknown noise source {self.source!r}")
        for name in ("e_z_norm", "e_v_norm"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {val}")

    @classmethod
    def none(cls) -> "NoiseInfo":
        return cls(0.0, 0.0, "user_bound")


@dataclass
class RecoveryCertificate:
    commutation_ok: bool
    tight_frame_alpha: float | None
    min_gap: float
    delta_zv: float | None = None
    noise_gap_2ev: float | None = None
    verdict: str = "inconclusive"
    details: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return VERDICT_RANK[self.verdict]

    def at_least(self, level: str) -> bool:
        return self.rank >= verdict_rank(level)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return val if np.isfinite(val) else None
    return obj


def certify_noise_free(
    A: SensingMatrix, x, tol: float = DEFAULT_CHECK_TOL, s_star: int | None = None
) -> RecoveryCertificate:
    """Check the noise-free sufficient conditions for sensing matrix ``A`` and signal ``x``.

    Requires the reference signal itself. With ``s_star`` given, also
    checks the weaker per-column condition for that estimate.
    """
    comm_ok, comm_dev = commutation_check(A, tol)
    alpha = tight_frame_check(A, tol)
    AX = compress_dictionary(A, shifted_dictionary(x))
    details = {"commutation_deviation": comm_dev, "n": A.n, "m": A.m, "tol": tol}
    if A.n < 2:
        gap, pair = float("inf"), (0, 0)
    else:
        gap, pair = min_column_gap(AX)
    details["min_gap_pair"] = list(pair)
    structural = comm_ok and alpha is not None
    verdict = "inconclusive"
    if structural and gap > tol:
        verdict = "noise_free_guaranteed"
    elif structural and s_star is not None and A.n >= 2:
        col_gap, col_pair = min_column_gap(AX, exclude=s_star)
        details.update(s_star=int(s_star), column_gap=col_gap, column_gap_pair=list(col_pair))
        if col_gap > tol:
            verdict = "per_column_true_shift"
    return RecoveryCertificate(comm_ok, alpha, gap, verdict=verdict, details=details)


def coprime_condition(fs: FrequencySet, x_dft, zero_tol: float = 1e-12) -> bool:
    """True iff some measured frequency k_p has a nonzero coefficient and gcd(k_p, n) == 1.

    ``x_dft`` holds the coefficients aligned with ``fs.ks``.
    """
    coeffs = np.asarray(x_dft, dtype=np.complex128).ravel()
    if coeffs.size != fs.m:
        raise ValueError(f"expected {fs.m} coefficients, got {coeffs.size}")
    return any(abs(c) > zero_tol and gcd(k, fs.n) == 1 for k, c in zip(fs.ks, coeffs))


def _delta_from_scores(zt, vt, noise: NoiseInfo, best: float) -> tuple[float, float]:
    radicand = float(np.sum(np.abs(vt) ** 2) + np.sum(np.abs(zt) ** 2) - 2.0 * best)
    if radicand < 0:
        log.debug("negative radicand %.3g clamped to zero", radicand)
        radicand = 0.0
    return noise.e_z_norm + noise.e_v_norm + float(np.sqrt(radicand)), radicand


def delta_zv(zt, vt, noise: NoiseInfo, fs: FrequencySet) -> float:
    """Noise threshold: ``||e_z|| + ||e_v|| + sqrt(||v~||^2 + ||z~||^2 - 2 max_s score_s)``."""
    scores = fourier_scores(np.asarray(zt, dtype=np.complex128), np.asarray(vt, dtype=np.complex128), fs)
    return _delta_from_scores(zt, vt, noise, float(np.max(scores)))[0]


def certify_noisy(
    estimate: ShiftEstimate,
    zt,
    vt,
    noise: NoiseInfo,
    fs: FrequencySet,
    margin_tol: float = 0.0,
) -> RecoveryCertificate:
    """Certify a partial Fourier estimate computed from noisy measurements.

    The compressed dictionary of the noisy reference is built from ``vt``
    alone (column r is ``vt`` with phases ``exp(-2 pi j k_p r / n)``), so no
    time-domain lift of ``vt`` is ever formed.
    """
    if fs is None:
        raise ValueError("certify_noisy needs the frequency set")
    zt = np.asarray(zt, dtype=np.complex128)
    vt = np.asarray(vt, dtype=np.complex128)
    n = fs.n
    if estimate.scores.size != n:
        raise ValueError("estimate does not match the frequency set")
    delta, radicand = _delta_from_scores(zt, vt, noise, float(np.max(estimate.scores)))
    two_ev = 2.0 * noise.e_v_norm
    details = {
        "n": n,
        "m": fs.m,
        "ks": list(fs.ks),
        "s_star": int(estimate.s_star),
        "radicand": radicand,
        "e_z_norm": noise.e_z_norm,
        "e_v_norm": noise.e_v_norm,
        "noise_source": noise.source,
        "margin_tol": margin_tol,
    }
    if n < 2:
        details.update(column_gap=float("inf"), noise_unaffected=True, all_pairs_true_shift=True, per_column_true_shift=True)
        return RecoveryCertificate(True, 1.0, float("inf"), delta, two_ev, "true_shift_guaranteed", details)

    # commutation and tight-frame conditions hold exactly for partial Fourier rows
    prof = fourier_gap_profile(vt, fs)
    gap = float(np.min(prof[1:]))
    # distance from the s* column to column r depends on (r - s*) mod n only
    offsets = (np.arange(n) - estimate.s_star) % n
    col = prof[offsets]
    col[estimate.s_star] = np.inf
    col_gap = float(np.min(col))

    unaffected = gap > delta + margin_tol
    all_pairs = unaffected and gap > two_ev + margin_tol
    per_column = col_gap > max(delta, two_ev) + margin_tol
    if all_pairs:
        verdict = "true_shift_guaranteed"
    elif per_column:
        verdict = "per_column_true_shift"
    elif unaffected:
        verdict = "noise_unaffected"
    else:
        verdict = "inconclusive"
    details.update(
        column_gap=col_gap,
        noise_unaffected=bool(unaffected),
        all_pairs_true_shift=bool(all_pairs),
        per_column_true_shift=bool(per_column),
    )
    return RecoveryCertificate(True, 1.0, gap, delta, two_ev, verdict, details)


def certify_measurements(mp: MeasurementPair, estimate: ShiftEstimate, noise: NoiseInfo | None = None, **kw):
    """Convenience wrapper for Fourier-sampled measurement pairs."""
    return certify_noisy(estimate, mp.z, mp.v, noise or NoiseInfo.none(), mp.freqs, **kw)
