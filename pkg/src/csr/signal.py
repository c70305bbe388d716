"""Complex signals, the cyclic shift operator and the uncompressed baseline.

Shift direction: ``cyclic_shift(x, 1)`` maps ``[1, 2, 3, 4]`` to
``[4, 1, 2, 3]``, i.e. output[t] = x[(t - l) mod n]. Every DFT phase sign
downstream (``e^{-2 pi j k l / n}`` for a delay of ``l``) follows from this.

The DFT is unitary throughout: coefficients carry a ``1/sqrt(n)`` factor.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

DEFAULT_TIE_TOL = 1e-9


def as_signal(values) -> np.ndarray:
    """Validate ``values`` and return a read-only complex128 vector."""
    x = np.array(values, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError(f"signal must be one-dimensional, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("signal must have at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains NaN or Inf")
    x.flags.writeable = False
    return x


def normalize_shift(l: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return int(l) % n


def _check_same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")


def cyclic_shift(x, l: int) -> np.ndarray:
    """Apply D^l: delay ``x`` by ``l`` samples cyclically."""
    x = as_signal(x)
    out = np.roll(x, normalize_shift(l, x.size))
    out.flags.writeable = False
    return out


def shift_matrix(n: int, l: int) -> np.ndarray:
    """Dense permutation matrix D^l with ``shift_matrix(n, l) @ x == cyclic_shift(x, l)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.roll(np.eye(n), normalize_shift(l, n), axis=0)


def dft_coefficient(x, k: int) -> complex:
    """Unitary DFT coefficient ``(1/sqrt n) sum_t x_t exp(-2 pi j k t / n)`` by direct summation."""
    x = as_signal(x)
    n = x.size
    if not 0 <= k < n:
        raise ValueError(f"frequency index {k} out of range for n={n}")
    t = np.arange(n)
    # reduce k*t mod n before the exponential so phases are exact
    phase = np.exp(-2j * np.pi * ((k * t) % n) / n)
    return complex(np.sum(x * phase) / np.sqrt(n))


def argmax_smallest(scores: np.ndarray, tie_tol: float = DEFAULT_TIE_TOL) -> int:
    """Index of the maximum; among entries within ``tie_tol`` of it, the smallest index."""
    best = np.max(scores)
    return int(np.flatnonzero(scores >= best - tie_tol)[0])


def margin_of(scores: np.ndarray, s_star: int) -> float:
    """Best score minus the best score over all other shifts (0 when n == 1)."""
    if scores.size < 2:
        return 0.0
    others = scores.copy()
    others[s_star] = -np.inf
    return max(float(scores[s_star] - others.max()), 0.0)


def correlation_scores(x, y, method: str = "fft") -> np.ndarray:
    """Re<y, D^s x> for s = 0..n-1, with <a, b> = a^H b.

    ``method="fft"`` uses circular correlation through the FFT;
    ``method="direct"`` evaluates every inner product explicitly (O(n^2)).
    """
    x = as_signal(x)
    y = as_signal(y)
    _check_same_length(x, y)
    if method == "fft":
        return np.real(np.fft.fft(np.conj(np.fft.fft(y)) * np.fft.fft(x))) / x.size
    if method == "direct":
        return np.array([np.real(np.vdot(y, np.roll(x, s))) for s in range(x.size)])
    raise ValueError(f"unknown method {method!r}")


def classical_estimate(x, y, method: str = "fft", tie_tol: float = DEFAULT_TIE_TOL):
    """Classical shift estimate maximising the real cross-correlation.

    Returns:
        (s_star, scores): the argmax shift (ties to the smallest index)
        and the full length-n score vector.
    """
    scores = correlation_scores(x, y, method=method)
    return argmax_smallest(scores, tie_tol), scores


def classical_scores_counted(x, y):
    """Direct-evaluation correlation scores with a real-multiplication counter.

    Each term Re(conj(y_t) x_u) costs one real multiply when both signals
    are real and two otherwise, so the count is n^2 or 2 n^2.
    """
    x = as_signal(x)
    y = as_signal(y)
    _check_same_length(x, y)
    n = x.size
    real = not (np.any(x.imag) or np.any(y.imag))
    xs, ys = x.tolist(), y.tolist()
    scores = [0.0] * n
    count = 0
    for s in range(n):
        acc = 0.0
        for t in range(n):
            a, b = ys[t], xs[(t - s) % n]
            if real:
                acc += a.real * b.real
                count += 1
            else:
                acc += a.real * b.real + a.imag * b.imag
                count += 2
        scores[s] = acc
    return np.array(scores), count


def read_signal_csv(path) -> np.ndarray:
    """Read ``re[,im]`` rows (no header) into a signal; ragged rows are rejected."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) > 2:
                raise ValueError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(row)}")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"{path}:{lineno}: ragged row ({len(row)} columns, expected {width})")
            try:
                vals = [float(c) for c in row]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            rows.append(complex(vals[0], vals[1] if width == 2 else 0.0))
    if not rows:
        raise ValueError(f"{path}: no samples")
    return as_signal(rows)


def write_signal_csv(path, x) -> None:
    x = as_signal(x)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        for c in x:
            w.writerow([f"{c.real:.17g}", f"{c.imag:.17g}"])
