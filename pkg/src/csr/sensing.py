"""Sensing matrices, measurement, and the structural checks on them."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .signal import as_signal, shift_matrix

DEFAULT_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class FrequencySet:
    """Distinct DFT row indices ``ks`` out of ``0..n-1``."""

    n: int
    ks: tuple[int, ...]

    def __post_init__(self):
        ks = tuple(int(k) for k in self.ks)
        object.__setattr__(self, "ks", ks)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= len(ks) <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={len(ks)}, n={self.n}")
        if len(set(ks)) != len(ks):
            raise ValueError(f"frequency indices must be distinct: {ks}")
        if any(not 0 <= k < self.n for k in ks):
            raise ValueError(f"frequency indices must lie in [0, {self.n}): {ks}")

    @property
    def m(self) -> int:
        return len(self.ks)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.ks, dtype=np.int64)

    def coprime_ks(self) -> tuple[int, ...]:
        return tuple(k for k in self.ks if gcd(k, self.n) == 1)

    @classmethod
    def parse(cls, text: str, n: int) -> "FrequencySet":
        """Parse the comma-separated CLI form, e.g. ``"1,3,7"``."""
        try:
            ks = [int(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            raise ValueError(f"invalid frequency list {text!r}") from None
        return cls(n, tuple(ks))

    @classmethod
    def full(cls, n: int) -> "FrequencySet":
        return cls(n, tuple(range(n)))


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """An m x n compression operator; ``freqs`` is set for the partial Fourier kind."""

    entries: np.ndarray
    freqs: FrequencySet | None = None
    kind: str = field(init=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2:
            raise ValueError("sensing matrix must be two-dimensional")
        m, n = a.shape
        if not 1 <= m <= n:
            raise ValueError(f"sensing matrix must satisfy 1 <= m <= n, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("sensing matrix has non-finite entries")
        if self.freqs is not None and (self.freqs.n, self.freqs.m) != (n, m):
            raise ValueError("frequency set does not match matrix shape")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "kind", "generic" if self.freqs is None else "partial_fourier")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def H(self) -> np.ndarray:
        return self.entries.conj().T

    def scaled(self, c: float) -> "SensingMatrix":
        """Generic-kind copy multiplied by ``c``."""
        return SensingMatrix(self.entries * c)


def partial_fourier(fs: FrequencySet) -> SensingMatrix:
    """Rows ``(1/sqrt n) exp(-2 pi j k_p t / n)`` of the unitary DFT matrix."""
    t = np.arange(fs.n)
    idx = np.outer(fs.array, t) % fs.n
    return SensingMatrix(np.exp(-2j * np.pi * idx / fs.n) / np.sqrt(fs.n), freqs=fs)


def generic_matrix(entries) -> SensingMatrix:
    return SensingMatrix(entries)


def time_selection(n: int, rows) -> SensingMatrix:
    """Rows of the n x n identity: plain time-domain subsampling."""
    return SensingMatrix(np.eye(n)[list(rows)])


def measure(A: SensingMatrix, x) -> np.ndarray:
    """Compressed measurement ``A @ x``."""
    x = as_signal(x)
    if x.size != A.n:
        raise ValueError(f"dimension mismatch: matrix has n={A.n}, signal has {x.size}")
    return A.entries @ x


def measure_fourier(fs: FrequencySet, x) -> np.ndarray:
    """Fast path for partial Fourier measurement: pick bins of the unitary FFT."""
    x = as_signal(x)
    if x.size != fs.n:
        raise ValueError(f"dimension mismatch: n={fs.n}, signal has {x.size}")
    return np.fft.fft(x)[fs.array] / np.sqrt(fs.n)


def commutation_check(A: SensingMatrix, tol: float = DEFAULT_CHECK_TOL) -> tuple[bool, float]:
    """Whether A^H A commutes with every cyclic shift.

    Returns the verdict and the worst entrywise deviation
    ``max_s max|A^H A D^s - D^s A^H A|`` over s = 1..n.
    """
    G = A.H @ A.entries
    worst = 0.0
    for s in range(1, A.n + 1):
        D = shift_matrix(A.n, s)
        worst = max(worst, float(np.max(np.abs(G @ D - D @ G))))
    return worst <= tol, worst


def tight_frame_check(A: SensingMatrix, tol: float = DEFAULT_CHECK_TOL) -> float | None:
    """Return alpha with ``alpha A A^H = I`` (within ``tol``), or None."""
    G = A.entries @ A.H
    tr = float(np.real(np.trace(G)))
    if tr <= 0:
        return None
    alpha = A.m / tr
    if np.max(np.abs(alpha * G - np.eye(A.m))) > tol:
        return None
    return alpha


def min_norm_preimage(A: SensingMatrix, v) -> np.ndarray:
    """Minimum-norm x with ``A x = v`` (exact when A has full row rank)."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (A.m,):
        raise ValueError(f"dimension mismatch: expected {A.m} measurements, got {v.shape}")
    return np.linalg.pinv(A.entries) @ v


def shifted_dictionary(x) -> np.ndarray:
    """n x n matrix whose column r is ``cyclic_shift(x, r)``.

    Columns are indexed by shift, 0..n-1, so column index and hypothesis
    index coincide.
    """
    x = as_signal(x)
    n = x.size
    return np.stack([np.roll(x, r) for r in range(n)], axis=1)


def compress_dictionary(A: SensingMatrix, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != A.n:
        raise ValueError(f"dimension mismatch: matrix has n={A.n}, dictionary has shape {X.shape}")
    return A.entries @ X


def fourier_dictionary(v, fs: FrequencySet) -> np.ndarray:
    """Compressed dictionary from measurements alone: column r is ``v_p exp(-2 pi j k_p r / n)``.

    For a partial Fourier A this equals ``A @ shifted_dictionary(x)`` for any x
    with ``A x = v``.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (fs.m,):
        raise ValueError(f"dimension mismatch: expected {fs.m} measurements, got {v.shape}")
    idx = np.outer(fs.array, np.arange(fs.n)) % fs.n
    return v[:, None] * np.exp(-2j * np.pi * idx / fs.n)


def min_column_gap(M, exclude: int | None = None) -> tuple[float, tuple[int, int]]:
    """Smallest l2 distance between columns of ``M``.

    With ``exclude=None`` the minimum runs over all pairs; otherwise only over
    pairs (r, exclude), r != exclude. Returns the gap and the minimising pair.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[1] < 2:
        raise ValueError("need a matrix with at least two columns")
    n = M.shape[1]
    if exclude is None:
        diff = M[:, :, None] - M[:, None, :]
        dist = np.sqrt(np.sum(np.abs(diff) ** 2, axis=0))
        dist[np.diag_indices(n)] = np.inf
        r1, r2 = np.unravel_index(int(np.argmin(dist)), dist.shape)
        return float(dist[r1, r2]), (int(min(r1, r2)), int(max(r1, r2)))
    c = int(exclude) % n
    dist = np.sqrt(np.sum(np.abs(M - M[:, [c]]) ** 2, axis=0))
    dist[c] = np.inf
    r = int(np.argmin(dist))
    return float(dist[r]), (min(r, c), max(r, c))


def fourier_gap_profile(v, fs: FrequencySet) -> np.ndarray:
    """Column distance of the Fourier dictionary as a function of shift difference.

    ``profile[d]**2 = sum_p 4 |v_p|^2 sin^2(pi k_p d / n)``; the distance
    between columns r1 and r2 depends on ``(r1 - r2) mod n`` only.
    """
    v = np.asarray(v, dtype=np.complex128)
    return np.sqrt(np.maximum(_gap_weights(fs.n, fs.ks) @ (v.real**2 + v.imag**2), 0.0))


@lru_cache(maxsize=1024)
def _gap_weights(n: int, ks: tuple[int, ...]) -> np.ndarray:
    idx = np.outer(np.arange(n), np.array(ks, dtype=np.int64)) % n
    return 4.0 * np.sin(np.pi * idx / n) ** 2


def fourier_min_column_gap(v, fs: FrequencySet, exclude: int | None = None) -> tuple[float, tuple[int, int]]:
    """Fast equivalent of ``min_column_gap(fourier_dictionary(v, fs), exclude)``."""
    n = fs.n
    if n < 2:
        raise ValueError("need n >= 2")
    prof = fourier_gap_profile(v, fs)
    d = 1 + int(np.argmin(prof[1:]))
    gap = float(prof[d])
    if exclude is None:
        return gap, (0, d)
    c = int(exclude) % n
    # profile is symmetric (d and n-d); pick the partner column with smaller index
    r = min((c + d) % n, (c - d) % n, key=lambda r: (prof[(r - c) % n], r))
    return gap, (min(r, c), max(r, c))


def read_matrix_csv(path) -> SensingMatrix:
    """Read a generic sensing matrix: m rows of 2n interleaved ``re,im`` values."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) % 2:
                raise ValueError(f"{path}:{lineno}: odd number of columns ({len(row)})")
            if rows and len(row) != 2 * len(rows[0]):
                raise ValueError(f"{path}:{lineno}: ragged row")
            try:
                vals = np.array([float(c) for c in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            rows.append(vals[0::2] + 1j * vals[1::2])
    if not rows:
        raise ValueError(f"{path}: empty matrix")
    return SensingMatrix(np.array(rows))


def write_matrix_csv(path, A: SensingMatrix) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in A.entries:
            out = []
            for c in row:
                out += [f"{c.real:.17g}", f"{c.imag:.17g}"]
            w.writerow(out)
