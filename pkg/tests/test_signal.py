import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complex_signals
from csr.signal import (
    as_signal,
    classical_estimate,
    classical_scores_counted,
    correlation_scores,
    cyclic_shift,
    dft_coefficient,
    read_signal_csv,
    shift_matrix,
    write_signal_csv,
)


@pytest.mark.parametrize(
    "l, expected",
    [(0, [1, 2, 3, 4]), (1, [4, 1, 2, 3]), (5, [4, 1, 2, 3]), (-1, [2, 3, 4, 1])],
)
def test_cyclic_shift_examples(l, expected):
    np.testing.assert_array_equal(cyclic_shift([1, 2, 3, 4], l), expected)


def test_shift_matrix_small():
    np.testing.assert_array_equal(shift_matrix(2, 0), np.eye(2))
    x = np.array([10.0, 20.0, 30.0])
    # rows select x3, x1, x2
    np.testing.assert_array_equal(shift_matrix(3, 1) @ x, [30, 10, 20])
    D = shift_matrix(4, 2)
    np.testing.assert_array_equal(D.T @ D, np.eye(4))


def test_shift_matrix_matches_block_form():
    # D^l = [[0, I_l], [I_{n-l}, 0]]
    n, l = 7, 3
    block = np.zeros((n, n))
    block[:l, n - l :] = np.eye(l)
    block[l:, : n - l] = np.eye(n - l)
    np.testing.assert_array_equal(shift_matrix(n, l), block)


@given(complex_signals(), st.integers(-50, 50))
def test_shift_matrix_equals_cyclic_shift(x, l):
    np.testing.assert_allclose(shift_matrix(x.size, l) @ x, cyclic_shift(x, l))


@given(complex_signals(), st.integers(-50, 50))
def test_shift_preserves_norm(x, l):
    assert np.isclose(np.linalg.norm(cyclic_shift(x, l)), np.linalg.norm(x))


@given(complex_signals(), st.integers(0, 40), st.integers(0, 40))
def test_shift_composition(x, l1, l2):
    np.testing.assert_array_equal(cyclic_shift(cyclic_shift(x, l1), l2), cyclic_shift(x, (l1 + l2) % x.size))


def test_signal_validation():
    with pytest.raises(ValueError):
        as_signal([])
    with pytest.raises(ValueError):
        as_signal([1.0, np.nan])
    with pytest.raises(ValueError):
        as_signal([[1, 2], [3, 4]])
    x = as_signal([1, 2])
    with pytest.raises(ValueError):
        x[0] = 5


def test_dft_coefficient_examples():
    assert dft_coefficient(np.ones(4), 0) == pytest.approx(2.0)
    assert abs(dft_coefficient(np.ones(4), 1)) < 1e-15
    with pytest.raises(ValueError):
        dft_coefficient(np.ones(4), 4)


def test_dft_coefficient_matches_fft(rng):
    x = rng.normal(size=12) + 1j * rng.normal(size=12)
    ref = np.fft.fft(x) / np.sqrt(12)
    np.testing.assert_allclose([dft_coefficient(x, k) for k in range(12)], ref, atol=1e-12)


def test_dft_shift_property(rng):
    n = 11
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    for l in range(n):
        for k in range(n):
            lhs = dft_coefficient(cyclic_shift(x, l), k)
            rhs = np.exp(-2j * np.pi * k * l / n) * dft_coefficient(x, k)
            assert abs(lhs - rhs) < 1e-12


def test_classical_identity():
    x = np.array([0.3, 1.2, -0.7, 2.0, 0.1])
    s, _ = classical_estimate(x, x)
    assert s == 0


def test_classical_uniform_signal(rng):
    x = rng.uniform(size=10)
    s, _ = classical_estimate(x, cyclic_shift(x, 5))
    assert s == 5


def test_fft_scores_equal_direct(rng):
    for n in (1, 2, 7, 16, 33):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        y = rng.normal(size=n) + 1j * rng.normal(size=n)
        np.testing.assert_allclose(correlation_scores(x, y, "fft"), correlation_scores(x, y, "direct"), atol=1e-9)
        counted, _ = classical_scores_counted(x, y)
        np.testing.assert_allclose(counted, correlation_scores(x, y, "direct"), atol=1e-9)


def test_classical_length_mismatch():
    with pytest.raises(ValueError):
        classical_estimate([1, 2, 3], [1, 2])


def test_classical_counts_are_quadratic(rng):
    for n in (4, 9, 20):
        x = rng.uniform(size=n)
        _, count_real = classical_scores_counted(x, np.roll(x, 1))
        assert count_real == n * n
        _, count_cplx = classical_scores_counted(x + 1j, x)
        assert count_cplx == 2 * n * n


@settings(max_examples=60)
@given(st.integers(2, 14), st.integers(0, 10_000))
def test_aperiodic_signal_recovers_every_shift(n, seed):
    x = np.random.default_rng(seed).normal(size=n)
    shifts = {tuple(np.roll(x, l)) for l in range(n)}
    if len(shifts) < n:
        return
    for l in range(n):
        assert classical_estimate(x, cyclic_shift(x, l))[0] == l


@given(complex_signals(min_size=2), complex_signals(min_size=2))
def test_argmax_corr_is_argmin_distance(x, y):
    n = min(x.size, y.size)
    x, y = x[:n], y[:n]
    scores = correlation_scores(x, y, "direct")
    dist = np.array([np.linalg.norm(y - np.roll(x, s)) ** 2 for s in range(n)])
    # ||y - D^s x||^2 = ||y||^2 + ||x||^2 - 2 Re<y, D^s x>
    np.testing.assert_allclose(dist, np.linalg.norm(y) ** 2 + np.linalg.norm(x) ** 2 - 2 * scores, atol=1e-8)


def test_csv_roundtrip(tmp_path, rng):
    x = rng.normal(size=6) + 1j * rng.normal(size=6)
    p = tmp_path / "x.csv"
    write_signal_csv(p, x)
    np.testing.assert_array_equal(read_signal_csv(p), x)


def test_csv_real_only_and_ragged(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("1\n2.5\n-3\n")
    np.testing.assert_array_equal(read_signal_csv(p), [1, 2.5, -3])
    p.write_text("1,0\n2\n")
    with pytest.raises(ValueError, match="ragged"):
        read_signal_csv(p)
    p.write_text("1,2,3\n")
    with pytest.raises(ValueError):
        read_signal_csv(p)
    p.write_text("")
    with pytest.raises(ValueError):
        read_signal_csv(p)
