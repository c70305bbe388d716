"""Compressive shift retrieval.

Estimate the cyclic shift between two signals directly from compressed
(notably partial Fourier) measurements, and certify when the estimate is
guaranteed to be the true shift.
"""

from .estimators import (
    MeasurementPair,
    ShiftEstimate,
    classical_test,
    compressed_test,
    equality_test,
    fourier_test,
    l0_oracle,
)
from .guarantees import NoiseInfo, RecoveryCertificate, certify_noise_free, certify_noisy, coprime_condition, delta_zv
from .sensing import FrequencySet, SensingMatrix, measure, partial_fourier
from .signal import classical_estimate, cyclic_shift, dft_coefficient, shift_matrix

__all__ = [
    "FrequencySet",
    "MeasurementPair",
    "NoiseInfo",
    "RecoveryCertificate",
    "SensingMatrix",
    "ShiftEstimate",
    "certify_noise_free",
    "certify_noisy",
    "classical_estimate",
    "classical_test",
    "compressed_test",
    "coprime_condition",
    "cyclic_shift",
    "delta_zv",
    "dft_coefficient",
    "equality_test",
    "fourier_test",
    "l0_oracle",
    "measure",
    "partial_fourier",
    "shift_matrix",
]
