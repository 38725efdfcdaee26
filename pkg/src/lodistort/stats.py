"""Spatial statistics: covariance matrices, ratio masks, steering vectors,
and floored power weights.

Covariances are plain sums of per-frame outer products (no 1/T); every
downstream weight is a ratio in which the scale cancels.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import (
    hermitize,
    principal_eigenpairs,
    rotate_reference_phase,
    time_outer,
)

# absolute floor applied after the relative one
PSD_ABS_FLOOR = 1e-12


@dataclass
class CovarianceSet:
    """Per-frequency second-order statistics.

    Attributes:
        phi_s: target covariance, F x P x P Hermitian
        phi_v: distortion (noise + residual) covariance, F x P x P Hermitian
        steering: optional unit-norm steering vectors, F x P
        phi_y_prime: optional power-weighted observation covariance, F x P x P
    """

    phi_s: np.ndarray
    phi_v: np.ndarray
    steering: np.ndarray = None
    phi_y_prime: np.ndarray = None


def _check_field(field, name):
    arr = np.asarray(field, dtype=np.complex128)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be T x F x P, got shape {arr.shape}")
    return arr


def signal_covariances(mixture, estimate):
    """Covariances from a multichannel target estimate.

    phi_s accumulates the estimate's outer products; phi_v those of the
    residual (mixture - estimate).

    Arguments:
        mixture, estimate: complex spectrograms, T x F x P
    Return:
        CovarianceSet (steering left unset)
    """
    mixture = _check_field(mixture, "mixture")
    estimate = _check_field(estimate, "estimate")
    if mixture.shape != estimate.shape:
        raise ValueError(
            f"mixture {mixture.shape} and estimate {estimate.shape} shapes differ"
        )
    residual = mixture - estimate
    phi_s = hermitize(time_outer(estimate, estimate))
    phi_v = hermitize(time_outer(residual, residual))
    return CovarianceSet(phi_s=phi_s, phi_v=phi_v)


def compute_mask(estimate_q, reference_q):
    """Single-channel ratio mask |est| / (|est| + |ref - est|), in [0, 1].

    Bins where both terms vanish get mask 0.
    """
    estimate_q = np.asarray(estimate_q)
    reference_q = np.asarray(reference_q)
    if estimate_q.shape != reference_q.shape:
        raise ValueError("estimate and reference shapes differ")
    num = np.abs(estimate_q)
    den = num + np.abs(reference_q - estimate_q)
    return np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)


def masked_covariances(field, mask):
    """Mask-weighted covariances of one observed field.

    phi_s weights outer products by the mask, phi_v by its complement:
        phi_s(f) = Sum_t m(t,f) Z(t,f) Z(t,f)^H
        phi_v(f) = Sum_t (1 - m(t,f)) Z(t,f) Z(t,f)^H

    Arguments:
        field: complex spectrogram, T x F x P
        mask: real weights in [0, 1], T x F
    Return:
        CovarianceSet (steering left unset)
    """
    field = _check_field(field, "field")
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != field.shape[:2]:
        raise ValueError(
            f"mask shape {mask.shape} does not match field frames/bins "
            f"{field.shape[:2]}"
        )
    if mask.min() < 0.0 or mask.max() > 1.0:
        raise ValueError("mask values must lie in [0, 1]")
    weighted = field * mask[:, :, None]
    complement = field * (1.0 - mask)[:, :, None]
    phi_s = hermitize(time_outer(weighted, field))
    phi_v = hermitize(time_outer(complement, field))
    return CovarianceSet(phi_s=phi_s, phi_v=phi_v)


def weighted_covariance(field, psd):
    """Power-normalized covariance Sum_t Z(t,f) Z(t,f)^H / psd(t,f).

    `psd` must be strictly positive (run it through psd_floor first).
    """
    field = _check_field(field, "field")
    psd = np.asarray(psd, dtype=np.float64)
    if psd.shape != field.shape[:2]:
        raise ValueError("psd shape does not match field frames/bins")
    if psd.min() <= 0.0:
        raise ValueError("psd must be strictly positive; apply psd_floor first")
    return hermitize(time_outer(field / psd[:, :, None], field))


def steering_vector(phi_s, ref_mic=0, degeneracy_rtol=1e-6):
    """Unit-norm principal eigenvector of phi_s per frequency.

    The phase is fixed by rotating each vector so its `ref_mic` entry is real
    and nonnegative.  Frequencies whose top two eigenvalues (nearly) coincide
    have no preferred direction; the deterministic eigensolver choice is
    returned and a RuntimeWarning flags the degeneracy.

    Arguments:
        phi_s: Hermitian stack, F x P x P
    Return:
        complex steering vectors, F x P
    """
    phi_s = np.asarray(phi_s, dtype=np.complex128)
    if phi_s.ndim != 3 or phi_s.shape[-1] != phi_s.shape[-2]:
        raise ValueError(f"phi_s must be F x P x P, got shape {phi_s.shape}")
    if not 0 <= ref_mic < phi_s.shape[-1]:
        raise ValueError(f"ref_mic {ref_mic} out of range")
    top, vectors, gaps = principal_eigenpairs(phi_s)
    scale = np.maximum(np.abs(top), PSD_ABS_FLOOR)
    degenerate = gaps <= degeneracy_rtol * scale
    if np.any(degenerate):
        bins = np.flatnonzero(degenerate)
        warnings.warn(
            f"principal eigenspace is degenerate at {bins.size} frequency "
            f"bin(s) (first: {bins[0]}); steering there is an arbitrary "
            "deterministic choice",
            RuntimeWarning,
            stacklevel=2,
        )
    return rotate_reference_phase(vectors, ref_mic)


def psd_floor(estimates, epsilon=1e-5):
    """Per-bin target power, floored relative to its own maximum.

    The power is summed over channels when given a T x F x P field and taken
    directly for a T x F single-channel array.  The floor is
    max(epsilon * max power, power), with an absolute floor of PSD_ABS_FLOOR
    so an all-zero input still yields strictly positive weights.

    Return:
        float64 array, T x F, strictly positive
    """
    estimates = np.asarray(estimates)
    if estimates.ndim == 2:
        power = np.abs(estimates) ** 2
    elif estimates.ndim == 3:
        power = np.sum(np.abs(estimates) ** 2, axis=2)
    else:
        raise ValueError(
            f"expected T x F or T x F x P estimates, got shape {estimates.shape}"
        )
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    floored = np.maximum(epsilon * power.max(), power)
    return np.maximum(floored, PSD_ABS_FLOOR)
