"""Frequency-domain beamformers: distortionless (MVDR and its power-weighted
variant), GEV with blind analytic normalization, and the multichannel Wiener
filter.

Weights are stored conjugated-application style: the beamformer output is
w(f)^H Z(t,f), implemented by apply_beamformer.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .linalg import (
    cholesky_stack,
    hermitize,
    load_hermitian,
    principal_eigenpairs,
    rotate_reference_phase,
    solve_stack,
    time_outer,
)

DEFAULT_LOADING = 1e-8


@dataclass
class BeamformerWeights:
    """Per-frequency beamforming weights.

    Attributes:
        weights: complex array, F x P
        ref_mic: reference channel the weights are anchored to
        kind: "mvdr", "wmpdr", "gev", or "mcwf"
    """

    weights: np.ndarray
    ref_mic: int
    kind: str


def _check_square(mats, name):
    mats = np.asarray(mats, dtype=np.complex128)
    if mats.ndim != 3 or mats.shape[-1] != mats.shape[-2]:
        raise ValueError(f"{name} must be F x P x P, got shape {mats.shape}")
    return mats


def _distortionless(phi, steering, ref_mic, loading, kind):
    phi = _check_square(phi, "covariance")
    steering = np.asarray(steering, dtype=np.complex128)
    if steering.shape != phi.shape[:2]:
        raise ValueError(
            f"steering shape {steering.shape} does not match covariance "
            f"{phi.shape[:2]}"
        )
    if not 0 <= ref_mic < phi.shape[-1]:
        raise ValueError(f"ref_mic {ref_mic} out of range")
    num = solve_stack(load_hermitian(phi, loading), steering)  # F x P
    den = np.einsum("fp,fp->f", np.conj(steering), num).real
    if np.any(den <= 0.0):
        bad = int(np.flatnonzero(den <= 0.0)[0])
        raise SingularMatrixError(
            f"non-positive quadratic form at frequency bin {bad} "
            "(zero steering vector or indefinite covariance)",
            frequency_bin=bad,
        )
    weights = num / den[:, None] * np.conj(steering[:, ref_mic])[:, None]
    return BeamformerWeights(weights, ref_mic, kind)


def mvdr(cov, ref_mic=0, loading=DEFAULT_LOADING):
    """Minimum-variance distortionless beamformer.

        w(f) = (phi_v^-1 d) / (d^H phi_v^-1 d) * conj(d_q)

    phi_v gets relative diagonal loading before the solve.  The weights
    satisfy w^H d = d_q exactly, so the target component at the reference
    mic passes through unchanged.

    Arguments:
        cov: CovarianceSet; cov.steering is used when present, otherwise
            derived from cov.phi_s
    """
    steering = cov.steering
    if steering is None:
        from .stats import steering_vector

        steering = steering_vector(cov.phi_s, ref_mic)
    return _distortionless(cov.phi_v, steering, ref_mic, loading, "mvdr")


def wmpdr(phi_y_prime, steering, ref_mic=0, loading=DEFAULT_LOADING):
    """Distortionless beamformer on the power-weighted observation covariance.

    Same ratio as mvdr with phi_v replaced by phi_y_prime
    (see stats.weighted_covariance).
    """
    return _distortionless(phi_y_prime, steering, ref_mic, loading, "wmpdr")


def gev_ban(cov, ref_mic=0, loading=DEFAULT_LOADING):
    """Generalized-eigenvector beamformer with blind analytic normalization.

    The principal generalized eigenvector of (phi_s, phi_v) is computed by
    whitening with the Cholesky factor of the loaded phi_v (solve the
    Hermitian problem L^-1 phi_s L^-H, then map back), unit-normalized, and
    rotated so its reference entry is real nonnegative.  The returned weights
    are pre-multiplied by the BAN gain

        c = sqrt(w^H phi_v phi_v w / P) / (w^H phi_v w)

    computed on the unloaded phi_v; c is real and nonnegative by construction.
    """
    phi_s = _check_square(cov.phi_s, "phi_s")
    phi_v = _check_square(cov.phi_v, "phi_v")
    if phi_s.shape != phi_v.shape:
        raise ValueError("phi_s and phi_v shapes differ")
    num_mics = phi_s.shape[-1]
    if not 0 <= ref_mic < num_mics:
        raise ValueError(f"ref_mic {ref_mic} out of range")

    chol = cholesky_stack(load_hermitian(phi_v, loading))
    half = solve_stack(chol, phi_s)  # L^-1 phi_s
    whitened = solve_stack(chol, np.conj(np.swapaxes(half, -1, -2)))
    _, vectors, _ = principal_eigenpairs(hermitize(whitened))
    # back-substitute out of the whitened coordinates: w = L^-H u
    weights = solve_stack(np.conj(np.swapaxes(chol, -1, -2)), vectors)
    weights /= np.linalg.norm(weights, axis=1, keepdims=True)
    weights = rotate_reference_phase(weights, ref_mic)

    propagated = np.einsum("fpq,fq->fp", phi_v, weights)
    num = np.sqrt(np.sum(np.abs(propagated) ** 2, axis=1) / num_mics)
    den = np.einsum("fp,fp->f", np.conj(weights), propagated).real
    gain = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    return BeamformerWeights(weights * gain[:, None], ref_mic, "gev")


def mcwf(field, target_q, ref_mic=0, loading=DEFAULT_LOADING):
    """Multichannel Wiener filter regressing the field onto a target.

    Solves the per-frequency normal equations

        (Sum_t Z Z^H + load) w = Sum_t Z conj(target)

    so w^H Z is the least-squares approximation of the target.

    Arguments:
        field: complex spectrogram, T x F x P
        target_q: complex target, T x F
    """
    field = np.asarray(field, dtype=np.complex128)
    target_q = np.asarray(target_q, dtype=np.complex128)
    if field.ndim != 3:
        raise ValueError(f"field must be T x F x P, got shape {field.shape}")
    if target_q.shape != field.shape[:2]:
        raise ValueError(
            f"target shape {target_q.shape} does not match field frames/bins "
            f"{field.shape[:2]}"
        )
    gram = hermitize(time_outer(field, field))
    rhs = np.einsum("tfp,tf->fp", field, np.conj(target_q))
    weights = solve_stack(load_hermitian(gram, loading), rhs)
    return BeamformerWeights(weights, ref_mic, "mcwf")


def apply_beamformer(weights, field):
    """Apply w^H to every frame: out(t,f) = Sum_p conj(w(f,p)) Z(t,f,p)."""
    field = np.asarray(field, dtype=np.complex128)
    w = np.asarray(weights.weights)
    if field.ndim != 3:
        raise ValueError(f"field must be T x F x P, got shape {field.shape}")
    if w.shape != (field.shape[1], field.shape[2]):
        raise ValueError(
            f"weights {w.shape} do not match field bins/channels "
            f"{(field.shape[1], field.shape[2])}"
        )
    return np.einsum("fp,tfp->tf", np.conj(w), field)
