"""First-stage target estimates.

The downstream filters only ever see an estimate of the target spectrogram;
where a learned estimator would normally sit, this module provides oracles
computed from the known target, optionally corrupted with complex Gaussian
error at a controlled energy ratio, or an estimate loaded from disk.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .specio import read_spectrogram
from .stft import StftConfig, analyze
from .wavio import read_wav

ORACLE_DIRECT = "oracleDirect"
ORACLE_MAG_MASK = "oracleMagMask"
ORACLE_PSM = "oraclePhaseSensitiveMask"
ORACLE_KINDS = (ORACLE_DIRECT, ORACLE_MAG_MASK, ORACLE_PSM)


@dataclass
class TargetEstimate:
    """A (possibly multichannel) estimate of the target spectrogram.

    Attributes:
        values: complex array, T x F x C
        kind: one of ORACLE_KINDS, "corrupted", or "external"
        ref_mic: reference channel index the estimate is anchored to
    """

    values: np.ndarray
    kind: str
    ref_mic: int = 0

    @property
    def num_channels(self):
        return self.values.shape[2]

    def channel(self, index=None):
        """T x F view of one channel (defaults to ref_mic, clamped for mono)."""
        if index is None:
            index = self.ref_mic
        if self.values.shape[2] == 1:
            index = 0
        return self.values[:, :, index]


def oracle_estimate(mixture, target, kind, ref_mic=0):
    """Build an oracle estimate of `target` from the known signals.

    oracleDirect passes the target through verbatim.  The mask oracles apply
    a per-channel real mask to the mixture: the magnitude mask |S|/|Y| or the
    phase-sensitive mask |S|/|Y| * cos(phase(S) - phase(Y)), each truncated to
    [0, 1].  Bins where the mixture is exactly zero get mask 0.

    Arguments:
        mixture, target: complex spectrograms, T x F x P
        kind: one of ORACLE_KINDS
    Return:
        TargetEstimate with P channels
    """
    mixture = np.asarray(mixture, dtype=np.complex128)
    target = np.asarray(target, dtype=np.complex128)
    if mixture.shape != target.shape:
        raise ValueError(
            f"mixture {mixture.shape} and target {target.shape} shapes differ"
        )
    if mixture.ndim != 3:
        raise ValueError(f"expected T x F x P spectrograms, got {mixture.shape}")
    if kind == ORACLE_DIRECT:
        return TargetEstimate(target.copy(), kind, ref_mic)
    if kind not in (ORACLE_MAG_MASK, ORACLE_PSM):
        raise ValueError(f"unknown oracle kind {kind!r}, expected one of {ORACLE_KINDS}")

    mix_mag = np.abs(mixture)
    nonzero = mix_mag > 0.0
    ratio = np.where(nonzero, np.abs(target) / np.where(nonzero, mix_mag, 1.0), 0.0)
    if kind == ORACLE_PSM:
        ratio = ratio * np.cos(np.angle(target) - np.angle(mixture))
    mask = np.clip(ratio, 0.0, 1.0)
    return TargetEstimate(mask * mixture, kind, ref_mic)


def corrupt_estimate(estimate, est_err_snr_db, seed):
    """Add complex Gaussian error at a fixed estimate-to-error energy ratio.

    The added error is scaled so 10*log10(|clean|^2 / |added|^2) equals
    `est_err_snr_db`; +inf returns the input values unchanged.
    """
    if math.isinf(est_err_snr_db) and est_err_snr_db < 0:
        raise ValueError("est_err_snr_db must be finite or +inf")
    values = np.asarray(estimate.values, dtype=np.complex128)
    if math.isinf(est_err_snr_db):
        return TargetEstimate(values.copy(), "corrupted", estimate.ref_mic)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)
    clean_energy = float(np.sum(np.abs(values) ** 2))
    noise_energy = float(np.sum(np.abs(noise) ** 2))
    scale = 0.0
    if noise_energy > 0.0:
        scale = math.sqrt(clean_energy * 10.0 ** (-est_err_snr_db / 10.0) / noise_energy)
    return TargetEstimate(values + scale * noise, "corrupted", estimate.ref_mic)


def load_external_estimate(path, expected_shape, cfg=None, ref_mic=0):
    """Load an estimate from an LDSPEC1 spectrogram or a WAV file.

    WAV input is analyzed through the canonical STFT.  The result must match
    the mixture's frame/bin counts and carry either 1 channel or the full
    channel count.

    Arguments:
        expected_shape: (T, F, P) of the mixture the estimate belongs to
    """
    num_frames, num_bins, num_channels = expected_shape
    if str(path).endswith(".wav"):
        cfg = cfg or StftConfig()
        values = analyze(read_wav(path, expect_rate=cfg.sample_rate), cfg)
    else:
        values = read_spectrogram(path)
    if values.shape[:2] != (num_frames, num_bins):
        raise FormatError(
            f"{path}: estimate frames/bins {values.shape[:2]} do not match the "
            f"mixture {(num_frames, num_bins)}"
        )
    if values.shape[2] not in (1, num_channels):
        raise FormatError(
            f"{path}: estimate has {values.shape[2]} channels, expected 1 or "
            f"{num_channels}"
        )
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: estimate contains non-finite values")
    return TargetEstimate(values, "external", ref_mic)
