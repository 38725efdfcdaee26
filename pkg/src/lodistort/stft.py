"""Time-frequency analysis and synthesis.

Array conventions used throughout the package:

* time signals carry float64 samples of shape N x C (samples x channels),
* spectrograms are complex128 arrays of shape T x F x C
  (frames x frequency bins x channels).

The analysis/synthesis pair uses the square root of a periodic Hann window on
both sides, so the overlap-added window product is Hann and sums to a constant
over the signal payload.  The signal is zero-padded front and back by
(window - hop) samples before framing; this puts every payload sample under a
full complement of overlapping windows and makes reconstruction exact up to
float64 rounding.
"""

from dataclasses import dataclass

import numpy as np

# Floor for the overlap-add window-power denominator.
COLA_FLOOR = 1e-12


@dataclass
class TimeSignal:
    """A sampled multichannel signal.

    Attributes:
        samples: N x C float64 array (mono input is reshaped to N x 1)
        sample_rate: sampling rate in Hz
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2:
            raise ValueError(
                f"samples must be 1-D or 2-D (N x C), got shape {samples.shape}"
            )
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        self.samples = samples

    @property
    def num_samples(self):
        return self.samples.shape[0]

    @property
    def num_channels(self):
        return self.samples.shape[1]

    def channel(self, index):
        # 1-D view of a single channel
        return self.samples[:, index]


@dataclass(frozen=True)
class StftConfig:
    """Analysis parameters: 32 ms sqrt-Hann frames, 8 ms hop at 16 kHz."""

    window_len: int = 512
    hop: int = 128
    fft_len: int = 512
    sample_rate: int = 16000

    def __post_init__(self):
        if min(self.window_len, self.hop, self.fft_len, self.sample_rate) <= 0:
            raise ValueError("all StftConfig fields must be positive")
        if self.hop > self.window_len:
            raise ValueError("hop must not exceed window_len")
        if self.window_len % self.hop:
            raise ValueError("hop must divide window_len evenly")
        if self.fft_len < self.window_len:
            raise ValueError("fft_len must be at least window_len")

    @property
    def num_bins(self):
        # one-sided spectrum size
        return self.fft_len // 2 + 1

    @property
    def pad(self):
        # zero padding applied before the first and after the last sample
        return self.window_len - self.hop

    def num_frames(self, num_samples):
        """Frame count for a signal of `num_samples` samples."""
        padded = num_samples + 2 * self.pad
        return -(-padded // self.hop)


def sqrt_hann_window(length):
    """Square root of the periodic Hann window.

    Arguments:
        length: window length in samples
    Return:
        float64 array of shape [length]
    """
    n = np.arange(length)
    hann = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)
    return np.sqrt(hann)


def _as_samples(signal, cfg):
    if isinstance(signal, TimeSignal):
        if cfg is not None and signal.sample_rate != cfg.sample_rate:
            raise ValueError(
                f"sample rate mismatch: signal has {signal.sample_rate} Hz, "
                f"config expects {cfg.sample_rate} Hz (resampling not supported)"
            )
        return signal.samples
    samples = np.asarray(signal, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D signal, got shape {samples.shape}")
    return samples


def analyze(signal, cfg=StftConfig()):
    """Short-time Fourier transform of a (multichannel) signal.

    Arguments:
        signal: TimeSignal or array of shape [N] / [N x C]
        cfg: StftConfig
    Return:
        complex128 spectrogram, T x F x C
    """
    samples = _as_samples(signal, cfg)
    num_samples, num_channels = samples.shape
    if num_samples == 0:
        raise ValueError("cannot analyze an empty signal")

    num_frames = cfg.num_frames(num_samples)
    # buffer long enough that the last frame has a full window of samples
    buf_len = (num_frames - 1) * cfg.hop + cfg.window_len
    buf = np.zeros((buf_len, num_channels))
    buf[cfg.pad:cfg.pad + num_samples] = samples

    offsets = cfg.hop * np.arange(num_frames)
    frame_idx = offsets[:, None] + np.arange(cfg.window_len)[None, :]  # T x W
    frames = buf[frame_idx]  # T x W x C
    window = sqrt_hann_window(cfg.window_len)
    return np.fft.rfft(frames * window[None, :, None], n=cfg.fft_len, axis=1)


def synthesize(spectrogram, cfg=StftConfig(), num_samples=None):
    """Inverse STFT via windowed overlap-add.

    The overlap-added window power is computed per output sample and floored
    at COLA_FLOOR before division, so partially covered edge samples never
    divide by zero.

    Arguments:
        spectrogram: complex array, T x F or T x F x C
        cfg: StftConfig
        num_samples: output length; the result is truncated or zero-padded
            to this many samples.  Defaults to the longest length whose
            analysis would produce T frames.
    Return:
        TimeSignal of shape num_samples x C
    """
    spec = np.asarray(spectrogram, dtype=np.complex128)
    if spec.ndim == 2:
        spec = spec[:, :, None]
    if spec.ndim != 3:
        raise ValueError(f"expected T x F (x C) spectrogram, got shape {spec.shape}")
    num_frames, num_bins, num_channels = spec.shape
    if num_bins != cfg.num_bins:
        raise ValueError(
            f"spectrogram has {num_bins} bins but config expects {cfg.num_bins}"
        )
    if num_samples is None:
        num_samples = max(1, num_frames * cfg.hop - 2 * cfg.pad)

    window = sqrt_hann_window(cfg.window_len)
    frames = np.fft.irfft(spec, n=cfg.fft_len, axis=1)[:, :cfg.window_len, :]
    frames *= window[None, :, None]

    buf_len = (num_frames - 1) * cfg.hop + cfg.window_len
    buf = np.zeros((buf_len, num_channels))
    win_power = np.zeros(buf_len)
    win_sq = window ** 2
    for t in range(num_frames):
        start = t * cfg.hop
        buf[start:start + cfg.window_len] += frames[t]
        win_power[start:start + cfg.window_len] += win_sq
    buf /= np.maximum(win_power, COLA_FLOOR)[:, None]

    out = np.zeros((num_samples, num_channels))
    avail = min(num_samples, buf_len - cfg.pad)
    if avail > 0:
        out[:avail] = buf[cfg.pad:cfg.pad + avail]
    return TimeSignal(out, cfg.sample_rate)
