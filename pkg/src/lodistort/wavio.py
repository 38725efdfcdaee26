"""RIFF WAV reading and writing (PCM 16-bit and IEEE float 32-bit)."""

import io

import numpy as np
from scipy.io import wavfile

from .errors import FormatError
from .fsio import atomic_write_bytes
from .stft import TimeSignal

_PCM16_SCALE = 32768.0


def read_wav(path, expect_rate=None):
    """Read a WAV file into a TimeSignal.

    PCM16 samples are scaled to [-1, 1); float32 samples pass through.
    Other encodings raise FormatError.  If `expect_rate` is given, a
    differing file rate raises ValueError (resampling is out of scope).
    """
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise FormatError(f"{path}: not a readable WAV file ({exc})") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise FormatError(
            f"{path}: unsupported WAV sample format {data.dtype} "
            "(only PCM16 and float32 are handled)"
        )
    signal = TimeSignal(samples, int(rate))
    if expect_rate is not None and signal.sample_rate != expect_rate:
        raise ValueError(
            f"{path}: sample rate {signal.sample_rate} Hz does not match the "
            f"expected {expect_rate} Hz (resampling not supported)"
        )
    return signal


def write_wav(path, signal, encoding="float32"):
    """Write a TimeSignal to `path` atomically.

    Arguments:
        signal: TimeSignal (mono signals produce a 1-channel file)
        encoding: "float32" (default, lossless for our pipeline) or "pcm16"
    """
    if not isinstance(signal, TimeSignal):
        raise TypeError("write_wav expects a TimeSignal")
    samples = signal.samples
    if samples.shape[1] == 1:
        samples = samples[:, 0]
    if encoding == "float32":
        data = samples.astype(np.float32)
    elif encoding == "pcm16":
        scaled = np.round(samples * _PCM16_SCALE)
        data = np.clip(scaled, -32768, 32767).astype(np.int16)
    else:
        raise ValueError(f"unknown WAV encoding {encoding!r}")
    buf = io.BytesIO()
    wavfile.write(buf, signal.sample_rate, data)
    atomic_write_bytes(path, buf.getvalue())
