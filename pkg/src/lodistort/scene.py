"""Multichannel scene simulation with stochastic tapped-delay-line impulse
responses.

The simulator is deliberately geometry-free: each microphone sees the source
through an impulse response with a unit direct-path tap at an integer delay
followed by an i.i.d. Gaussian tail whose envelope decays by 60 dB over the
requested T60.  Noise sources get their own independent responses.  All
randomness is keyed off (seed, stream, source index, mic index) so any piece
of a scene can be regenerated in isolation, bit-identically.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .stft import TimeSignal

# rng stream tags so source and noise responses never share draws
_SOURCE_STREAM = 0
_NOISE_STREAM = 1


@dataclass(frozen=True)
class RoomSpec:
    """Parameters of the simulated room.

    Attributes:
        num_mics: channel count P
        t60_seconds: reverberation time; 0 yields direct-path-only responses
        rir_len_samples: length of each impulse response
        direct_delay_samples: direct-path delay per mic; an int applies the
            same delay everywhere, a sequence gives one delay per mic
        seed: base seed for every random draw in the scene
        sample_rate_hz: sampling rate the responses are generated for
        tail_gain: amplitude of the Gaussian tail relative to the direct tap
    """

    num_mics: int
    t60_seconds: float
    rir_len_samples: int
    direct_delay_samples: object = 8
    seed: int = 0
    sample_rate_hz: int = 16000
    tail_gain: float = 0.05

    def __post_init__(self):
        if self.num_mics < 1:
            raise ValueError(f"num_mics must be >= 1, got {self.num_mics}")
        if self.t60_seconds < 0:
            raise ValueError(f"t60_seconds must be >= 0, got {self.t60_seconds}")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.tail_gain < 0:
            raise ValueError("tail_gain must be >= 0")
        delays = self.direct_delay_samples
        if np.isscalar(delays):
            delays = (int(delays),) * self.num_mics
        else:
            delays = tuple(int(d) for d in delays)
        if len(delays) != self.num_mics:
            raise ValueError(
                f"need one direct delay per mic, got {len(delays)} for "
                f"{self.num_mics} mics"
            )
        if min(delays) < 0:
            raise ValueError("direct delays must be nonnegative")
        if max(delays) >= self.rir_len_samples:
            raise ValueError(
                "rir_len_samples must exceed the largest direct delay "
                f"({max(delays)} >= {self.rir_len_samples})"
            )
        object.__setattr__(self, "direct_delay_samples", delays)


@dataclass
class Scene:
    """A rendered scene: mixture = direct_path + reverb_residual + noise."""

    mixture: TimeSignal
    direct_path: TimeSignal
    reverb_residual: TimeSignal
    noise: TimeSignal
    snr_db: float
    room: RoomSpec


def _tap_rir(room, delay, key):
    h = np.zeros(room.rir_len_samples)
    h[delay] = 1.0
    tail_len = room.rir_len_samples - delay - 1
    if room.t60_seconds > 0 and tail_len > 0:
        rng = np.random.default_rng(key)
        tau = np.arange(1, tail_len + 1) / room.sample_rate_hz
        envelope = np.exp(-3.0 * np.log(10.0) * tau / room.t60_seconds)
        h[delay + 1:] = room.tail_gain * envelope * rng.standard_normal(tail_len)
    return h


def generate_rir(room, mic_index):
    """Impulse response from the target source to one microphone."""
    if not 0 <= mic_index < room.num_mics:
        raise ValueError(f"mic_index {mic_index} out of range for {room.num_mics} mics")
    delay = room.direct_delay_samples[mic_index]
    return _tap_rir(room, delay, [room.seed, _SOURCE_STREAM, 0, mic_index])


def _noise_rir(room, noise_index, mic_index):
    delay = room.direct_delay_samples[mic_index]
    return _tap_rir(room, delay, [room.seed, _NOISE_STREAM, noise_index, mic_index])


def _as_mono(signal, room, role):
    if isinstance(signal, TimeSignal):
        if signal.sample_rate != room.sample_rate_hz:
            raise ValueError(
                f"{role} sample rate {signal.sample_rate} Hz does not match the "
                f"room rate {room.sample_rate_hz} Hz"
            )
        if signal.num_channels != 1:
            raise ValueError(f"{role} must be mono, got {signal.num_channels} channels")
        return signal.channel(0)
    arr = np.asarray(signal, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{role} must be a 1-D array or mono TimeSignal")
    return arr


def render_noise_component(noise, room, noise_index):
    """Convolve one noise source with its per-mic responses (unscaled).

    Regenerating a noise source at the same `noise_index` reproduces the exact
    taps used inside :func:`render_scene`, so components can be rendered alone
    and summed.
    """
    samples = _as_mono(noise, room, f"noise source {noise_index}")
    num = samples.shape[0]
    out = np.empty((num, room.num_mics))
    for m in range(room.num_mics):
        out[:, m] = fftconvolve(samples, _noise_rir(room, noise_index, m))[:num]
    return out


def render_scene(source, noise_sources, room, snr_db, normalize=True):
    """Render a scene from a mono source and a list of mono noise sources.

    The noise field is scaled so that the energy ratio of direct-path speech
    to total noise at the reference mic (mic 0) equals `snr_db`.  Passing
    snr_db=None skips that scaling (diagnostic mode); an empty noise list
    yields a noise-free scene.  With normalize=True the mixture's sample
    variance is brought to 1 and every component is scaled by the same factor,
    so mixture = direct + reverb + noise is preserved exactly.

    Return:
        Scene
    """
    src = _as_mono(source, room, "source")
    num = src.shape[0]
    if num == 0:
        raise ValueError("source must contain at least one sample")

    direct = np.zeros((num, room.num_mics))
    residual = np.zeros((num, room.num_mics))
    for m in range(room.num_mics):
        delay = room.direct_delay_samples[m]
        if delay < num:
            direct[delay:, m] = src[:num - delay]
        # convolve only the tail so t60 = 0 leaves the residual exactly zero
        tail = generate_rir(room, m)
        tail[delay] = 0.0
        if np.any(tail):
            residual[:, m] = fftconvolve(src, tail)[:num]

    noise = np.zeros((num, room.num_mics))
    for i, nz in enumerate(noise_sources):
        component = render_noise_component(nz, room, i)
        if component.shape[0] != num:
            raise ValueError(
                f"noise source {i} has {component.shape[0]} samples, expected {num}"
            )
        noise += component

    if snr_db is not None and not noise_sources:
        raise ValueError(
            "cannot reach the requested SNR without noise sources "
            "(pass snr_db=None for a noise-free scene)"
        )
    if noise_sources and snr_db is not None:
        direct_energy = float(np.sum(direct[:, 0] ** 2))
        noise_energy = float(np.sum(noise[:, 0] ** 2))
        if direct_energy <= 0.0:
            raise ValueError("source has no direct-path energy at the reference mic")
        if noise_energy <= 0.0:
            raise ValueError("cannot reach the requested SNR: noise has no energy")
        noise *= math.sqrt(direct_energy / noise_energy * 10.0 ** (-snr_db / 10.0))
        achieved_snr = float(snr_db)
    elif noise_sources:
        direct_energy = float(np.sum(direct[:, 0] ** 2))
        noise_energy = float(np.sum(noise[:, 0] ** 2))
        achieved_snr = (
            10.0 * math.log10(direct_energy / noise_energy)
            if noise_energy > 0 and direct_energy > 0
            else math.inf
        )
    else:
        achieved_snr = math.inf

    mixture = direct + residual + noise
    if normalize:
        variance = float(np.var(mixture))
        if variance > 0.0:
            factor = 1.0 / math.sqrt(variance)
            mixture = mixture * factor
            direct = direct * factor
            residual = residual * factor
            noise = noise * factor

    rate = room.sample_rate_hz
    return Scene(
        mixture=TimeSignal(mixture, rate),
        direct_path=TimeSignal(direct, rate),
        reverb_residual=TimeSignal(residual, rate),
        noise=TimeSignal(noise, rate),
        snr_db=achieved_snr,
        room=room,
    )


def _seed_key(seed, salt):
    return [int(s) for s in np.atleast_1d(seed)] + [salt]


def synth_speech_like(num_samples, sample_rate=16000, seed=0):
    """Amplitude-modulated Gaussian noise with a bursty, speech-ish envelope.

    The envelope interpolates syllable-rate (4 Hz) rectified-Gaussian control
    points, so frame power swings strongly while the carrier stays temporally
    white — the regime the power-weighted filters are built for.  RMS 1.
    """
    rng = np.random.default_rng(_seed_key(seed, 11))
    carrier = rng.standard_normal(num_samples)
    rate_hz = 4.0
    num_ctrl = max(2, int(math.ceil(num_samples * rate_hz / sample_rate)) + 1)
    ctrl = np.abs(rng.standard_normal(num_ctrl)) + 0.05  # floor: no dead air
    positions = np.linspace(0.0, num_ctrl - 1.0, num_samples)
    envelope = np.interp(positions, np.arange(num_ctrl), ctrl)
    out = carrier * envelope
    rms = np.sqrt(np.mean(out ** 2))
    return TimeSignal(out / max(rms, 1e-12), sample_rate)


def synth_noise(num_samples, sample_rate=16000, seed=0):
    """Stationary white Gaussian noise at unit RMS."""
    rng = np.random.default_rng(_seed_key(seed, 13))
    out = rng.standard_normal(num_samples)
    rms = np.sqrt(np.mean(out ** 2))
    return TimeSignal(out / max(rms, 1e-12), sample_rate)
