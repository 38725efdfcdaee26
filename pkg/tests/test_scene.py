"""Scene simulator tests: impulse-response structure, exact component
additivity, SNR control, and deterministic regeneration."""

import numpy as np
import pytest

from lodistort import (
    RoomSpec,
    TimeSignal,
    generate_rir,
    render_noise_component,
    render_scene,
    synth_noise,
    synth_speech_like,
)


def make_room(**kwargs):
    base = dict(num_mics=2, t60_seconds=0.3, rir_len_samples=2048,
                direct_delay_samples=(8, 11), seed=5)
    base.update(kwargs)
    return RoomSpec(**base)


def test_rir_direct_tap_and_causality():
    room = make_room()
    for mic, delay in [(0, 8), (1, 11)]:
        h = generate_rir(room, mic)
        assert h.shape == (2048,)
        assert np.all(h[:delay] == 0.0)  # nothing before the direct path
        assert h[delay] == 1.0
        assert np.any(h[delay + 1:] != 0.0)
    # different mics draw different tails
    assert not np.array_equal(generate_rir(room, 0)[:100], generate_rir(room, 1)[:100])
    # same mic regenerates bit-identically
    assert np.array_equal(generate_rir(room, 0), generate_rir(room, 0))


def test_rir_t60_zero_is_pure_delay():
    h = generate_rir(make_room(t60_seconds=0.0), 0)
    want = np.zeros(2048)
    want[8] = 1.0
    assert np.array_equal(h, want)


def test_rir_envelope_decay_statistics():
    """Tail power in a window around tau = t60 matches the -60 dB/t60 law.

    E|h(tau)|^2 = tail_gain^2 * exp(-6 ln10 tau / t60); averaging over many
    seeds puts the sample mean within a few percent of that.
    """
    t60 = 0.4
    fs = 16000
    delay = 8
    lo, hi = int(0.35 * fs) + delay, int(0.45 * fs) + delay
    total = 0.0
    num_seeds = 40
    for seed in range(num_seeds):
        room = make_room(num_mics=1, t60_seconds=t60, rir_len_samples=hi + 10,
                         direct_delay_samples=delay, seed=seed)
        h = generate_rir(room, 0)
        total += np.sum(h[lo:hi] ** 2)
    tau = (np.arange(lo, hi) - delay) / fs
    expected = num_seeds * np.sum(0.05**2 * np.exp(-6.0 * np.log(10.0) * tau / t60))
    assert abs(total / expected - 1.0) < 0.05


def test_additivity_and_unit_variance():
    room = make_room()
    scene = render_scene(
        synth_speech_like(8000, seed=3),
        [synth_noise(8000, seed=4), synth_noise(8000, seed=5)],
        room,
        snr_db=2.0,
    )
    resid = (scene.mixture.samples - scene.direct_path.samples
             - scene.reverb_residual.samples - scene.noise.samples)
    assert np.max(np.abs(resid)) < 1e-9
    assert abs(np.var(scene.mixture.samples) - 1.0) < 1e-9
    assert scene.mixture.samples.shape == (8000, 2)


def test_requested_snr_is_measured_snr():
    room = make_room(seed=9)
    scene = render_scene(
        synth_speech_like(8000, seed=1), [synth_noise(8000, seed=2)], room,
        snr_db=5.0,
    )
    direct = scene.direct_path.channel(0)
    noise = scene.noise.channel(0)
    measured = 10.0 * np.log10(np.sum(direct**2) / np.sum(noise**2))
    assert abs(measured - 5.0) < 0.01
    assert scene.snr_db == 5.0


def test_snr_none_measures_instead():
    room = make_room(seed=9)
    scene = render_scene(
        synth_speech_like(4000, seed=1), [synth_noise(4000, seed=2)], room,
        snr_db=None,
    )
    direct = scene.direct_path.channel(0)
    noise = scene.noise.channel(0)
    measured = 10.0 * np.log10(np.sum(direct**2) / np.sum(noise**2))
    assert abs(scene.snr_db - measured) < 1e-9


def test_noise_components_sum_linearly():
    room = make_room(seed=7)
    n1 = synth_noise(4000, seed=10)
    n2 = synth_noise(4000, seed=11)
    scene = render_scene(synth_speech_like(4000, seed=12), [n1, n2], room,
                         snr_db=None, normalize=False)
    summed = (render_noise_component(n1, room, 0)
              + render_noise_component(n2, room, 1))
    assert np.max(np.abs(scene.noise.samples - summed)) < 1e-12


def test_source_scaling_rescales_noise_to_hold_snr():
    room = make_room(seed=21)
    src = synth_speech_like(4000, seed=1)
    noises = [synth_noise(4000, seed=2)]
    a = render_scene(src, noises, room, snr_db=3.0, normalize=False)
    scaled = TimeSignal(2.0 * src.samples, src.sample_rate)
    b = render_scene(scaled, noises, room, snr_db=3.0, normalize=False)
    assert np.allclose(b.direct_path.samples, 2.0 * a.direct_path.samples)
    assert np.allclose(b.reverb_residual.samples, 2.0 * a.reverb_residual.samples)
    # the noise gain follows the source so the mixture is just scaled
    assert np.allclose(b.noise.samples, 2.0 * a.noise.samples)
    # with variance normalization the scale cancels entirely
    an = render_scene(src, noises, room, snr_db=3.0)
    bn = render_scene(scaled, noises, room, snr_db=3.0)
    assert np.allclose(bn.mixture.samples, an.mixture.samples, atol=1e-12)


def test_anechoic_noiseless_scene_is_direct_path():
    room = make_room(t60_seconds=0.0)
    scene = render_scene(synth_speech_like(4000, seed=6), [], room, snr_db=None)
    assert np.array_equal(scene.mixture.samples, scene.direct_path.samples)
    assert np.all(scene.reverb_residual.samples == 0.0)
    assert np.all(scene.noise.samples == 0.0)


def test_render_is_deterministic():
    def build():
        return render_scene(
            synth_speech_like(3000, seed=8),
            [synth_noise(3000, seed=9)],
            make_room(seed=33),
            snr_db=0.0,
        )

    a, b = build(), build()
    assert np.array_equal(a.mixture.samples, b.mixture.samples)
    assert np.array_equal(a.noise.samples, b.noise.samples)


def test_validation_errors():
    with pytest.raises(ValueError):
        RoomSpec(num_mics=2, t60_seconds=-0.1, rir_len_samples=100)
    with pytest.raises(ValueError):
        RoomSpec(num_mics=2, t60_seconds=0.3, rir_len_samples=8,
                 direct_delay_samples=(8, 9))  # delay beyond the response
    with pytest.raises(ValueError):
        RoomSpec(num_mics=3, t60_seconds=0.3, rir_len_samples=100,
                 direct_delay_samples=(1, 2))  # wrong delay count
    room = make_room()
    with pytest.raises(ValueError):
        render_scene(synth_speech_like(1000, seed=1), [], room, snr_db=5.0)
    with pytest.raises(ValueError):  # zero-energy source cannot meet an SNR
        render_scene(TimeSignal(np.zeros(1000), 16000),
                     [synth_noise(1000, seed=2)], room, snr_db=5.0)


def test_synth_sources_are_unit_power_and_seeded():
    speech = synth_speech_like(16000, seed=4)
    noise = synth_noise(16000, seed=4)
    assert abs(np.sqrt(np.mean(speech.samples**2)) - 1.0) < 1e-6
    assert abs(np.sqrt(np.mean(noise.samples**2)) - 1.0) < 1e-6
    assert np.array_equal(speech.samples, synth_speech_like(16000, seed=4).samples)
    # composite seed keys are accepted and distinct
    assert not np.array_equal(
        synth_noise(1000, seed=[4, 1]).samples,
        synth_noise(1000, seed=[4, 2]).samples,
    )
    # amplitude modulation makes frame power vary far more than white noise
    sp = speech.samples[: 16000 - 16000 % 400, 0].reshape(-1, 400)
    np_ = noise.samples[: 16000 - 16000 % 400, 0].reshape(-1, 400)
    assert np.std(np.mean(sp**2, axis=1)) > 5.0 * np.std(np.mean(np_**2, axis=1))
