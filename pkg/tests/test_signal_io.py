"""WAV round trips, synthesis recipes, and the seeded noise generator."""

import struct

import numpy as np
import pytest

from dynlaw.embedding import EmbeddingConfig, TimeSeries, embed
from dynlaw.errors import AliasedFrequency, MalformedHeader, UnsupportedFormat
from dynlaw.signal_io import SynthSpec, lcg_uniform, read_wav, synthesize, write_wav
from dynlaw.spectral import correlation, eigendecompose, extract_law


def pack_wav(frames: bytes, channels=1, rate=8000, bits=16, audio_format=1) -> bytes:
    """Hand-rolled container so tests do not trust write_wav."""
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", audio_format, channels, rate, rate * block, block, bits)
    body = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(frames)) + frames
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def test_sample_scaling_extremes():
    raw = struct.pack("<3h", 0, -32768, 32767)
    series = read_wav(pack_wav(raw))
    np.testing.assert_array_equal(
        series.samples, [0.0, -1.0, 32767.0 / 32768.0]
    )
    assert series.sample_rate == 8000.0


def test_stereo_averages_to_mono():
    raw = struct.pack("<4h", 1000, 3000, -2000, 2000)
    series = read_wav(pack_wav(raw, channels=2))
    np.testing.assert_allclose(series.samples, [2000.0 / 32768.0, 0.0], atol=0)


def test_unsupported_formats_rejected():
    with pytest.raises(UnsupportedFormat):
        read_wav(pack_wav(b"\x00" * 8, audio_format=3))  # IEEE float
    with pytest.raises(UnsupportedFormat):
        read_wav(pack_wav(b"\x00" * 8, bits=8))
    with pytest.raises(UnsupportedFormat):
        read_wav(pack_wav(b"\x00" * 12, channels=3))


def test_malformed_containers_rejected():
    good = pack_wav(struct.pack("<2h", 1, 2))
    with pytest.raises(MalformedHeader):
        read_wav(good[:8])
    with pytest.raises(MalformedHeader):
        read_wav(b"RIFX" + good[4:])
    with pytest.raises(MalformedHeader):
        read_wav(pack_wav(b"\x00"))  # one byte is half a frame
    no_data = good[: good.index(b"data")]
    with pytest.raises(MalformedHeader):
        read_wav(no_data)
    with pytest.raises(MalformedHeader):
        read_wav(pack_wav(b"\x00\x00", rate=0))


def test_round_trip_within_one_step():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1.0, 1.0, size=500)
    back = read_wav(write_wav(TimeSeries(samples=x, sample_rate=44100.0)))
    assert back.sample_rate == 44100.0
    assert np.max(np.abs(back.samples - x)) <= 1.0 / 32768.0


def test_write_clamps_out_of_range():
    back = read_wav(write_wav(TimeSeries(samples=np.array([1.5, -1.5]), sample_rate=8000.0)))
    np.testing.assert_array_equal(back.samples, [32767.0 / 32768.0, -1.0])


def test_empty_series_round_trips():
    data = write_wav(TimeSeries(samples=np.array([]), sample_rate=8000.0))
    assert len(data) == 44  # header only, zero frames
    back = read_wav(data)
    assert back.samples.size == 0


def test_synthesize_sine_matches_closed_form():
    spec = SynthSpec(kind="sine", length=30, sample_rate=6.0, frequencies=(1.0,))
    series = synthesize(spec)
    np.testing.assert_allclose(
        series.samples, np.sin(np.pi / 3 * np.arange(30)), atol=1e-12
    )


def test_synthesize_constant():
    series = synthesize(SynthSpec(kind="constant", length=4, value=5.0))
    np.testing.assert_array_equal(series.samples, [5.0, 5.0, 5.0, 5.0])


def test_synthesize_damped_and_poly():
    t = np.arange(20, dtype=float)
    damped = synthesize(
        SynthSpec(kind="damped_sine", length=20, frequencies=(0.1,), decay=0.2)
    )
    np.testing.assert_allclose(
        damped.samples, np.sin(2 * np.pi * 0.1 * t) * np.exp(-0.2 * t), atol=1e-12
    )
    poly = synthesize(
        SynthSpec(kind="poly_exp", length=20, amplitudes=(2.0,), degree=2, decay=0.1)
    )
    np.testing.assert_allclose(poly.samples, 2.0 * t**2 * np.exp(-0.1 * t), atol=1e-12)


def test_lcg_matches_integer_recurrence():
    state = 42
    expected = []
    for _ in range(5):
        state = (6364136223846793005 * state + 1442695040888963407) % 2**64
        expected.append(state / 2.0**63 - 1.0)
    np.testing.assert_array_equal(lcg_uniform(42, 5), expected)


def test_noise_is_seed_deterministic():
    a = synthesize(SynthSpec(kind="uniform_noise", length=64, seed=42))
    b = synthesize(SynthSpec(kind="uniform_noise", length=64, seed=42))
    c = synthesize(SynthSpec(kind="uniform_noise", length=64, seed=43))
    np.testing.assert_array_equal(a.samples, b.samples)
    assert np.any(a.samples != c.samples)
    assert np.all(np.abs(a.samples) <= 1.0)


def test_nyquist_guard():
    with pytest.raises(AliasedFrequency):
        SynthSpec(kind="sine", length=10, sample_rate=8000.0, frequencies=(4000.0,))


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(kind="triangle", length=10)
    with pytest.raises(ValueError):
        SynthSpec(kind="sine", length=0, frequencies=(0.1,))
    with pytest.raises(ValueError):
        synthesize(SynthSpec(kind="sine", length=10, frequencies=(0.1, 0.2)))
    with pytest.raises(ValueError):
        synthesize(SynthSpec(kind="multi_sine", length=10))


@pytest.mark.parametrize("stride", [1, 2, 3])
def test_multi_sine_admits_exact_law_at_any_stride(stride):
    # a sum of l tones satisfies a 2l+1 weight recursion exactly,
    # whatever stride is used to resample it
    spec = SynthSpec(
        kind="multi_sine",
        length=400,
        sample_rate=100.0,
        amplitudes=(1.0, 0.6),
        frequencies=(3.0, 7.5),
        phases=(0.2, 1.1),
    )
    series = synthesize(spec)
    dataset = embed(series, EmbeddingConfig(n=4, stride=stride))
    c = correlation(dataset)
    law = extract_law(eigendecompose(c), dataset.config)
    assert law.eigenvalue < 1e-10 * np.trace(c.entries)
    assert law.stride == stride
