import numpy as np
import pytest

from cineqc.errors import InsufficientFrames, InvalidConfig
from cineqc.kspace import (RANDOM, CorruptionSpec, corrupt_sequence, draw_frame_plan,
                           from_kspace, to_kspace)
from cineqc.phantom import PhantomConfig, generate_cine


def moving_phantom(seed=0, T=12, size=32):
    cfg = PhantomConfig(T=T, H=size, W=size, base_radius=6, pulsation_amplitude=2,
                        wall_thickness=2, noise_sigma=0.01, seed=seed)
    return generate_cine(cfg)[0]


def test_to_kspace_trivia():
    np.testing.assert_allclose(to_kspace(np.zeros((4, 4))), 0, atol=1e-12)
    grid = to_kspace(np.full((4, 4), 0.3))
    assert abs(grid[0, 0] - 16 * 0.3) < 1e-12
    assert np.abs(grid).sum() - abs(grid[0, 0]) < 1e-12


def test_parseval_between_domains():
    frame = moving_phantom()[0]
    k = to_kspace(frame)
    lhs = np.sum(frame ** 2)
    rhs = np.sum(np.abs(k) ** 2) / frame.size
    assert abs(lhs - rhs) / lhs < 1e-9


def test_from_kspace_roundtrip_nonnegative_image():
    frame = moving_phantom()[2]
    np.testing.assert_allclose(from_kspace(to_kspace(frame)), frame, atol=1e-9)
    np.testing.assert_allclose(from_kspace(np.zeros((5, 7), dtype=complex)), 0, atol=1e-12)


def test_corrupted_grid_reconstructs_finite():
    seq = moving_phantom()
    out = corrupt_sequence(seq, CorruptionSpec(z=3, offset=RANDOM, phase=RANDOM, seed=1))
    assert np.all(np.isfinite(out))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_offset_zero_is_identity():
    seq = moving_phantom(seed=4)
    out = corrupt_sequence(seq, CorruptionSpec(z=3, offset=0, phase=0, seed=0))
    np.testing.assert_allclose(out, seq, atol=1e-9)


def test_z1_fixed_offset_is_full_frame_replacement():
    seq = moving_phantom(seed=5, T=10)
    j = 4
    out = corrupt_sequence(seq, CorruptionSpec(z=1, offset=j, phase=0, seed=0))
    np.testing.assert_allclose(out, np.roll(seq, -j, axis=0), atol=1e-9)


def test_static_sequence_invariance():
    frame = moving_phantom(seed=6)[0]
    static = np.tile(frame, (8, 1, 1))
    rng = np.random.default_rng(3)
    for _ in range(10):
        spec = CorruptionSpec(z=int(rng.integers(1, 5)), offset=RANDOM, phase=RANDOM,
                              seed=int(rng.integers(0, 1000)))
        np.testing.assert_allclose(corrupt_sequence(static, spec), static, atol=1e-9)


def test_moving_sequence_changes_more_than_static():
    seq = moving_phantom(seed=7)
    static = np.tile(seq[0], (seq.shape[0], 1, 1))
    spec = CorruptionSpec(z=3, offset=RANDOM, phase=RANDOM, seed=11)
    moving_diff = np.abs(corrupt_sequence(seq, spec) - seq).mean()
    static_diff = np.abs(corrupt_sequence(static, spec) - static).mean()
    assert moving_diff > 0
    assert moving_diff > static_diff


def test_determinism():
    seq = moving_phantom(seed=8)
    spec = CorruptionSpec(z=3, offset=RANDOM, phase=RANDOM, seed=99)
    np.testing.assert_array_equal(corrupt_sequence(seq, spec), corrupt_sequence(seq, spec))


def test_untouched_rows_are_exactly_preserved():
    seq = moving_phantom(seed=9, T=6)
    z, phi, j = 3, 1, 2
    k_before = np.fft.fft2(seq, axes=(1, 2))
    for i in range(seq.shape[0]):
        k = k_before[i].copy()
        rows = np.arange(phi, seq.shape[1], z)
        k[rows] = np.fft.fft2(seq[(i + j) % seq.shape[0]])[rows]
        untouched = np.setdiff1d(np.arange(seq.shape[1]), rows)
        np.testing.assert_array_equal(k[untouched], k_before[i][untouched])


def test_random_offset_excludes_zero():
    offsets, phases = draw_frame_plan(CorruptionSpec(z=4, offset=RANDOM, phase=RANDOM, seed=0), 500)
    assert offsets.min() >= 1
    assert set(np.unique(phases)) <= {0, 1, 2, 3}


def test_insufficient_frames():
    with pytest.raises(InsufficientFrames):
        corrupt_sequence(np.zeros((1, 8, 8)), CorruptionSpec(offset=RANDOM))


def test_spec_validation():
    with pytest.raises(InvalidConfig):
        CorruptionSpec(z=0).validate()
    with pytest.raises(InvalidConfig):
        CorruptionSpec(z=3, phase=3).validate()
    with pytest.raises(InvalidConfig):
        CorruptionSpec(offset=10).validate(n_frames=8)
