import numpy as np
import pytest

from cineqc.augment import (ARTEFACT, GOOD, REAL, SYNTHETIC_CORRUPTION, AugmentPolicy,
                            LabeledSample, balance_training_set, random_translate,
                            shift_sequence)
from cineqc.errors import EmptyClass, InvalidConfig
from cineqc.kspace import CorruptionSpec
from cineqc.phantom import PhantomConfig, generate_cine


def small_samples(n_good, n_bad, seed=0):
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_good):
        samples.append(LabeledSample(seq=rng.random((6, 12, 12)), label=GOOD))
    for _ in range(n_bad):
        samples.append(LabeledSample(seq=rng.random((6, 12, 12)), label=ARTEFACT))
    return samples


def test_zero_shift_is_identity():
    seq = np.random.default_rng(0).random((4, 8, 8))
    np.testing.assert_array_equal(shift_sequence(seq, 0, 0), seq)


def test_shift_semantics():
    seq = np.random.default_rng(1).random((3, 10, 10))
    out = shift_sequence(seq, 3, 0)
    np.testing.assert_array_equal(out[:, 3:, :], seq[:, :-3, :])
    np.testing.assert_array_equal(out[:, :3, :], 0)
    out2 = shift_sequence(seq, 0, -2)
    np.testing.assert_array_equal(out2[:, :, :-2], seq[:, :, 2:])
    np.testing.assert_array_equal(out2[:, :, -2:], 0)


def test_paper_shift_bound_80px_fifth():
    # W = H = 80 with f = 1/5 bounds shifts by +/- 16 pixels
    policy = AugmentPolicy(max_shift_frac=0.2, seed=0)
    seq = np.zeros((1, 80, 80))
    seq[0, 40, 40] = 1.0
    rng = np.random.default_rng(3)
    seen = set()
    for _ in range(300):
        out = random_translate(seq, policy, rng)
        r, c = np.unravel_index(np.argmax(out[0]), (80, 80))
        dr, dc = r - 40, c - 40
        assert -16 <= dr <= 16 and -16 <= dc <= 16
        seen.add((dr, dc))
    assert (16, 16) in seen or len(seen) > 100  # draws cover the range


def test_translation_preserves_or_reduces_mass():
    seq = np.random.default_rng(4).random((3, 20, 20))
    policy = AugmentPolicy(max_shift_frac=0.25, seed=0)
    rng = np.random.default_rng(5)
    for _ in range(20):
        out = random_translate(seq, policy, rng)
        assert out.sum() <= seq.sum() + 1e-9


def test_same_shift_all_frames():
    seq = 0.1 + 0.9 * np.random.default_rng(6).random((5, 16, 16))
    rng = np.random.default_rng(7)
    out = random_translate(seq, AugmentPolicy(max_shift_frac=0.3, seed=0), rng)
    # the zero-filled band (and hence the shift) is identical across frames
    for t in range(1, 5):
        np.testing.assert_array_equal(out[t] == 0, out[0] == 0)


def test_invalid_shift_frac():
    with pytest.raises(InvalidConfig):
        AugmentPolicy(max_shift_frac=0.5).validate()


def test_balance_tops_up_minority():
    samples = small_samples(10, 3)
    policy = AugmentPolicy(corruption_spec=CorruptionSpec(seed=0), seed=1)
    out = balance_training_set(samples, policy)
    good = [s for s in out if s.label == GOOD]
    bad = [s for s in out if s.label == ARTEFACT]
    assert len(good) == len(bad) == 10
    synthetic = [s for s in bad if s.origin == SYNTHETIC_CORRUPTION]
    assert len(synthetic) == 7
    assert all(s.origin == REAL for s in good)


def test_balance_leaves_balanced_input_unchanged():
    samples = small_samples(5, 5)
    out = balance_training_set(samples, AugmentPolicy(seed=0))
    assert out == samples


def test_balance_scaled_paper_ratio():
    # 3360:105 scaled down to 96:3
    samples = small_samples(96, 3)
    out = balance_training_set(samples, AugmentPolicy(seed=2))
    bad = [s for s in out if s.label == ARTEFACT]
    assert len(bad) == 96
    assert sum(s.origin == SYNTHETIC_CORRUPTION for s in bad) == 93


def test_balance_deterministic():
    samples = small_samples(8, 2)
    policy = AugmentPolicy(seed=3)
    a = balance_training_set(samples, policy)
    b = balance_training_set(samples, policy)
    assert len(a) == len(b)
    for sa, sb in zip(a, b):
        np.testing.assert_array_equal(sa.seq, sb.seq)
        assert sa.label == sb.label and sa.origin == sb.origin


def test_balance_requires_both_classes():
    with pytest.raises(EmptyClass):
        balance_training_set(small_samples(5, 0), AugmentPolicy(seed=0))
    with pytest.raises(EmptyClass):
        balance_training_set(small_samples(0, 5), AugmentPolicy(seed=0))


def test_balanced_synthetics_look_corrupted():
    cfg = PhantomConfig(T=8, H=24, W=24, base_radius=5, pulsation_amplitude=1.5,
                        wall_thickness=2, noise_sigma=0.01, seed=0)
    seq, _ = generate_cine(cfg)
    samples = [LabeledSample(seq=seq, label=GOOD),
               LabeledSample(seq=seq * 0.9, label=GOOD),
               LabeledSample(seq=seq * 0.8, label=ARTEFACT)]
    out = balance_training_set(samples, AugmentPolicy(seed=4))
    synth = [s for s in out if s.origin == SYNTHETIC_CORRUPTION]
    assert len(synth) == 1
    assert synth[0].seq.min() >= 0 and synth[0].seq.max() <= 1
