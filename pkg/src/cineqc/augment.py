"""Training-time augmentation: integer translations and k-space class balancing.

Augmented samples are tagged with a non-real origin so the evaluation
harness can (and does) refuse to let them anywhere near a test fold.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyClass, InvalidConfig
from .kspace import CorruptionSpec, corrupt_sequence

# class labels (match the dataset file's label byte)
GOOD = 0
ARTEFACT = 1

# sample provenance (match the dataset file's origin byte)
REAL = 0
SYNTHETIC_CORRUPTION = 1
TRANSLATED = 2

LABEL_NAMES = {GOOD: "good", ARTEFACT: "artefact"}
ORIGIN_NAMES = {REAL: "real", SYNTHETIC_CORRUPTION: "synthetic_corruption", TRANSLATED: "translated"}


@dataclass
class LabeledSample:
    seq: np.ndarray        # (T, H, W) float64 in [0, 1]
    label: int             # GOOD or ARTEFACT
    origin: int = REAL


@dataclass(frozen=True)
class AugmentPolicy:
    max_shift_frac: float = 0.2     # 1/5 of each image dimension; 0 disables translation
    balance: bool = True
    corruption_spec: CorruptionSpec = field(default_factory=CorruptionSpec)
    seed: int = 0

    def validate(self):
        if not 0.0 <= self.max_shift_frac < 0.5:
            raise InvalidConfig(f"max_shift_frac must be in [0, 0.5), got {self.max_shift_frac}")


def shift_sequence(seq, dr: int, dc: int) -> np.ndarray:
    """Shift all frames by (dr, dc) integer pixels, zero-filling vacated pixels."""
    out = np.zeros_like(seq)
    T, H, W = seq.shape
    src_r = slice(max(0, -dr), min(H, H - dr))
    dst_r = slice(max(0, dr), min(H, H + dr))
    src_c = slice(max(0, -dc), min(W, W - dc))
    dst_c = slice(max(0, dc), min(W, W + dc))
    out[:, dst_r, dst_c] = seq[:, src_r, src_c]
    return out


def random_translate(seq, policy: AugmentPolicy, rng) -> np.ndarray:
    """Apply one random integer shift, identical across all frames.

    Shifts are drawn uniformly from [-floor(H*f), floor(H*f)] x
    [-floor(W*f), floor(W*f)]. No interpolation is ever done (rotations are
    deliberately absent: they would need resampling, which alters quality).
    """
    policy.validate()
    _, H, W = seq.shape
    max_dr = int(H * policy.max_shift_frac)
    max_dc = int(W * policy.max_shift_frac)
    dr = int(rng.integers(-max_dr, max_dr + 1))
    dc = int(rng.integers(-max_dc, max_dc + 1))
    if dr == 0 and dc == 0:
        return seq.copy()
    return shift_sequence(seq, dr, dc)


def balance_training_set(samples, policy: AugmentPolicy):
    """Top up the artefact class with k-space-corrupted copies of good samples.

    Good samples are drawn uniformly with replacement and corrupted with
    fresh per-draw seeds derived from policy.seed, until class counts match.
    Corrupted copies carry origin SYNTHETIC_CORRUPTION. The input list is
    not modified.
    """
    policy.validate()
    good = [s for s in samples if s.label == GOOD]
    bad = [s for s in samples if s.label == ARTEFACT]
    if not good or not bad:
        raise EmptyClass("balancing needs at least one sample of each class")

    out = list(samples)
    rng = np.random.default_rng(policy.seed)
    n_needed = len(good) - len(bad)
    for _ in range(max(0, n_needed)):
        src = good[int(rng.integers(0, len(good)))]
        draw_seed = int(rng.integers(0, 2**31 - 1))
        spec = CorruptionSpec(z=policy.corruption_spec.z,
                              offset=policy.corruption_spec.offset,
                              phase=policy.corruption_spec.phase,
                              seed=draw_seed)
        corrupted = corrupt_sequence(src.seq, spec)
        out.append(LabeledSample(seq=corrupted, label=ARTEFACT, origin=SYNTHETIC_CORRUPTION))
    return out
