"""Labeled phantom datasets: the desk-scale stand-in for a curated cine cohort.

Clean samples are jittered phantom renders; artefact samples are further
k-space corrupted and treated as *real* artefact acquisitions (origin REAL),
mirroring how genuinely mistriggered scans would enter a study. Origin
SYNTHETIC_CORRUPTION is reserved for balancing-time augmentation, which is
never allowed into test folds.
"""

import numpy as np

from .augment import ARTEFACT, GOOD, REAL, LabeledSample
from .kspace import CorruptionSpec, corrupt_sequence
from .phantom import PhantomConfig, generate_cine, jittered_config


def default_phantom_for(H=64, W=64, T=16, seed=0) -> PhantomConfig:
    """A phantom sized sensibly for the given grid (radius ~ H/5.5)."""
    r0 = max(3.0, H / 5.5)
    return PhantomConfig(T=T, H=H, W=W, base_radius=r0,
                         pulsation_amplitude=max(1.0, r0 / 3.0),
                         wall_thickness=max(1.5, r0 / 4.0),
                         noise_sigma=0.02, n_static_structures=2, seed=seed)


def generate_labeled_dataset(n_clean, n_artefact, base_config: PhantomConfig = None,
                             corruption: CorruptionSpec = None, seed=0):
    """n_clean good + n_artefact corrupted phantom sequences, all origin REAL."""
    if base_config is None:
        base_config = default_phantom_for()
    if corruption is None:
        corruption = CorruptionSpec(seed=seed)
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_clean):
        seq, _center = generate_cine(jittered_config(base_config, rng))
        samples.append(LabeledSample(seq=seq, label=GOOD, origin=REAL))
    for _ in range(n_artefact):
        seq, _center = generate_cine(jittered_config(base_config, rng))
        spec = CorruptionSpec(z=corruption.z, offset=corruption.offset,
                              phase=corruption.phase, seed=int(rng.integers(0, 2**31 - 1)))
        samples.append(LabeledSample(seq=corrupt_sequence(seq, spec), label=ARTEFACT, origin=REAL))
    return samples
