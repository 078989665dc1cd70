"""cineqc: cine MR motion-artefact simulation and detection at desk scale.

Pipeline: phantom (or stored) cine sequences -> intensity normalization and
motion-based ROI cropping -> k-space line-replacement corruption for class
balancing -> from-scratch 3D CNN detector, benchmarked against classical
baselines under stratified cross-validation.
"""

from .augment import (ARTEFACT, GOOD, REAL, SYNTHETIC_CORRUPTION, TRANSLATED,
                      AugmentPolicy, LabeledSample, balance_training_set,
                      random_translate, shift_sequence)
from .cnn import (Network, NetworkConfig, TrainConfig, desk_profile, full_profile,
                  load_checkpoint, predict, save_checkpoint, train)
from .datasets import default_phantom_for, generate_labeled_dataset
from .evalharness import (EvalReport, compute_metrics, cross_validate,
                          make_pipeline, stratified_kfold)
from .kspace import CorruptionSpec, corrupt_sequence, from_kspace, to_kspace
from .numerics import dft1d, dft2d, temporal_dft_magnitude
from .phantom import PhantomConfig, generate_cine
from .preprocess import RoiResult, crop_roi, find_roi_center, normalize

__version__ = "0.1.0"
