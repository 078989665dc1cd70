#!/usr/bin/env python3
"""Miniature comparison table: CNN augmentation variants vs classical baselines.

Cross-validates every method on a small imbalanced phantom cohort (good
quality heavily over-represented, as in real QC) and prints one metrics row
per method. This is the desk-scale analogue of a full benchmark table; the
acceptance suite runs the bigger version. Takes a few minutes on one core.
"""

import time

from cineqc.augment import AugmentPolicy
from cineqc.cnn import TrainConfig, desk_profile
from cineqc.datasets import default_phantom_for, generate_labeled_dataset
from cineqc.evalharness import CnnPipeline, cross_validate, make_pipeline
from cineqc.kspace import CorruptionSpec

CORR = CorruptionSpec(z=3, offset="random", phase=0, seed=1)


def cnn_factory(max_shift, balance):
    tc = TrainConfig(batch_size=25, learning_rate=3.0, dropout_p=0.5,
                     patience_epochs=8, max_epochs=25, validation_frac=0.1, seed=3)
    cfg = desk_profile(dropout_p=0.5, seed=11)
    policy = AugmentPolicy(max_shift_frac=max_shift, balance=balance,
                           corruption_spec=CORR, seed=7)
    return lambda: CnnPipeline(cfg, tc, policy)


def main():
    base = default_phantom_for(H=32, W=32, T=16, seed=0)
    data = generate_labeled_dataset(50, 6, base_config=base, corruption=CORR, seed=43)
    print(f"cohort: 50 good / 6 artefact, 3-fold stratified CV\n")

    rows = [
        ("knn", lambda: make_pipeline("knn")),
        ("naive bayes", lambda: make_pipeline("nb")),
        ("linear svm", lambda: make_pipeline("svm", seed=0)),
        ("var. of laplacian", lambda: make_pipeline("vol", seed=0)),
        ("cnn (no aug)", cnn_factory(0.0, False)),
        ("cnn (k-space aug)", cnn_factory(0.0, True)),
        ("cnn (both aug)", cnn_factory(0.2, True)),
    ]
    print(f"{'method':<20} {'accuracy':>9} {'precision':>10} {'recall':>7} {'f1':>6}   time")
    for name, factory in rows:
        t0 = time.time()
        rep = cross_validate(factory, data, k=3, seed=0, method=name)
        a = rep.aggregate
        print(f"{name:<20} {a['accuracy']:>9.3f} {a['precision']:>10.3f} "
              f"{a['recall']:>7.3f} {a['f1']:>6.3f}   {time.time()-t0:.0f}s")


if __name__ == "__main__":
    main()
