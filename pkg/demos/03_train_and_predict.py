#!/usr/bin/env python3
"""Train the 3D CNN detector on a small phantom dataset and run inference.

A compressed version of the full pipeline: generate labeled data, train with
k-space balancing plus random translations, checkpoint the model, reload it,
and score held-out sequences. Runs in about a minute on one core.
"""

import tempfile
import time
from pathlib import Path

import numpy as np

from cineqc.augment import ARTEFACT, GOOD, AugmentPolicy
from cineqc.cnn import TrainConfig, desk_profile, load_checkpoint, predict, save_checkpoint, train
from cineqc.datasets import default_phantom_for, generate_labeled_dataset
from cineqc.kspace import CorruptionSpec


def main():
    corr = CorruptionSpec(z=3, offset="random", phase=0, seed=1)
    base = default_phantom_for(H=32, W=32, T=16, seed=0)
    data = generate_labeled_dataset(40, 40, base_config=base, corruption=corr, seed=5)
    held_out = data[::8]
    train_set = [s for i, s in enumerate(data) if i % 8 != 0]
    print(f"dataset: {len(train_set)} train / {len(held_out)} held out")

    tc = TrainConfig(batch_size=10, learning_rate=5.0, dropout_p=0.5,
                     patience_epochs=12, max_epochs=45, validation_frac=0.1, seed=3)
    policy = AugmentPolicy(max_shift_frac=0.2, balance=True, corruption_spec=corr, seed=7)
    t0 = time.time()
    net, history = train(train_set, desk_profile(dropout_p=0.5, seed=11), tc, policy)
    best = max(h["val_accuracy"] for h in history)
    print(f"trained {len(history)} epochs in {time.time()-t0:.0f}s, best val acc {best:.2f}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "detector.cqcm"
        save_checkpoint(path, net)
        net = load_checkpoint(path)
        print(f"checkpoint round-trip ok ({path.stat().st_size} bytes)")

    correct = 0
    for i, s in enumerate(held_out):
        prob, label, elapsed = predict(net, s.seq)
        truth = "artefact" if s.label == ARTEFACT else "good"
        verdict = "artefact" if label == ARTEFACT else "good"
        correct += label == s.label
        print(f"  seq {i}: p(artefact)={prob:.3f} -> {verdict:8s} (truth {truth}, "
              f"{elapsed*1000:.1f} ms)")
    print(f"held-out accuracy {correct}/{len(held_out)}")


if __name__ == "__main__":
    main()
