import sys
import time

import numpy as np

from cineqc.augment import AugmentPolicy
from cineqc.cnn import TrainConfig, desk_profile
from cineqc.datasets import default_phantom_for, generate_labeled_dataset
from cineqc.evalharness import CnnPipeline, cross_validate, make_pipeline
from cineqc.kspace import CorruptionSpec

BASE = default_phantom_for(H=32, W=32, T=16, seed=0)
CORR = CorruptionSpec(z=3, offset="random", phase=0, seed=1)

lr = float(sys.argv[1]) if len(sys.argv) > 1 else 3.0
max_ep = int(sys.argv[2]) if len(sys.argv) > 2 else 50
pat = int(sys.argv[3]) if len(sys.argv) > 3 else 15
vf = float(sys.argv[4]) if len(sys.argv) > 4 else 0.15


def cnn_factory(max_shift, balance):
    tc = TrainConfig(batch_size=25, learning_rate=lr, dropout_p=0.5,
                     patience_epochs=pat, max_epochs=max_ep, validation_frac=vf, seed=3)
    cfg = desk_profile(input_dims=(16, 32, 32), dropout_p=0.5, seed=11)
    policy = AugmentPolicy(max_shift_frac=max_shift, balance=balance,
                           corruption_spec=CORR, seed=7)
    return lambda: CnnPipeline(cfg, tc, policy)


balanced = generate_labeled_dataset(100, 100, base_config=BASE, corruption=CORR, seed=42)
imbal = generate_labeled_dataset(100, 10, base_config=BASE, corruption=CORR, seed=43)

t0 = time.time()
rep = cross_validate(cnn_factory(0.2, True), balanced, k=5, seed=0, method="cnn-both-bal")
a = rep.aggregate
print(f"balanced both: {time.time()-t0:.0f}s acc {a['accuracy']:.3f} prec {a['precision']:.3f} "
      f"rec {a['recall']:.3f} f1 {a['f1']:.3f}", flush=True)

for name, (shift, bal) in {"none": (0.0, False), "translate": (0.2, False),
                           "kspace": (0.0, True), "both": (0.2, True)}.items():
    t0 = time.time()
    rep = cross_validate(cnn_factory(shift, bal), imbal, k=5, seed=0, method=name)
    a = rep.aggregate
    print(f"imbal {name}: {time.time()-t0:.0f}s tp{a['tp']} fp{a['fp']} tn{a['tn']} fn{a['fn']} "
          f"acc {a['accuracy']:.3f} prec {a['precision']:.3f} rec {a['recall']:.3f} "
          f"f1 {a['f1']:.3f}", flush=True)

for method in ("vol", "knn", "nb", "svm"):
    t0 = time.time()
    opts = {"seed": 0} if method in ("svm", "vol") else {}
    rep = cross_validate(lambda m=method, o=opts: make_pipeline(m, **o), imbal, k=5,
                         seed=0, method=method)
    a = rep.aggregate
    print(f"imbal {method}: {time.time()-t0:.0f}s tp{a['tp']} fp{a['fp']} tn{a['tn']} fn{a['fn']} "
          f"acc {a['accuracy']:.3f} prec {a['precision']:.3f} rec {a['recall']:.3f} "
          f"f1 {a['f1']:.3f}", flush=True)
