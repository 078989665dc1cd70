"""Stratified k-fold cross-validation, confusion matrices, and the metric suite.

The artefact class is positive throughout. Aggregate metrics are computed on
the confusion matrix pooled over folds (micro average) — with only a handful
of positives per fold, per-fold metrics are too unstable to average; a macro
aggregate is available behind a flag. Augmented samples never reach a test
fold: the harness takes a real-only dataset and the only augmentation happens
inside each fold's training side.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baselines
from .augment import ARTEFACT, GOOD, REAL, AugmentPolicy
from .cnn import Network, NetworkConfig, TrainConfig, train
from .errors import EmptyEvaluation, InvalidConfig, InvalidK
from .serialize import canonical_json

METHODS = ("cnn", "knn", "svm", "nb", "vol")


def stratified_kfold(labels, k, seed=0) -> np.ndarray:
    """Assign each sample a fold id in [0, k): per-class seeded shuffle, then
    round-robin. Per-fold class counts differ from the stratified ideal by at
    most one."""
    y = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    fold_of = np.full(len(y), -1, dtype=np.int64)
    for label in np.unique(y):
        idx = np.nonzero(y == label)[0]
        if len(idx) < k:
            warnings.warn(f"class {label} has {len(idx)} members for k={k}; "
                          "some folds will miss it")
        shuffled = idx[rng.permutation(len(idx))]
        fold_of[shuffled] = np.arange(len(shuffled)) % k
    return fold_of


def compute_metrics(tp, fp, tn, fn):
    """Accuracy, precision, recall, F1 from one confusion matrix.

    Zero denominators yield 0 rather than NaN (an all-negative predictor has
    recall 0, not undefined recall)."""
    total = tp + fp + tn + fn
    if total <= 0:
        raise EmptyEvaluation("confusion matrix is empty")
    if min(tp, fp, tn, fn) < 0:
        raise InvalidConfig("confusion counts must be non-negative")
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}


@dataclass
class EvalReport:
    method: str
    k: int
    seed: int
    per_fold: list          # [{"fold","tp","fp","tn","fn"}, ...]
    aggregate: dict         # pooled confusion + micro metrics
    macro: dict = None      # mean of per-fold metrics, if requested

    def to_dict(self):
        d = {"method": self.method, "k": self.k, "seed": self.seed,
             "per_fold": self.per_fold, "aggregate": self.aggregate}
        if self.macro is not None:
            d["macro"] = self.macro
        return d

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def to_text(self) -> str:
        """Aligned plain-text table: one row per fold plus the aggregate."""
        header = f"{'fold':>6} {'TP':>5} {'FP':>5} {'TN':>5} {'FN':>5}"
        lines = [f"method: {self.method}  (k={self.k}, seed={self.seed}, artefact = positive)",
                 header, "-" * len(header)]
        for f in self.per_fold:
            lines.append(f"{f['fold']:>6d} {f['tp']:>5d} {f['fp']:>5d} {f['tn']:>5d} {f['fn']:>5d}")
        a = self.aggregate
        lines.append("-" * len(header))
        lines.append(f"{'all':>6} {a['tp']:>5d} {a['fp']:>5d} {a['tn']:>5d} {a['fn']:>5d}")
        lines.append("")
        lines.append(f"{'accuracy':>10} {'precision':>10} {'recall':>10} {'f1':>10}")
        lines.append(" ".join(f"{a[m]:>10.3f}" for m in ("accuracy", "precision", "recall", "f1")))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# pipelines: one uniform fit/predict wrapper per method
# ---------------------------------------------------------------------------

class CnnPipeline:
    """The proposed detector: balancing + translation augmentation happen
    inside fit(), via the training loop."""

    def __init__(self, net_config: NetworkConfig, train_config: TrainConfig,
                 policy: AugmentPolicy = None):
        self.net_config = net_config
        self.train_config = train_config
        self.policy = policy
        self.net = None

    def fit(self, samples):
        self.net, self.history = train(samples, self.net_config, self.train_config, self.policy)
        return self

    def predict_label(self, seq) -> int:
        probs = self.net.forward(seq, training=False)
        return ARTEFACT if probs[0, ARTEFACT] >= 0.5 else GOOD


class _FlatPipeline:
    """Shared scaffolding for classifiers on flattened raw pixels."""

    def _features(self, samples):
        X = np.stack([baselines.flatten_features(s.seq) for s in samples])
        y = np.array([s.label for s in samples], dtype=np.int64)
        return X, y


class KnnPipeline(_FlatPipeline):
    def __init__(self, k_neighbours=3):
        self.k_neighbours = k_neighbours

    def fit(self, samples):
        self.X, self.y = self._features(samples)
        self.k_fit = min(self.k_neighbours, len(self.y))
        return self

    def predict_label(self, seq):
        return baselines.knn_classify(self.X, self.y, baselines.flatten_features(seq), self.k_fit)


class NbPipeline(_FlatPipeline):
    def fit(self, samples):
        X, y = self._features(samples)
        self.model = baselines.gaussian_nb_fit(X, y)
        return self

    def predict_label(self, seq):
        return baselines.gaussian_nb_classify(self.model, baselines.flatten_features(seq))


class SvmPipeline(_FlatPipeline):
    def __init__(self, epochs=200, seed=0):
        self.epochs = epochs
        self.seed = seed

    def fit(self, samples):
        X, y = self._features(samples)
        self.model = baselines.linear_svm_grid_fit(X, y, epochs=self.epochs, seed=self.seed)
        return self

    def predict_label(self, seq):
        return baselines.linear_svm_classify(self.model, baselines.flatten_features(seq))


class VolPipeline:
    """Variance-of-Laplacian score thresholded by the linear-SVM trainer on
    the 1-D score feature. Scores are z-scored with training statistics so
    the SVM sees a unit-scale feature (raw scores can be ~1e-3)."""

    def __init__(self, reduce="mean", epochs=200, seed=0):
        self.reduce = reduce
        self.epochs = epochs
        self.seed = seed

    def fit(self, samples):
        scores = np.array([baselines.variance_of_laplacian(s.seq, self.reduce)
                           for s in samples])
        y = np.array([s.label for s in samples], dtype=np.int64)
        self.mean = float(scores.mean())
        self.std = float(scores.std()) or 1.0
        X = ((scores - self.mean) / self.std)[:, None]
        self.model = baselines.linear_svm_grid_fit(X, y, epochs=self.epochs, seed=self.seed)
        return self

    def predict_label(self, seq):
        score = baselines.variance_of_laplacian(seq, self.reduce)
        z = (score - self.mean) / self.std
        return baselines.linear_svm_classify(self.model, np.array([z]))


def make_pipeline(method, net_config=None, train_config=None, policy=None, **opts):
    if method == "cnn":
        if net_config is None or train_config is None:
            raise InvalidConfig("cnn pipeline needs net_config and train_config")
        return CnnPipeline(net_config, train_config, policy)
    if method == "knn":
        return KnnPipeline(**opts)
    if method == "nb":
        return NbPipeline(**opts)
    if method == "svm":
        return SvmPipeline(**opts)
    if method == "vol":
        return VolPipeline(**opts)
    raise InvalidConfig(f"unknown method {method!r}; choose from {METHODS}")


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------

def _evaluate_fold(pipeline_factory, dataset, fold_of, fold):
    train_samples = [s for s, f in zip(dataset, fold_of) if f != fold]
    test_samples = [s for s, f in zip(dataset, fold_of) if f == fold]
    for s in test_samples:
        if s.origin != REAL:
            raise InvalidConfig("augmented sample reached a test fold")
    pipeline = pipeline_factory().fit(train_samples)
    tp = fp = tn = fn = 0
    for s in test_samples:
        pred = pipeline.predict_label(s.seq)
        if s.label == ARTEFACT:
            tp += pred == ARTEFACT
            fn += pred != ARTEFACT
        else:
            tn += pred == GOOD
            fp += pred != GOOD
    return {"fold": int(fold), "tp": int(tp), "fp": int(fp), "tn": int(tn), "fn": int(fn)}


def cross_validate(pipeline_factory, dataset, k, seed=0, method="custom",
                   with_macro=False, n_workers=1) -> EvalReport:
    """Evaluate a classifier with stratified k-fold CV.

    pipeline_factory: zero-argument callable returning a fresh unfitted
        pipeline (fit(samples) + predict_label(seq)); a fresh instance per
        fold keeps folds independent and lets them run in parallel.
    dataset: real samples only (checked).
    """
    for s in dataset:
        if s.origin != REAL:
            raise InvalidConfig("cross_validate expects a real-only dataset; "
                                "augmentation belongs inside the pipeline fit")
    labels = [s.label for s in dataset]
    fold_of = stratified_kfold(labels, k, seed)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_evaluate_fold, pipeline_factory, dataset, fold_of, f)
                       for f in range(k)]
            per_fold = [fut.result() for fut in futures]  # fold order preserved
    else:
        per_fold = [_evaluate_fold(pipeline_factory, dataset, fold_of, f) for f in range(k)]

    pooled = {key: int(sum(f[key] for f in per_fold)) for key in ("tp", "fp", "tn", "fn")}
    aggregate = dict(pooled)
    aggregate.update(compute_metrics(**pooled))

    macro = None
    if with_macro:
        per_metrics = [compute_metrics(f["tp"], f["fp"], f["tn"], f["fn"])
                       for f in per_fold if f["tp"] + f["fp"] + f["tn"] + f["fn"] > 0]
        macro = {m: float(np.mean([pm[m] for pm in per_metrics]))
                 for m in ("accuracy", "precision", "recall", "f1")}

    return EvalReport(method=method, k=int(k), seed=int(seed),
                      per_fold=per_fold, aggregate=aggregate, macro=macro)
