"""Classical comparison methods: variance-of-Laplacian blur scoring and
flattened-pixel classifiers (kNN, Gaussian naive Bayes, linear SVM).

Deliberately plain implementations with pinned tie-breaking rules so that
cross-validation results are reproducible to the byte. The artefact class
wins every tie — flagging a good image is the recoverable mistake.
"""

import numpy as np

from .augment import ARTEFACT, GOOD
from .errors import EmptyClass, EmptyTrainingSet, FrameTooSmall, InvalidConfig


def flatten_features(seq) -> np.ndarray:
    return np.asarray(seq, dtype=np.float64).ravel()


# ---------------------------------------------------------------------------
# variance of Laplacian
# ---------------------------------------------------------------------------

def variance_of_laplacian(seq, reduce="mean") -> float:
    """Sharpness score: variance of the 3x3 Laplacian response, averaged
    (or maxed) over frames. Interior pixels only; low values mean blur.
    Invariant to adding a constant to every pixel."""
    vol = np.asarray(seq, dtype=np.float64)
    if vol.ndim == 2:
        vol = vol[None]
    T, H, W = vol.shape
    if H < 3 or W < 3:
        raise FrameTooSmall(f"frames must be at least 3x3, got {H}x{W}")
    if reduce not in ("mean", "max"):
        raise InvalidConfig(f"reduce must be 'mean' or 'max', got {reduce!r}")
    # kernel [[0,1,0],[1,-4,1],[0,1,0]] applied to interior pixels
    resp = (vol[:, :-2, 1:-1] + vol[:, 2:, 1:-1] + vol[:, 1:-1, :-2] + vol[:, 1:-1, 2:]
            - 4.0 * vol[:, 1:-1, 1:-1])
    per_frame = resp.reshape(T, -1).var(axis=1)
    return float(per_frame.mean() if reduce == "mean" else per_frame.max())


# ---------------------------------------------------------------------------
# k-nearest neighbours
# ---------------------------------------------------------------------------

def knn_classify(train_features, train_labels, query, k) -> int:
    """Majority label of the k Euclidean-nearest training points.

    Distance ties are broken by lower sample index (stable sort); vote ties
    go to the artefact class.
    """
    X = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("knn needs a non-empty training set")
    if not 1 <= k <= X.shape[0]:
        raise InvalidConfig(f"k={k} outside [1, {X.shape[0]}]")
    d = np.sqrt(((X - np.asarray(query, dtype=np.float64)) ** 2).sum(axis=1))
    nearest = np.argsort(d, kind="stable")[:k]
    votes_artefact = int((y[nearest] == ARTEFACT).sum())
    return ARTEFACT if votes_artefact * 2 >= k else GOOD


# ---------------------------------------------------------------------------
# Gaussian naive Bayes
# ---------------------------------------------------------------------------

VAR_FLOOR = 1e-9


def gaussian_nb_fit(train_features, train_labels):
    """Per-class feature means/variances (floored) and empirical log-priors."""
    X = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    model = {}
    for label in (GOOD, ARTEFACT):
        rows = X[y == label]
        if rows.shape[0] == 0:
            raise EmptyClass(f"no samples of class {label}")
        model[label] = {
            "mean": rows.mean(axis=0),
            "var": np.maximum(rows.var(axis=0), VAR_FLOOR),
            "log_prior": float(np.log(rows.shape[0] / X.shape[0])),
        }
    return model


def gaussian_nb_log_posterior(model, query, label) -> float:
    m = model[label]
    q = np.asarray(query, dtype=np.float64)
    ll = -0.5 * (np.log(2 * np.pi * m["var"]) + (q - m["mean"]) ** 2 / m["var"]).sum()
    return m["log_prior"] + ll


def gaussian_nb_classify(model, query) -> int:
    lp_good = gaussian_nb_log_posterior(model, query, GOOD)
    lp_bad = gaussian_nb_log_posterior(model, query, ARTEFACT)
    return ARTEFACT if lp_bad >= lp_good else GOOD


# ---------------------------------------------------------------------------
# linear SVM (primal hinge loss, stochastic subgradient descent)
# ---------------------------------------------------------------------------

def svm_objective(w, b, X, s, lam) -> float:
    margins = s * (X @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


def linear_svm_fit(train_features, train_labels, lam=1e-3, epochs=200, seed=0):
    """Stochastic subgradient descent on the regularized hinge loss.

    Labels are mapped to +1 (artefact) / -1 (good). The step size decays as
    eta0 / (1 + eta0*lam*t) with eta0 matched to the mean squared feature
    norm, which keeps the unregularized bias stable across feature scales.
    The epoch iterate with the best full-training objective is returned,
    making the stochastic optimum stable enough to compare against a
    grid-search oracle.
    """
    X = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    if not np.any(y == ARTEFACT) or not np.any(y == GOOD):
        raise EmptyClass("svm needs both classes present")
    s = np.where(y == ARTEFACT, 1.0, -1.0)
    n, n_feat = X.shape
    rng = np.random.default_rng(seed)
    eta0 = 1.0 / max(lam, float((X ** 2).sum(axis=1).mean()))
    w = np.zeros(n_feat)
    b = 0.0
    best = (svm_objective(w, b, X, s, lam), w.copy(), b)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = eta0 / (1.0 + eta0 * lam * t)
            margin = s[i] * (X[i] @ w + b)
            w *= (1.0 - eta * lam)
            if margin < 1.0:
                w += eta * s[i] * X[i]
                b += eta * s[i]
        obj = svm_objective(w, b, X, s, lam)
        if obj < best[0]:
            best = (obj, w.copy(), b)
    return {"w": best[1], "b": best[2], "lambda": lam, "objective": best[0]}


def linear_svm_classify(model, query) -> int:
    value = float(np.asarray(query, dtype=np.float64) @ model["w"] + model["b"])
    return ARTEFACT if value >= 0.0 else GOOD


LAMBDA_GRID = (1e-4, 1e-3, 1e-2)


def linear_svm_grid_fit(train_features, train_labels, lambdas=LAMBDA_GRID,
                        epochs=200, seed=0, val_frac=0.2):
    """Grid search over the regularization strength on a held-out split.

    The split is stratified and seeded; the winning lambda is refit on the
    full training data.
    """
    X = np.asarray(train_features, dtype=np.float64)
    y = np.asarray(train_labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    val_idx = []
    for label in (GOOD, ARTEFACT):
        idx = np.nonzero(y == label)[0]
        if len(idx) < 2:
            continue
        k = min(max(1, int(round(val_frac * len(idx)))), len(idx) - 1)
        val_idx.extend(idx[rng.permutation(len(idx))[:k]])
    val_mask = np.zeros(len(y), dtype=bool)
    val_mask[val_idx] = True
    if not val_mask.any() or val_mask.all():
        return linear_svm_fit(X, y, lambdas[0], epochs, seed)

    best_lam, best_acc = lambdas[0], -1.0
    for lam in lambdas:
        try:
            model = linear_svm_fit(X[~val_mask], y[~val_mask], lam, epochs, seed)
        except EmptyClass:
            continue
        pred = np.array([linear_svm_classify(model, q) for q in X[val_mask]])
        acc = float((pred == y[val_mask]).mean())
        if acc > best_acc:
            best_lam, best_acc = lam, acc
    return linear_svm_fit(X, y, best_lam, epochs, seed)
