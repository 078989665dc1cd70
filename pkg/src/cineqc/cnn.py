"""Spatio-temporal 3D CNN written from scratch.

Everything needed to train the artefact detector lives here: stride-1
same-padded 3D convolutions, ReLU, 2x2x2 ceil-mode max pooling, inverted
dropout, dense layers, softmax + binary cross entropy, Adadelta, and a
mini-batch training loop with validation-based early stopping. The conv and
pool inner loops are numba-compiled transcriptions of their defining
summations (see _kernels); everything else is plain numpy. All arithmetic is
float64: desk-scale inputs make that affordable and it keeps
finite-difference gradient checks tight.

Tensor layout is channels-first: activations are (N, C, T, H, W).
"""

import copy
import struct
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .augment import ARTEFACT, GOOD, REAL, AugmentPolicy, balance_training_set, random_translate
from .errors import EmptyClass, InvalidConfig, NonFiniteGradient, ShapeMismatch
from .serialize import canonical_json_bytes

CHECKPOINT_MAGIC = b"CQCM"
CHECKPOINT_VERSION = 1


# ---------------------------------------------------------------------------
# functional layer kernels
# ---------------------------------------------------------------------------

def _pad_split(k):
    # same-padding split for stride 1; symmetric for odd kernels
    return (k - 1) // 2, k // 2


def _ensure_batched(x):
    if x.ndim == 4:
        return x[None], True
    if x.ndim == 5:
        return x, False
    raise ShapeMismatch(f"expected (C,T,H,W) or (N,C,T,H,W), got shape {x.shape}")


def _pad_same(x, kt, kh, kw):
    (pt0, pt1), (ph0, ph1), (pw0, pw1) = _pad_split(kt), _pad_split(kh), _pad_split(kw)
    return np.pad(x, ((0, 0), (0, 0), (pt0, pt1), (ph0, ph1), (pw0, pw1))), (pt0, ph0, pw0)


def conv3d_forward(x, weights, biases):
    """Stride-1 cross-correlation with zero same-padding.

    x: (C_in, T, H, W) or (N, C_in, T, H, W)
    weights: (C_out, C_in, kt, kh, kw); biases: (C_out,)
    Output keeps the input's (T, H, W).
    """
    xb, single = _ensure_batched(np.ascontiguousarray(x, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 5 or xb.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"weights {w.shape} incompatible with input {xb.shape}")
    b = np.asarray(biases, dtype=np.float64)
    if b.shape != (w.shape[0],):
        raise ShapeMismatch("biases must be (C_out,)")
    N, C, T, H, W = xb.shape
    xp, _ = _pad_same(xb, *w.shape[2:])
    out = np.empty((N, w.shape[0], T, H, W))
    _kernels.conv3d_fwd(xp, w, b, out)
    return out[0] if single else out


def conv3d_backward(grad_out, x, weights):
    """Exact gradients of conv3d_forward: (grad_input, grad_weights, grad_biases)."""
    gb, single = _ensure_batched(np.ascontiguousarray(grad_out, dtype=np.float64))
    xb, _ = _ensure_batched(np.ascontiguousarray(x, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    N, C, T, H, W = xb.shape
    if gb.shape != (N, w.shape[0], T, H, W):
        raise ShapeMismatch(f"grad_out shape {gb.shape} does not match forward output")
    xp, (pt0, ph0, pw0) = _pad_same(xb, *w.shape[2:])
    gxp = np.zeros_like(xp)
    grad_w = np.zeros_like(w)
    grad_b = np.zeros(w.shape[0])
    _kernels.conv3d_bwd(xp, gb, w, gxp, grad_w, grad_b)
    gx = np.ascontiguousarray(gxp[:, :, pt0:pt0 + T, ph0:ph0 + H, pw0:pw0 + W])
    if single:
        return gx[0], grad_w, grad_b
    return gx, grad_w, grad_b


def relu(x):
    return np.maximum(x, 0.0)


def maxpool3d(x):
    """2x2x2 max pooling, stride 2, ceil mode (odd trailing windows shrink,
    equivalent to -inf padding).

    Returns (output, argmax) where argmax holds, per output voxel, the linear
    index (0..7) of the max inside its (dt, dh, dw) window. Ties take the
    first index, so pooling is deterministic.
    """
    xb, single = _ensure_batched(np.ascontiguousarray(x, dtype=np.float64))
    N, C, T, H, W = xb.shape
    T2, H2, W2 = -(-T // 2), -(-H // 2), -(-W // 2)
    out = np.empty((N, C, T2, H2, W2))
    arg = np.empty((N, C, T2, H2, W2), dtype=np.int8)
    _kernels.pool3d_fwd(xb, out, arg)
    if single:
        return out[0], arg[0]
    return out, arg


def maxpool3d_backward(grad_out, argmax, input_shape):
    """Scatter pooled gradients back to the argmax voxels."""
    gb, single = _ensure_batched(np.ascontiguousarray(grad_out, dtype=np.float64))
    ab = argmax[None] if argmax.ndim == 4 else argmax
    if len(input_shape) == 4:
        input_shape = (1,) + tuple(input_shape)
    gx = np.zeros(input_shape)
    _kernels.pool3d_bwd(gb, np.ascontiguousarray(ab), gx)
    return gx[0] if single else gx


def dropout(x, p, rng, training):
    """Inverted dropout: zero with probability p, scale survivors by 1/(1-p).

    Identity when not training. Returns (output, mask); mask already carries
    the 1/(1-p) scale so backward is a plain multiply.
    """
    if not training or p == 0.0:
        return x, None
    if not 0.0 <= p < 1.0:
        raise InvalidConfig(f"dropout rate must be in [0, 1), got {p}")
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * mask, mask


def dense(x, weights, biases):
    """Affine map: (N, F) @ (F, U) + (U,)."""
    if x.shape[-1] != weights.shape[0]:
        raise ShapeMismatch(f"dense input {x.shape} vs weights {weights.shape}")
    return x @ weights + biases


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def bce_loss(probabilities, labels):
    """Mean negative log-likelihood of the labeled class, plus the gradient
    w.r.t. the logits that produced `probabilities` via softmax.

    For a single sample the gradient is exactly p - onehot(label); for a
    batch it is (p - onehot)/N, matching the mean loss.
    """
    p = np.atleast_2d(np.asarray(probabilities, dtype=np.float64))
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if p.shape[0] != y.shape[0]:
        raise ShapeMismatch("one label per probability row required")
    n = p.shape[0]
    picked = np.clip(p[np.arange(n), y], 1e-12, None)
    loss = float(-np.log(picked).mean())
    grad = p.copy()
    grad[np.arange(n), y] -= 1.0
    return loss, grad / n


def adadelta_update(x, g, acc_grad, acc_delta, rho, epsilon, learning_rate):
    """One Adadelta step on a single array; returns (x, acc_grad, acc_delta).

    Eg <- rho*Eg + (1-rho)*g^2
    delta = -sqrt(Ex + eps)/sqrt(Eg + eps) * g
    Ex <- rho*Ex + (1-rho)*delta^2
    x <- x + lr*delta
    """
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradient("gradient contains non-finite values")
    acc_grad = rho * acc_grad + (1.0 - rho) * g * g
    delta = -np.sqrt(acc_delta + epsilon) / np.sqrt(acc_grad + epsilon) * g
    acc_delta = rho * acc_delta + (1.0 - rho) * delta * delta
    return x + learning_rate * delta, acc_grad, acc_delta


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 50
    learning_rate: float = 1e-4
    rho: float = 0.90               # Adadelta decay ("momentum" of the optimizer)
    epsilon: float = 1e-7
    patience_epochs: int = 50
    min_rel_improvement: float = 0.005
    dropout_p: float = 0.5
    validation_frac: float = 0.1
    max_epochs: int = 200
    seed: int = 0

    def validate(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience_epochs < 1:
            raise InvalidConfig("batch_size, max_epochs, patience_epochs must be >= 1")
        if not 0.0 <= self.dropout_p < 1.0:
            raise InvalidConfig("dropout_p must be in [0, 1)")
        if not 0.0 <= self.validation_frac < 1.0:
            raise InvalidConfig("validation_frac must be in [0, 1)")
        if not 0.0 <= self.rho < 1.0 or self.epsilon <= 0 or self.learning_rate <= 0:
            raise InvalidConfig("bad optimizer constants")


# declared architecture profiles: (conv, pool, dense, softmax) layer counts
PROFILES = {
    "full": (6, 4, 2, 1),
    "desk": (2, 2, 2, 1),
}


@dataclass(frozen=True)
class NetworkConfig:
    input_dims: tuple               # (T, H, W)
    layers: tuple                   # tuple of layer-spec dicts
    profile: str = "desk"
    init_std: float = 0.05
    seed: int = 0

    def to_dict(self):
        d = asdict(self)
        d["input_dims"] = list(self.input_dims)
        d["layers"] = [dict(l) for l in self.layers]
        return d

    @staticmethod
    def from_dict(d):
        return NetworkConfig(input_dims=tuple(d["input_dims"]),
                             layers=tuple(dict(l) for l in d["layers"]),
                             profile=d["profile"], init_std=d["init_std"], seed=d["seed"])


def full_profile(input_dims=(50, 80, 80), dropout_p=0.5, seed=0):
    """The full-scale architecture: 6 convs (8-8-16-16-32-32, 3x3x3 kernels),
    pools after convs 2, 4, 5, 6, dense 128 -> dense 2, softmax."""
    t, h, w = input_dims
    channels = [8, 8, 16, 16, 32, 32]
    pool_after = {2, 4, 5, 6}
    layers = []
    c_in = 1
    for i, c_out in enumerate(channels, start=1):
        layers.append({"kind": "conv3d", "in_ch": c_in, "out_ch": c_out, "kernel": [3, 3, 3]})
        layers.append({"kind": "relu"})
        layers.append({"kind": "dropout", "p": dropout_p})
        if i in pool_after:
            layers.append({"kind": "maxpool3d"})
            t, h, w = -(-t // 2), -(-h // 2), -(-w // 2)
        c_in = c_out
    flat = c_in * t * h * w
    layers += [{"kind": "flatten"},
               {"kind": "dense", "in_units": flat, "out_units": 128},
               {"kind": "relu"},
               {"kind": "dropout", "p": dropout_p},
               {"kind": "dense", "in_units": 128, "out_units": 2},
               {"kind": "softmax"}]
    return NetworkConfig(input_dims=tuple(input_dims), layers=tuple(layers),
                         profile="full", seed=seed)


def desk_profile(input_dims=(16, 32, 32), dropout_p=0.5, hidden_units=32, seed=0):
    """CI-sized variant of the same family: 2 convs (4, 8), 2 pools, 2 dense."""
    t, h, w = input_dims
    layers = []
    c_in = 1
    for c_out in (4, 8):
        layers.append({"kind": "conv3d", "in_ch": c_in, "out_ch": c_out, "kernel": [3, 3, 3]})
        layers.append({"kind": "relu"})
        layers.append({"kind": "dropout", "p": dropout_p})
        layers.append({"kind": "maxpool3d"})
        t, h, w = -(-t // 2), -(-h // 2), -(-w // 2)
        c_in = c_out
    flat = c_in * t * h * w
    layers += [{"kind": "flatten"},
               {"kind": "dense", "in_units": flat, "out_units": hidden_units},
               {"kind": "relu"},
               {"kind": "dropout", "p": dropout_p},
               {"kind": "dense", "in_units": hidden_units, "out_units": 2},
               {"kind": "softmax"}]
    return NetworkConfig(input_dims=tuple(input_dims), layers=tuple(layers),
                         profile="desk", seed=seed)


def validate_network(config: NetworkConfig):
    """Check the layer list against its declared profile and chain shapes."""
    if config.profile not in PROFILES:
        raise InvalidConfig(f"unknown profile {config.profile!r}; declared: {sorted(PROFILES)}")
    counts = {"conv3d": 0, "maxpool3d": 0, "dense": 0, "softmax": 0}
    for spec in config.layers:
        if spec["kind"] in counts:
            counts[spec["kind"]] += 1
    expected = PROFILES[config.profile]
    got = (counts["conv3d"], counts["maxpool3d"], counts["dense"], counts["softmax"])
    if got != expected:
        raise InvalidConfig(f"profile {config.profile!r} expects (conv, pool, dense, softmax) "
                            f"counts {expected}, layer list has {got}")
    if config.layers[-1]["kind"] != "softmax":
        raise InvalidConfig("final layer must be softmax")
    if config.layers[-2]["kind"] != "dense" or config.layers[-2]["out_units"] != 2:
        raise InvalidConfig("softmax must follow a 2-unit dense layer")

    # shape chaining
    t, h, w = config.input_dims
    c = 1
    flat = None
    for spec in config.layers:
        kind = spec["kind"]
        if kind == "conv3d":
            if flat is not None:
                raise InvalidConfig("conv3d after flatten")
            if spec["in_ch"] != c:
                raise InvalidConfig(f"conv3d expects {spec['in_ch']} channels, chain has {c}")
            c = spec["out_ch"]
        elif kind == "maxpool3d":
            t, h, w = -(-t // 2), -(-h // 2), -(-w // 2)
        elif kind == "flatten":
            flat = c * t * h * w
        elif kind == "dense":
            if flat is None:
                raise InvalidConfig("dense before flatten")
            if spec["in_units"] != flat:
                raise InvalidConfig(f"dense expects {spec['in_units']} inputs, chain has {flat}")
            flat = spec["out_units"]
        elif kind in ("relu", "dropout", "softmax"):
            pass
        else:
            raise InvalidConfig(f"unknown layer kind {kind!r}")
    return config


# ---------------------------------------------------------------------------
# layer objects and the network
# ---------------------------------------------------------------------------

class _Layer:
    has_params = False

    def forward(self, x, training, rng):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError


class _Conv3D(_Layer):
    has_params = True

    def __init__(self, spec, rng, init_std):
        kt, kh, kw = spec["kernel"]
        self.w = rng.normal(0.0, init_std, (spec["out_ch"], spec["in_ch"], kt, kh, kw))
        self.b = np.zeros(spec["out_ch"])
        self._x = None

    def forward(self, x, training, rng):
        self._x = x
        return conv3d_forward(x, self.w, self.b)

    def backward(self, grad):
        gx, gw, gb = conv3d_backward(grad, self._x, self.w)
        self.gw, self.gb = gw, gb
        return gx


class _ReLU(_Layer):
    def forward(self, x, training, rng):
        self._mask = x > 0
        return np.maximum(x, 0.0)

    def backward(self, grad):
        return grad * self._mask


class _MaxPool3D(_Layer):
    def forward(self, x, training, rng):
        self._shape = x.shape
        out, self._arg = maxpool3d(x)
        return out

    def backward(self, grad):
        return maxpool3d_backward(grad, self._arg, self._shape)


class _Dropout(_Layer):
    def __init__(self, spec):
        self.p = spec["p"]

    def forward(self, x, training, rng):
        out, self._mask = dropout(x, self.p, rng, training)
        return out

    def backward(self, grad):
        if self._mask is None:
            return grad
        return grad * self._mask


class _Flatten(_Layer):
    def forward(self, x, training, rng):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)


class _Dense(_Layer):
    has_params = True

    def __init__(self, spec, rng, init_std):
        self.w = rng.normal(0.0, init_std, (spec["in_units"], spec["out_units"]))
        self.b = np.zeros(spec["out_units"])

    def forward(self, x, training, rng):
        self._x = x
        return dense(x, self.w, self.b)

    def backward(self, grad):
        self.gw = self._x.T @ grad
        self.gb = grad.sum(axis=0)
        return grad @ self.w.T


class _Softmax(_Layer):
    def forward(self, x, training, rng):
        return softmax(x)

    def backward(self, grad):
        # bce_loss already differentiates through the softmax, so the
        # incoming grad is d(loss)/d(logits) and passes straight through
        return grad


_LAYER_BUILDERS = {
    "conv3d": lambda spec, rng, std: _Conv3D(spec, rng, std),
    "relu": lambda spec, rng, std: _ReLU(),
    "maxpool3d": lambda spec, rng, std: _MaxPool3D(),
    "dropout": lambda spec, rng, std: _Dropout(spec),
    "flatten": lambda spec, rng, std: _Flatten(),
    "dense": lambda spec, rng, std: _Dense(spec, rng, std),
    "softmax": lambda spec, rng, std: _Softmax(),
}


class Network:
    """A validated NetworkConfig instantiated with Gaussian-initialized weights
    and per-parameter Adadelta accumulators."""

    def __init__(self, config: NetworkConfig):
        validate_network(config)
        self.config = config
        rng = np.random.default_rng(config.seed)
        self.layers = [_LAYER_BUILDERS[s["kind"]](s, rng, config.init_std)
                       for s in config.layers]
        self._opt_state = {}
        for i, layer in enumerate(self.layers):
            if layer.has_params:
                self._opt_state[i] = {"Eg_w": np.zeros_like(layer.w),
                                      "Ex_w": np.zeros_like(layer.w),
                                      "Eg_b": np.zeros_like(layer.b),
                                      "Ex_b": np.zeros_like(layer.b)}

    def forward(self, x, training=False, rng=None):
        """x: (N, T, H, W) or (T, H, W); returns class probabilities (N, 2)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 3:
            x = x[None]
        if x.shape[1:] != tuple(self.config.input_dims):
            raise ShapeMismatch(f"input dims {x.shape[1:]} != configured "
                                f"{tuple(self.config.input_dims)}")
        out = x[:, None]  # single input channel
        for layer in self.layers:
            out = layer.forward(out, training, rng)
        return out

    def backward(self, grad_logits):
        grad = grad_logits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def adadelta_step(self, tc: TrainConfig):
        for i, layer in enumerate(self.layers):
            if not layer.has_params:
                continue
            st = self._opt_state[i]
            layer.w, st["Eg_w"], st["Ex_w"] = adadelta_update(
                layer.w, layer.gw, st["Eg_w"], st["Ex_w"],
                tc.rho, tc.epsilon, tc.learning_rate)
            layer.b, st["Eg_b"], st["Ex_b"] = adadelta_update(
                layer.b, layer.gb, st["Eg_b"], st["Ex_b"],
                tc.rho, tc.epsilon, tc.learning_rate)

    # -- parameter snapshots ------------------------------------------------

    def get_parameters(self):
        """Weights and biases in layer order."""
        return [(copy.deepcopy(l.w), copy.deepcopy(l.b))
                for l in self.layers if l.has_params]

    def set_parameters(self, params):
        owners = [l for l in self.layers if l.has_params]
        if len(owners) != len(params):
            raise ShapeMismatch("parameter list does not match network")
        for layer, (w, b) in zip(owners, params):
            if layer.w.shape != w.shape or layer.b.shape != b.shape:
                raise ShapeMismatch("parameter shapes do not match network")
            layer.w = w.copy()
            layer.b = b.copy()


# ---------------------------------------------------------------------------
# checkpoint file: magic, version, canonical-JSON config, f64 LE arrays
# ---------------------------------------------------------------------------

def save_checkpoint(path, net: Network):
    cfg_json = canonical_json_bytes(net.config.to_dict())
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<H", CHECKPOINT_VERSION))
        fh.write(struct.pack("<I", len(cfg_json)))
        fh.write(cfg_json)
        for w, b in net.get_parameters():
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> Network:
    import json as _json
    with open(path, "rb") as fh:
        if fh.read(4) != CHECKPOINT_MAGIC:
            raise InvalidConfig(f"{path}: not a cineqc checkpoint")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != CHECKPOINT_VERSION:
            raise InvalidConfig(f"{path}: unsupported checkpoint version {version}")
        (n,) = struct.unpack("<I", fh.read(4))
        config = NetworkConfig.from_dict(_json.loads(fh.read(n).decode("utf-8")))
        net = Network(config)
        params = []
        for w, b in net.get_parameters():
            wbuf = fh.read(w.size * 8)
            bbuf = fh.read(b.size * 8)
            if len(wbuf) != w.size * 8 or len(bbuf) != b.size * 8:
                raise InvalidConfig(f"{path}: truncated parameter data")
            params.append((np.frombuffer(wbuf, dtype="<f8").reshape(w.shape),
                           np.frombuffer(bbuf, dtype="<f8").reshape(b.shape)))
        if fh.read(1):
            raise InvalidConfig(f"{path}: trailing bytes after parameters")
    net.set_parameters(params)
    return net


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------

def _stratified_validation_split(samples, frac, rng):
    """Hold out ~frac of the REAL samples per class for validation."""
    val_idx = set()
    for label in (GOOD, ARTEFACT):
        idx = [i for i, s in enumerate(samples) if s.label == label and s.origin == REAL]
        if len(idx) < 2:
            continue  # keep lone samples in training
        k = max(1, int(round(frac * len(idx)))) if frac > 0 else 0
        k = min(k, len(idx) - 1)
        picked = rng.permutation(len(idx))[:k]
        val_idx.update(idx[p] for p in picked)
    train = [s for i, s in enumerate(samples) if i not in val_idx]
    val = [samples[i] for i in sorted(val_idx)]
    return train, val


def _accuracy(net, samples):
    if not samples:
        return float("nan")
    x = np.stack([s.seq for s in samples])
    probs = net.forward(x, training=False)
    pred = np.where(probs[:, ARTEFACT] >= 0.5, ARTEFACT, GOOD)
    truth = np.array([s.label for s in samples])
    return float((pred == truth).mean())


def train(dataset, net_config: NetworkConfig, tc: TrainConfig, policy: AugmentPolicy = None):
    """Train the network; returns (network with best-epoch weights, history).

    The dataset is split into a stratified validation fraction (real samples
    only) and a training pool; when policy.balance is set the pool is topped
    up with k-space-corrupted artefact samples, and when max_shift_frac > 0
    each mini-batch sample gets a fresh random translation every epoch.
    Early stopping: training ends after patience_epochs epochs without a
    relative validation-accuracy improvement of at least min_rel_improvement;
    the weights of the best validation epoch are restored. Deterministic
    given (net_config.seed, tc.seed, policy.seed).
    """
    if not dataset:
        raise EmptyClass("empty training dataset")
    tc.validate()
    dims = dataset[0].seq.shape
    for s in dataset:
        if s.seq.shape != dims:
            raise ShapeMismatch("all samples must share the same dims")
    if tuple(dims) != tuple(net_config.input_dims):
        raise ShapeMismatch(f"samples {dims} do not match network input "
                            f"{tuple(net_config.input_dims)}")

    rng = np.random.default_rng(tc.seed)
    train_pool, val_pool = _stratified_validation_split(dataset, tc.validation_frac, rng)
    if policy is not None and policy.balance:
        train_pool = balance_training_set(train_pool, policy)
    translate = policy is not None and policy.max_shift_frac > 0

    net = Network(net_config)
    best_params = net.get_parameters()
    best_acc = -np.inf
    epochs_since_improvement = 0
    history = []

    n = len(train_pool)
    for epoch in range(tc.max_epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, tc.batch_size):
            batch = [train_pool[i] for i in order[start:start + tc.batch_size]]
            if translate:
                seqs = [random_translate(s.seq, policy, rng) for s in batch]
            else:
                seqs = [s.seq for s in batch]
            x = np.stack(seqs)
            y = np.array([s.label for s in batch])
            probs = net.forward(x, training=True, rng=rng)
            loss, grad = bce_loss(probs, y)
            net.backward(grad)
            net.adadelta_step(tc)
            epoch_loss += loss
            n_batches += 1

        val_acc = _accuracy(net, val_pool) if val_pool else _accuracy(net, train_pool)
        history.append({"epoch": epoch,
                        "train_loss": epoch_loss / max(1, n_batches),
                        "val_accuracy": val_acc})

        if best_acc <= 0:
            improved = val_acc > best_acc
        else:
            improved = (val_acc - best_acc) / best_acc >= tc.min_rel_improvement
        if improved:
            best_acc = val_acc
            best_params = net.get_parameters()
            epochs_since_improvement = 0
        else:
            epochs_since_improvement += 1
            if epochs_since_improvement >= tc.patience_epochs:
                break

    net.set_parameters(best_params)
    return net, history


def predict(net: Network, seq):
    """Classify one sequence with dropout disabled.

    Returns (artefact probability, hard label, inference seconds). A tie at
    exactly 0.5 labels the sequence artefact: flagging a good image is the
    cheaper quality-control mistake.
    """
    t0 = time.perf_counter()
    probs = net.forward(np.asarray(seq, dtype=np.float64), training=False)
    elapsed = time.perf_counter() - t0
    p_artefact = float(probs[0, ARTEFACT])
    label = ARTEFACT if p_artefact >= 0.5 else GOOD
    return p_artefact, label, elapsed
