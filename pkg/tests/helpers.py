"""Shared oracles and finite-difference helpers for the test suite."""

import numpy as np

FD_H = 1e-5
FD_TOL = 1e-4


def rel_err(a, b):
    return abs(a - b) / max(1e-8, abs(a) + abs(b))


def naive_conv3d(x, w, b):
    """Direct 7-loop summation of the same-padded stride-1 correlation."""
    C, T, H, W = x.shape
    co, ci, kt, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), ((kt - 1) // 2, kt // 2), ((kh - 1) // 2, kh // 2),
                    ((kw - 1) // 2, kw // 2)))
    out = np.zeros((co, T, H, W))
    for d in range(co):
        for t in range(T):
            for r in range(H):
                for c in range(W):
                    acc = 0.0
                    for ch in range(ci):
                        for i in range(kt):
                            for j in range(kh):
                                for k in range(kw):
                                    acc += w[d, ch, i, j, k] * xp[ch, t + i, r + j, c + k]
                    out[d, t, r, c] = acc + b[d]
    return out


def fd_grad(f, arr, indices, h=FD_H):
    """Central finite differences of scalar f at the given indices of arr."""
    grads = []
    for idx in indices:
        orig = arr[idx]
        arr[idx] = orig + h
        fp = f()
        arr[idx] = orig - h
        fm = f()
        arr[idx] = orig
        grads.append((fp - fm) / (2 * h))
    return np.array(grads)


def sample_indices(shape, n, rng):
    return [tuple(rng.integers(0, s) for s in shape) for _ in range(n)]


def full_net_gradient_worst_error(seed=12, n_per_array=6, h=1e-6):
    """Worst relative error between backprop and central finite differences
    over sampled parameters of the desk-scale network.

    h is below the per-layer 1e-5: a conv bias perturbation shifts every
    voxel, so a handful of ReLU/pool pre-activations cross their kink inside
    the +/-h interval, and that finite-difference artifact shrinks linearly
    with h while the f64 roundoff floor stays far below the tolerance.
    """
    from cineqc.cnn import Network, bce_loss, desk_profile

    config = desk_profile(input_dims=(16, 32, 32), dropout_p=0.0, seed=seed)
    net = Network(config)
    rng = np.random.default_rng(seed + 1)
    x = rng.random((1, 16, 32, 32))
    y = np.array([1])

    def loss():
        return bce_loss(net.forward(x, training=True, rng=rng), y)[0]

    probs = net.forward(x, training=True, rng=rng)
    _, grad = bce_loss(probs, y)
    net.backward(grad)

    worst = 0.0
    for layer in net.layers:
        if not layer.has_params:
            continue
        for arr, grad_arr in ((layer.w, layer.gw), (layer.b, layer.gb)):
            for idx in sample_indices(arr.shape, n_per_array, rng):
                orig = arr[idx]
                arr[idx] = orig + h
                fp = loss()
                arr[idx] = orig - h
                fm = loss()
                arr[idx] = orig
                worst = max(worst, rel_err((fp - fm) / (2 * h), grad_arr[idx]))
    return worst
