"""Numba-compiled inner loops for the 3D CNN.

Literal loop transcriptions of the defining summations (the same arithmetic
the test oracles spell out), compiled for speed. The innermost loops run
along the contiguous W axis of (N, C, T, H, W) tensors so LLVM can vectorize
them. Everything is single-threaded with a fixed accumulation order, so
results are bit-identical across runs.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def conv3d_fwd(xp, w, b, out):
    """Stride-1 correlation over a pre-padded input.

    xp: (N, C, T+kt-1, H+kh-1, W+kw-1); w: (D, C, kt, kh, kw); out: (N, D, T, H, W).
    """
    N, D, T, H, W = out.shape
    C = xp.shape[1]
    kt, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    for n in range(N):
        for d in range(D):
            for t in range(T):
                for h in range(H):
                    for x in range(W):
                        out[n, d, t, h, x] = b[d]
            for c in range(C):
                for i in range(kt):
                    for j in range(kh):
                        for k in range(kw):
                            wv = w[d, c, i, j, k]
                            for t in range(T):
                                for h in range(H):
                                    for x in range(W):
                                        out[n, d, t, h, x] += wv * xp[n, c, t + i, h + j, x + k]


@njit(cache=True)
def conv3d_bwd(xp, g, w, gxp, gw, gb):
    """All three gradients of conv3d_fwd in one pass.

    g: (N, D, T, H, W) upstream gradient; gxp accumulates the padded input
    gradient (crop afterwards); gw, gb accumulate in place.
    """
    N, D, T, H, W = g.shape
    C = xp.shape[1]
    kt, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    for n in range(N):
        for d in range(D):
            s = 0.0
            for t in range(T):
                for h in range(H):
                    for x in range(W):
                        s += g[n, d, t, h, x]
            gb[d] += s
            for c in range(C):
                for i in range(kt):
                    for j in range(kh):
                        for k in range(kw):
                            wv = w[d, c, i, j, k]
                            s = 0.0
                            for t in range(T):
                                for h in range(H):
                                    for x in range(W):
                                        gv = g[n, d, t, h, x]
                                        s += gv * xp[n, c, t + i, h + j, x + k]
                                        gxp[n, c, t + i, h + j, x + k] += gv * wv
                            gw[d, c, i, j, k] += s


@njit(cache=True)
def pool3d_fwd(x, out, arg):
    """2x2x2/stride-2 max pool, ceil mode: odd trailing windows shrink instead
    of reading -inf padding. arg stores the in-window linear index dt*4+dh*2+dw."""
    N, C, T, H, W = x.shape
    T2, H2, W2 = out.shape[2], out.shape[3], out.shape[4]
    for n in range(N):
        for c in range(C):
            for t2 in range(T2):
                for h2 in range(H2):
                    for w2 in range(W2):
                        best = -np.inf
                        besti = 0
                        for dt in range(2):
                            t = 2 * t2 + dt
                            if t >= T:
                                break
                            for dh in range(2):
                                h = 2 * h2 + dh
                                if h >= H:
                                    break
                                for dw in range(2):
                                    x2 = 2 * w2 + dw
                                    if x2 >= W:
                                        break
                                    v = x[n, c, t, h, x2]
                                    if v > best:
                                        best = v
                                        besti = dt * 4 + dh * 2 + dw
                        out[n, c, t2, h2, w2] = best
                        arg[n, c, t2, h2, w2] = besti


@njit(cache=True)
def pool3d_bwd(g, arg, gx):
    """Scatter pooled gradients back to the argmax voxels (gx pre-zeroed)."""
    N, C, T2, H2, W2 = g.shape
    for n in range(N):
        for c in range(C):
            for t2 in range(T2):
                for h2 in range(H2):
                    for w2 in range(W2):
                        a = arg[n, c, t2, h2, w2]
                        gx[n, c, 2 * t2 + a // 4, 2 * h2 + (a % 4) // 2,
                           2 * w2 + a % 2] += g[n, c, t2, h2, w2]
