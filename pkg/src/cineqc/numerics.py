"""Array containers and discrete Fourier transforms shared by the whole pipeline.

Conventions used everywhere downstream:

  * a cine sequence is a real (T, H, W) float64 array, C-ordered,
    intensities nominally in [0, 1];
  * a k-space plane is a complex128 (H, W) array;
  * forward DFT is unnormalized, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N);
    the inverse carries the 1/N factor, so inverse(forward(x)) == x.

The transforms are computed with numpy's FFT, which implements exactly this
normalization for arbitrary N; the test suite checks equivalence against a
direct O(N^2) summation oracle.
"""

import numpy as np

from .errors import InvalidBin, InvalidLength, ShapeMismatch

FORWARD = "forward"
INVERSE = "inverse"


def as_real_volume(data) -> np.ndarray:
    """Validate and return a (T, H, W) float64 volume."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.size == 0:
        raise ShapeMismatch(f"expected non-empty (T, H, W) volume, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeMismatch("volume contains non-finite values")
    return np.ascontiguousarray(arr)


def as_complex_grid(data) -> np.ndarray:
    """Validate and return an (H, W) complex128 grid."""
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeMismatch(f"expected non-empty (H, W) grid, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ShapeMismatch("grid contains non-finite values")
    return np.ascontiguousarray(arr)


def _check_direction(direction):
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be '{FORWARD}' or '{INVERSE}', got {direction!r}")


def dft1d(signal, direction=FORWARD) -> np.ndarray:
    """1D DFT of a complex vector, any length N >= 1.

    Forward is unnormalized, inverse divides by N.
    """
    _check_direction(direction)
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise InvalidLength(f"dft1d needs a non-empty 1D vector, got shape {x.shape}")
    if direction == FORWARD:
        return np.fft.fft(x)
    return np.fft.ifft(x)


def dft2d(grid, direction=FORWARD) -> np.ndarray:
    """Separable 2D DFT (rows then columns) of an (H, W) complex grid."""
    _check_direction(direction)
    g = np.asarray(grid, dtype=np.complex128)
    if g.ndim != 2 or g.size == 0:
        raise InvalidLength(f"dft2d needs a non-empty 2D grid, got shape {g.shape}")
    if direction == FORWARD:
        return np.fft.fft2(g)
    return np.fft.ifft2(g)


def temporal_dft_magnitude(seq, bin: int) -> np.ndarray:
    """Per-pixel magnitude of temporal-frequency bin `bin` of a (T, H, W) sequence.

    Bin 1 of a one-cycle cine highlights periodically moving structures;
    a static sequence gives an exactly zero map for any bin >= 1.
    """
    vol = as_real_volume(seq)
    T = vol.shape[0]
    if not 0 <= bin < T:
        raise InvalidBin(f"bin {bin} out of range for T={T}")
    spectrum = np.fft.fft(vol, axis=0)
    return np.abs(spectrum[bin])
