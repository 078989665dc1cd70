"""Cartesian k-space line-replacement corruption for simulating motion artefacts.

A mistriggered cine acquisition stores k-space lines of the wrong cardiac
phase. That is reproduced literally: every frame of a sequence is transformed
to k-space, and every z-th row is swapped for the same row taken from another
frame's k-space (frame index offset by j, modulo T). Inverting the corrupted
plane and taking the magnitude gives a realistically ghosted/blurred frame.

"Lines" are k-space rows (first image axis), modeling the phase-encode
direction of a Cartesian cine acquisition.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientFrames, InvalidConfig
from .numerics import as_real_volume, dft2d

RANDOM = "random"

DEFAULT_Z = 3  # replacing 1-in-3 lines gives realistic ghosting


@dataclass(frozen=True)
class CorruptionSpec:
    """Parameters of the line-replacement scheme.

    z: every z-th k-space row is replaced (z=1 replaces all rows).
    offset: source-frame offset j; an int for a fixed offset, or "random"
        for a per-frame draw from {1, ..., T-1} (0 excluded so corrupted
        frames never equal clean ones).
    phase: row-index residue phi of the replaced lines (rows l with
        l % z == phi); an int, or "random" for a per-frame draw from
        {0, ..., z-1}.
    """
    z: int = DEFAULT_Z
    offset: object = RANDOM
    phase: object = 0
    seed: int = 0

    def validate(self, n_frames=None):
        if self.z < 1:
            raise InvalidConfig(f"z must be >= 1, got {self.z}")
        if self.offset != RANDOM:
            j = int(self.offset)
            if j < 0 or (n_frames is not None and j >= n_frames):
                raise InvalidConfig(f"fixed offset {j} outside [0, T)")
        if self.phase != RANDOM:
            phi = int(self.phase)
            if not 0 <= phi < self.z:
                raise InvalidConfig(f"fixed phase {phi} outside [0, z)")


def to_kspace(frame) -> np.ndarray:
    """Forward 2D DFT of a real frame."""
    f = np.asarray(frame, dtype=np.float64)
    return dft2d(f, "forward")


def from_kspace(grid) -> np.ndarray:
    """Magnitude of the inverse 2D DFT.

    Corruption breaks Hermitian symmetry, so the inverse is complex in
    general; the magnitude mirrors MR reconstruction.
    """
    return np.abs(dft2d(grid, "inverse"))


def draw_frame_plan(spec: CorruptionSpec, n_frames: int, rng=None):
    """Pre-generate the per-frame (offset, phase) pairs in frame order.

    Doing the draws up front, from the seed alone, keeps parallel and serial
    corruption bit-identical.
    """
    spec.validate(n_frames)
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    offsets = np.empty(n_frames, dtype=np.int64)
    phases = np.empty(n_frames, dtype=np.int64)
    for i in range(n_frames):
        if spec.offset == RANDOM:
            if n_frames < 2:
                raise InsufficientFrames("random offsets need at least 2 frames")
            offsets[i] = rng.integers(1, n_frames)
        else:
            offsets[i] = int(spec.offset)
        if spec.phase == RANDOM:
            phases[i] = rng.integers(0, spec.z)
        else:
            phases[i] = int(spec.phase)
    return offsets, phases


def corrupt_sequence(seq, spec: CorruptionSpec, rng=None) -> np.ndarray:
    """Apply line replacement to every frame of a [0,1] sequence.

    Frame i gets rows {l : l % z == phi_i} of its k-space overwritten with
    the same rows from frame (i + j_i) mod T, then is reconstructed by
    magnitude inverse DFT and re-clamped to [0, 1].
    """
    vol = as_real_volume(seq)
    T = vol.shape[0]
    offsets, phases = draw_frame_plan(spec, T, rng)

    kspaces = np.fft.fft2(vol, axes=(1, 2))
    out = np.empty_like(vol)
    for i in range(T):
        k = kspaces[i].copy()
        src = (i + offsets[i]) % T
        rows = np.arange(phases[i], vol.shape[1], spec.z)
        k[rows, :] = kspaces[src][rows, :]
        out[i] = np.abs(np.fft.ifft2(k))
    np.clip(out, 0.0, 1.0, out=out)
    return out
