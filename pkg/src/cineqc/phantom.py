"""Synthetic cine phantom: a pulsating annulus standing in for a short-axis LV.

Each frame renders an anti-aliased annulus whose inner radius follows
r(t) = r0 + a*sin(2*pi*t/T) (one cycle per sequence), over a background of
fixed random rectangles/discs, plus per-frame Gaussian noise. Everything is
driven by a single seed so sequences are bit-reproducible.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidConfig


@dataclass(frozen=True)
class PhantomConfig:
    T: int = 16
    H: int = 64
    W: int = 64
    center: tuple = None          # (row, col) fractional pixels; None = image center
    base_radius: float = 10.0
    pulsation_amplitude: float = 2.0
    wall_thickness: float = 3.0
    myocardium_intensity: float = 0.85
    blood_intensity: float = 0.45
    background_intensity: float = 0.15
    noise_sigma: float = 0.02
    psf_sigma: float = 0.0        # Gaussian point-spread blur in pixels (0 = none)
    n_static_structures: int = 2
    seed: int = 0

    def resolved_center(self):
        if self.center is None:
            return ((self.H - 1) / 2.0, (self.W - 1) / 2.0)
        return (float(self.center[0]), float(self.center[1]))

    def validate(self):
        if self.T < 1 or self.H < 4 or self.W < 4:
            raise InvalidConfig(f"degenerate dims (T={self.T}, H={self.H}, W={self.W})")
        if self.pulsation_amplitude < 0 or self.wall_thickness <= 0 or self.base_radius <= 0:
            raise InvalidConfig("radius, wall thickness must be > 0 and amplitude >= 0")
        reach = self.base_radius + self.pulsation_amplitude + self.wall_thickness
        if reach >= min(self.H, self.W) / 2:
            raise InvalidConfig(f"annulus reach {reach} exceeds half image extent")
        for v in (self.myocardium_intensity, self.blood_intensity, self.background_intensity):
            if not 0.0 <= v <= 1.0:
                raise InvalidConfig("intensities must lie in [0, 1]")
        if self.noise_sigma < 0 or self.psf_sigma < 0:
            raise InvalidConfig("noise_sigma and psf_sigma must be >= 0")
        if self.n_static_structures < 0:
            raise InvalidConfig("n_static_structures must be >= 0")


def _disc_coverage(dist, radius):
    # fractional pixel coverage: linear 1-pixel ramp across the circle edge
    return np.clip(radius - dist + 0.5, 0.0, 1.0)


def _gaussian_blur_hw(frames, sigma):
    """Separable Gaussian blur over the two spatial axes, edge-padded."""
    half = max(1, int(np.ceil(3 * sigma)))
    u = np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (u / sigma) ** 2)
    kernel /= kernel.sum()
    for axis in (1, 2):
        padding = [(0, 0)] * frames.ndim
        padding[axis] = (half, half)
        padded = np.pad(frames, padding, mode="edge")
        acc = np.zeros_like(frames)
        for offset, weight in enumerate(kernel):
            index = [slice(None)] * frames.ndim
            index[axis] = slice(offset, offset + frames.shape[axis])
            acc += weight * padded[tuple(index)]
        frames = acc
    return frames


def _render_background(cfg: PhantomConfig, rng) -> np.ndarray:
    """Static background: constant level plus random rectangles/discs away from the annulus."""
    bg = np.full((cfg.H, cfg.W), cfg.background_intensity)
    cr, cc = cfg.resolved_center()
    keepout = cfg.base_radius + cfg.pulsation_amplitude + cfg.wall_thickness + 2.0
    rows, cols = np.mgrid[0:cfg.H, 0:cfg.W]
    for _ in range(cfg.n_static_structures):
        for _attempt in range(50):
            pr = rng.uniform(0, cfg.H)
            pc = rng.uniform(0, cfg.W)
            if np.hypot(pr - cr, pc - cc) > keepout + 4.0:
                break
        else:
            continue  # image too crowded; skip this structure
        intensity = rng.uniform(0.25, 0.9)
        if rng.random() < 0.5:
            radius = rng.uniform(2.0, 5.0)
            cov = _disc_coverage(np.hypot(rows - pr, cols - pc), radius)
        else:
            hh = rng.uniform(2.0, 6.0)
            hw = rng.uniform(2.0, 6.0)
            cov = (np.clip(hh - np.abs(rows - pr) + 0.5, 0, 1)
                   * np.clip(hw - np.abs(cols - pc) + 0.5, 0, 1))
        # structures never overlap the annulus keep-out, so plain compositing is safe
        bg = bg * (1 - cov) + intensity * cov
    return bg


def generate_cine(config: PhantomConfig):
    """Render the phantom sequence.

    Returns (seq, center): seq is (T, H, W) float64 in [0, 1], center is the
    ground-truth (row, col) annulus center for ROI validation.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    cr, cc = config.resolved_center()
    background = _render_background(config, rng)

    rows, cols = np.mgrid[0:config.H, 0:config.W]
    dist = np.hypot(rows - cr, cols - cc)

    frames = np.empty((config.T, config.H, config.W))
    for t in range(config.T):
        r_inner = config.base_radius + config.pulsation_amplitude * np.sin(2 * np.pi * t / config.T)
        cov_outer = _disc_coverage(dist, r_inner + config.wall_thickness)
        cov_inner = _disc_coverage(dist, r_inner)
        ring = cov_outer - cov_inner
        frames[t] = (background * (1 - cov_outer)
                     + config.myocardium_intensity * ring
                     + config.blood_intensity * cov_inner)

    if config.psf_sigma > 0:
        frames = _gaussian_blur_hw(frames, config.psf_sigma)
    if config.noise_sigma > 0:
        frames += rng.normal(0.0, config.noise_sigma, frames.shape)
    np.clip(frames, 0.0, 1.0, out=frames)
    return frames, (cr, cc)


def jittered_config(base: PhantomConfig, rng, center_span=0.25, radius_jitter=0.15,
                    noise_range=(0.5, 2.0), psf_range=(0.0, 1.0)):
    """Draw a per-sample phantom variant: random center inside the central
    `center_span` fraction of the image, jittered base radius, and per-sample
    noise level and point-spread blur.

    The noise/sharpness spread models cohort heterogeneity (different
    subjects, coils, protocols): it keeps scalar sharpness scores from
    trivially separating corrupted and clean samples, which they never do on
    real data.
    """
    half_r = center_span * base.H / 2
    half_c = center_span * base.W / 2
    center = ((base.H - 1) / 2 + rng.uniform(-half_r, half_r),
              (base.W - 1) / 2 + rng.uniform(-half_c, half_c))
    radius = base.base_radius * (1 + rng.uniform(-radius_jitter, radius_jitter))
    noise = base.noise_sigma * rng.uniform(*noise_range)
    psf = rng.uniform(*psf_range)
    return replace(base, center=center, base_radius=radius, noise_sigma=noise,
                   psf_sigma=psf, seed=int(rng.integers(0, 2**31 - 1)))
