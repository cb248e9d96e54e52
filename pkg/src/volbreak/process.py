"""Residual marks and the sequential marked empirical process surface.

The mark of observation t is the windowed centered squared residual

    xi_t = ((Y_t - m(X_t))^2 - sigma2(X_t)) * 1{X_t in window},

and the process surface collects the scaled partial sums

    T(k/n, z) = n^(-1/2) sum_{t<=k} xi_t 1{X_t <= z}   (componentwise <=)

on the time grid k = 0..n and a space grid of the in-window sample points
plus a +inf sentinel. For d = 1 the surface is a step function in z with
jumps only at in-window sample values, so this grid attains the exact
supremum; for d >= 2 the sample-point grid is the usual approximation.
"""

from dataclasses import dataclass, field

import numpy as np

from .backend import impl
from .errors import ConfigError, VolbreakError
from .kernels import EstimatorConfig, estimates_at_sample, in_window
from .models import Sample


@dataclass
class MarkVector:
    """Windowed residual marks, one per observation."""

    marks: np.ndarray
    in_window: np.ndarray = field(repr=False)
    weights_applied: bool = True

    def __post_init__(self):
        self.marks = np.asarray(self.marks, dtype=float)
        self.in_window = np.asarray(self.in_window, dtype=bool)
        if self.marks.shape != self.in_window.shape:
            raise ConfigError("marks and in_window must have equal length")


@dataclass
class ProcessGrid:
    """The evaluated surface T(k/n, z_j).

    values has shape (n+1, len(z_grid)); row 0 is identically zero and the
    last z_grid entry is the +inf sentinel, whose column carries the plain
    (unrestricted in z) cumulative sums.
    """

    s_grid: np.ndarray
    z_grid: np.ndarray
    values: np.ndarray
    n: int
    d: int


def residual_marks(sample: Sample, config: EstimatorConfig) -> MarkVector:
    """Compute the windowed residual marks of every observation."""
    mhat, sigma2 = estimates_at_sample(sample, config)
    bad = ~(np.isfinite(mhat) & np.isfinite(sigma2))
    if bad.any():
        idx = int(np.argmax(bad))
        raise VolbreakError(f"non-finite estimator output at sample index {idx}")
    window = in_window(sample.x, config)
    marks = ((sample.y - mhat) ** 2 - sigma2) * window
    return MarkVector(marks=marks, in_window=window)


def _z_grid(sample: Sample, window: np.ndarray) -> np.ndarray:
    pts = sample.x[window]
    if pts.shape[0] > 0:
        pts = np.unique(pts, axis=0)  # lexicographic sort, ties collapsed
        grid = np.vstack([pts, np.full((1, sample.d), np.inf)])
    else:
        grid = np.full((1, sample.d), np.inf)
    return grid


def build_grid(marks: MarkVector, sample: Sample) -> ProcessGrid:
    """Evaluate the process surface on the canonical time and space grids."""
    n = sample.n
    if marks.marks.shape[0] != n:
        raise ConfigError("marks and sample lengths differ")
    z = _z_grid(sample, marks.in_window)
    values = impl.grid_values(marks.marks, sample.x, z)
    return ProcessGrid(
        s_grid=np.arange(n + 1) / n,
        z_grid=z,
        values=values,
        n=n,
        d=sample.d,
    )


def cusum_profile(grid: ProcessGrid) -> np.ndarray:
    """Profile k -> max_z |T(k/n, z)|, one entry per time-grid row."""
    return np.abs(grid.values).max(axis=1)
