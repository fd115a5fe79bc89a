"""Log-log scaling fits, octave envelopes, and box-occupancy counts.

These are the shared numeric primitives behind every power-law diagnostic in
the package: incidence exponents, box-counting dimension, and Fourier decay
envelopes all reduce to an ordinary least-squares line on log-transformed
data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power-law fit of a (scale, value) series.

    ``slope`` is the OLS slope of log(value) against log(scale) over the
    points with value > 0; ``r_squared`` is computed on the same transformed
    data.  ``points`` keeps the raw (scale, value, stderr) triples that went
    into the fit.  A degenerate fit (fewer than two usable points) carries
    ``slope = nan`` and ``defined = False``.
    """

    points: tuple[tuple[float, float, float], ...]
    slope: float
    intercept: float
    r_squared: float
    defined: bool = True

    @property
    def n_points(self) -> int:
        return len(self.points)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Plain OLS line fit; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0.0:
        raise InputError("degenerate fit: all abscissae coincide")
    sxy = np.sum((x - xm) * (y - ym))
    slope = sxy / sxx
    intercept = ym - slope * xm
    residuals = y - (slope * x + intercept)
    sst = np.sum((y - ym) ** 2)
    sse = float(np.sum(residuals**2))
    if sst <= 0.0:
        r2 = 1.0 if sse <= 1e-30 else 0.0
    else:
        r2 = 1.0 - sse / float(sst)
    return float(slope), float(intercept), float(r2)


def fit_scaling_exponent(series) -> ScalingFit:
    """OLS fit of log(value) vs log(epsilon) for a (epsilon, value[, stderr]) series.

    Points with value <= 0 are dropped before the fit; at least 3 usable
    points are required.
    """
    pts = []
    for row in series:
        eps, value = float(row[0]), float(row[1])
        err = float(row[2]) if len(row) > 2 else 0.0
        pts.append((eps, value, err))
    usable = [(e, v) for e, v, _ in pts if v > 0.0 and e > 0.0]
    if len(usable) < 3:
        raise InputError(
            f"scaling fit needs >= 3 points with positive value, got {len(usable)}"
        )
    xs = np.log([e for e, _ in usable])
    ys = np.log([v for _, v in usable])
    slope, intercept, r2 = _ols(xs, ys)
    return ScalingFit(points=tuple(pts), slope=slope, intercept=intercept, r_squared=r2)


def octave_envelope(scales, values) -> tuple[np.ndarray, np.ndarray]:
    """Per-octave maxima of ``values`` binned by log2(scale).

    Returns (argmax scales, envelope maxima); empty octaves are skipped.
    Anchoring each octave at the sample attaining the maximum keeps exact
    power-law data exactly on a line, and the maximum itself ignores
    oscillation zeros, which is what makes decay-exponent fits of
    oscillatory transforms stable.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values, dtype=float)
    if scales.size != values.size or scales.size == 0:
        raise InputError("envelope needs matching nonempty scale/value arrays")
    if np.any(scales <= 0):
        raise InputError("envelope scales must be positive")
    octaves = np.floor(np.log2(scales)).astype(int)
    anchors, maxima = [], []
    for k in np.unique(octaves):
        mask = octaves == k
        j = np.argmax(values[mask])
        anchors.append(scales[mask][j])
        maxima.append(values[mask][j])
    return np.asarray(anchors), np.asarray(maxima)


def box_counts(points: np.ndarray, scales) -> np.ndarray:
    """Occupied-box counts of a point set at each scale.

    Boxes are the grid cells ``[i*b, (i+1)*b)`` anchored at the origin; a box
    is occupied when it contains at least one point.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    counts = np.empty(len(list(scales)), dtype=np.int64)
    for j, b in enumerate(scales):
        if b <= 0:
            raise InputError("box scale must be positive")
        cells = np.floor(points / b).astype(np.int64)
        counts[j] = np.unique(cells, axis=0).shape[0]
    return counts


def box_dimension_fit(points: np.ndarray, scales) -> ScalingFit:
    """ScalingFit of log(occupied boxes) vs log(1/scale) over ``scales``."""
    scales = np.asarray(list(scales), dtype=float)
    if scales.size < 3:
        raise InputError("box-dimension fit needs at least 3 scales")
    counts = box_counts(points, scales)
    slope, intercept, r2 = _ols(np.log(1.0 / scales), np.log(counts.astype(float)))
    pts = tuple((float(b), float(n), 0.0) for b, n in zip(scales, counts))
    return ScalingFit(points=pts, slope=slope, intercept=intercept, r_squared=r2)
