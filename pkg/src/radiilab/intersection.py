"""Annulus restrictions, dilation sets, sphere fitting, and the radii set.

Discrete analogs of intersection diagnostics: restricting a measure to a thin
annulus ``{x : ||x - a| - r| < delta}`` (hard truncation in place of a
mollified limit), scanning the restriction mass over a radius grid to
estimate the Lebesgue measure of the set of radii carrying mass, box-counting
the retained atoms, fitting a single sphere through noisy point sets, and
covering the set of circumradii realized by tuples of the measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circumsphere import circumradius_batch
from .errors import InputError, ResourceError
from .incidence import exhaustive_tuple_radii, sample_tuple_radii
from .measures import DiscreteMeasure
from .scaling import ScalingFit, box_counts, box_dimension_fit

__all__ = [
    "AnnulusSlice",
    "DilationSet",
    "SphereFit",
    "annulus_mass",
    "dilation_set",
    "center_validity",
    "intersection_dimension",
    "unique_sphere_fit",
    "radii_set_measure",
]


@dataclass(frozen=True)
class AnnulusSlice:
    """Atoms of a measure retained by a thin annulus, with their mass."""

    center: np.ndarray
    radius: float
    thickness: float
    atoms: np.ndarray
    masses: np.ndarray
    total_mass: float


@dataclass(frozen=True)
class DilationSet:
    """Annulus-mass profile over a radius grid around one center.

    ``intervals`` are the maximal grid runs whose mass clears the threshold;
    ``lebesgue_estimate`` is the total covered length (each grid point covers
    one grid cell).
    """

    center: np.ndarray
    r_grid: np.ndarray
    masses: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    lebesgue_estimate: float


@dataclass(frozen=True)
class SphereFit:
    """Result of a least-squares sphere fit: status is ok / ambiguous / inconsistent."""

    status: str
    center: np.ndarray | None
    radius: float
    residual: float


def annulus_mass(measure: DiscreteMeasure, a, r: float, delta: float) -> AnnulusSlice:
    """Hard-truncation restriction to {x : ||x - a| - r| < delta}.

    Requires delta >= resolution so the annulus is resolvable at the
    measure's generation scale.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (measure.dimension,):
        raise InputError("center dimension does not match the measure")
    if not (r > 0.0):
        raise InputError("radius must be positive")
    if delta < measure.resolution:
        raise InputError(
            f"annulus thickness {delta} is below the measure resolution "
            f"{measure.resolution}"
        )
    dist = np.linalg.norm(measure.atoms - a[None, :], axis=1)
    kept = np.abs(dist - r) < delta
    masses = measure.masses[kept]
    return AnnulusSlice(
        center=a,
        radius=float(r),
        thickness=float(delta),
        atoms=measure.atoms[kept],
        masses=masses,
        total_mass=float(np.sum(masses)),
    )


def dilation_set(
    measure: DiscreteMeasure,
    a,
    delta: float,
    threshold: float,
    r_grid,
) -> DilationSet:
    """Annulus-mass sweep over ``r_grid`` with interval extraction.

    The grid must be increasing with spacing at most delta (coarser grids
    alias thin annuli).  A grid point qualifies when its mass exceeds the
    threshold (strictly, for the default threshold 0, matching "any positive
    slice mass"; at or above, for positive thresholds).
    """
    a = np.asarray(a, dtype=float)
    grid = np.asarray(list(r_grid), dtype=float)
    if grid.size < 1 or np.any(np.diff(grid) <= 0.0):
        raise InputError("r_grid must be strictly increasing and nonempty")
    if delta < measure.resolution:
        raise InputError("delta must be at least the measure resolution")
    spacings = np.diff(grid)
    if spacings.size and spacings.max() > delta * (1.0 + 1e-12):
        raise InputError("grid spacing exceeds delta: the sweep would alias")

    raw = np.linalg.norm(measure.atoms - a[None, :], axis=1)
    order = np.argsort(raw, kind="stable")
    dist = raw[order]
    mass_prefix = np.concatenate([[0.0], np.cumsum(measure.masses[order])])
    lo_idx = np.searchsorted(dist, grid - delta, side="right")
    hi_idx = np.searchsorted(dist, grid + delta, side="left")
    masses = mass_prefix[hi_idx] - mass_prefix[lo_idx]

    if threshold == 0.0:
        qualifies = masses > 0.0
    else:
        qualifies = masses >= threshold

    # per-point covered widths (midpoint cells; uniform grids give the spacing)
    if grid.size == 1:
        widths = np.array([delta])
    else:
        mids = 0.5 * (grid[:-1] + grid[1:])
        edges = np.concatenate(
            [[grid[0] - (mids[0] - grid[0])], mids, [grid[-1] + (grid[-1] - mids[-1])]]
        )
        widths = np.diff(edges)

    intervals = []
    covered = 0.0
    i = 0
    n = grid.size
    while i < n:
        if qualifies[i]:
            j = i
            while j + 1 < n and qualifies[j + 1]:
                j += 1
            intervals.append((float(grid[i]), float(grid[j])))
            covered += float(np.sum(widths[i : j + 1]))
            i = j + 1
        else:
            i += 1
    return DilationSet(
        center=a,
        r_grid=grid,
        masses=masses,
        intervals=tuple(intervals),
        lebesgue_estimate=covered,
    )


def center_validity(measure: DiscreteMeasure, a) -> bool:
    """Whether every point of space lies on some sphere about ``a``.

    For spheres this fails only when the center collides with an atom
    (within half the resolution); retained as a predicate for future
    non-spherical dilation families.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (measure.dimension,):
        raise InputError("center dimension does not match the measure")
    dmin = float(np.min(np.linalg.norm(measure.atoms - a[None, :], axis=1)))
    return dmin > measure.resolution / 2.0


def intersection_dimension(
    measure: DiscreteMeasure,
    a,
    r: float,
    delta: float,
    scale_grid,
) -> ScalingFit:
    """Box-counting fit restricted to the atoms of an annulus slice.

    Scales must lie in [max(resolution, delta), ~diameter]: below the slice
    thickness the count recovers the ambient dimension rather than the
    intersection's.  Raises for an empty slice or a slice occupying fewer
    than two boxes at the finest scale.
    """
    slice_ = annulus_mass(measure, a, r, delta)
    if slice_.total_mass <= 0.0 or slice_.atoms.shape[0] == 0:
        raise InputError("empty annulus slice: nothing to box-count")
    scales = sorted(float(b) for b in scale_grid)
    if len(scales) < 3:
        raise InputError("need at least 3 scales for a dimension fit")
    lo = max(measure.resolution, delta) * (1.0 - 1e-9)
    hi = measure.diameter * 2.0
    for b in scales:
        if not (lo <= b <= hi):
            raise InputError(
                f"scale {b} outside [max(resolution, delta), 2*diameter] = [{lo}, {hi}]"
            )
    finest = box_counts(slice_.atoms, [scales[0]])[0]
    if finest < 2:
        raise InputError("insufficient occupied boxes in the slice for a fit")
    return box_dimension_fit(slice_.atoms, scales[::-1])


def unique_sphere_fit(points, tol: float = 1e-9) -> SphereFit:
    """Least-squares sphere through >= d+1 points, with degeneracy labels.

    The linearized system is solved on centered coordinates; a centered rank
    below d (points inside a hyperplane or a lower-dimensional sphere) is
    ``ambiguous``; residuals above tol are ``inconsistent``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2:
        raise InputError("points must form a 2-D array")
    n, d = pts.shape
    if n < d + 1:
        raise InputError(f"need at least {d + 1} points in R^{d}")
    if not np.all(np.isfinite(pts)):
        raise InputError("points must be finite")

    mean = pts.mean(axis=0)
    q = pts - mean
    svals = np.linalg.svd(q, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] <= tol * svals[0]:
        return SphereFit("ambiguous", None, 0.0, float("inf"))
    rhs = np.sum(q * q, axis=1)
    rhs = rhs - rhs.mean()
    sol, *_ = np.linalg.lstsq(2.0 * q, rhs, rcond=None)
    center = mean + sol
    dists = np.linalg.norm(pts - center[None, :], axis=1)
    radius = float(np.sqrt(np.mean(dists**2)))
    residual = float(np.max(np.abs(dists - radius)))
    scale = max(radius, 1.0)
    if residual > tol * scale:
        return SphereFit("inconsistent", None, 0.0, residual)
    return SphereFit("ok", center, radius, residual)


def _covered_length(radii: np.ndarray, eps: float) -> float:
    """Length of the union of [r - eps, r + eps] over the given radii."""
    if radii.size == 0:
        return 0.0
    r = np.unique(radii)
    gaps = np.diff(r)
    return float(2.0 * eps + np.sum(np.minimum(gaps, 2.0 * eps)))


def radii_set_measure(
    measure: DiscreteMeasure,
    epsilon_grid,
    budget: int = 2_000_000,
    seed: int = 0,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Covering-length estimates of the set of realized circumradii.

    Collects the radii of nondegenerate (d+1)-tuples (exhaustively when the
    tuple count fits the budget, by seeded sampling otherwise) and reports,
    for each epsilon, the length of the union of the +-epsilon neighborhoods
    of the collected radii.  A positive stable limit as epsilon decreases
    indicates positive Lebesgue measure; measures supported in a hyperplane
    give exactly 0 at every epsilon.
    """
    eps_list = [float(e) for e in epsilon_grid]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise InputError("epsilon grid must be nonempty and positive")
    n = len(measure)
    total = n ** (measure.dimension + 1)
    if total <= budget:
        parts = [radii[radii > 0.0] for radii, _ in exhaustive_tuple_radii(measure)]
        radii = np.concatenate(parts) if parts else np.empty(0)
    else:
        radii = sample_tuple_radii(measure, budget, seed, threads=threads)
        radii = radii[radii > 0.0]
    return [(eps, _covered_length(radii, eps)) for eps in eps_list]
