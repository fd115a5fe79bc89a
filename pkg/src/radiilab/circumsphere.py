"""Circumspheres of (d+1)-point tuples in R^d.

The radius function assigns to a (d+1)-tuple the radius of the unique
(d-1)-sphere through all of its points, and 0 when that sphere fails to
exist or to be unique (affinely dependent tuples, including repeats).

Two independent computations are provided:

* ``circumsphere`` solves the linear system obtained by translating the last
  point to the origin: ``2 u_i . c = |u_i|^2`` with ``u_i = x_i - x_last``,
  giving the center and radius directly.
* ``cayley_menger_radius`` uses the classical determinant identity
  ``R^2 = -det(D) / (2 det(CM))`` over pairwise squared distances, which
  shares no code path with the linear solve and serves as its oracle.

Degeneracy is declared through an explicit tolerance band: the tuple is
treated as affinely dependent when the system determinant is below
``1e-10`` times the product of row norms (a partial-pivot style scale).
Near-degenerate tuples below the band yield honestly huge radii; callers
that window radii by bounded targets are unaffected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

# Rank-deficiency band relative to the scale of the difference matrix.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ConfigTuple:
    """A (d+1)-point tuple with its circumsphere data.

    ``degenerate`` is true exactly when no unique sphere exists; then the
    radius is 0 and the center is absent.
    """

    dimension: int
    points: np.ndarray  # (d+1, d)
    center: np.ndarray | None
    radius: float
    degenerate: bool


def _validate_points(points: np.ndarray, d: int | None = None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise InputError("points must be a 2-D array of shape (d+1, d)")
    if not np.all(np.isfinite(pts)):
        raise InputError("points must have finite coordinates")
    n, dim = pts.shape
    if d is None:
        d = dim
    if dim != d or n != d + 1:
        raise InputError(f"expected {d + 1} points in R^{d}, got shape {pts.shape}")
    return pts


def circumsphere(points) -> ConfigTuple:
    """Circumsphere of d+1 points in R^d, degenerate-aware.

    Solves ``2 (x_i - x_last) . c' = |x_i - x_last|^2`` for the center
    relative to the last point.  Rank deficiency within the tolerance band
    returns the degenerate tuple (radius 0, no center).
    """
    pts = _validate_points(points)
    d = pts.shape[1]
    u = pts[:-1] - pts[-1]
    norms = np.linalg.norm(u, axis=1)
    if np.any(norms == 0.0):
        return ConfigTuple(d, pts, None, 0.0, True)
    det = float(np.linalg.det(u))
    if abs(det) <= DEGENERACY_TOL * float(np.prod(norms)):
        return ConfigTuple(d, pts, None, 0.0, True)
    rhs = 0.5 * np.sum(u * u, axis=1)
    rel_center = np.linalg.solve(u, rhs)
    radius = float(np.linalg.norm(rel_center))
    center = rel_center + pts[-1]
    return ConfigTuple(d, pts, center, radius, False)


def circumradius_batch(points: np.ndarray) -> np.ndarray:
    """Radii of a batch of tuples, 0 where degenerate.

    ``points`` has shape (n, d+1, d).  Dimensions 2 and 3 use closed forms;
    higher dimensions fall back to batched linear solves.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 3 or pts.shape[2] + 1 != pts.shape[1]:
        raise InputError("batch must have shape (n, d+1, d)")
    d = pts.shape[2]
    u = pts[:, :-1, :] - pts[:, -1:, :]
    norms = np.linalg.norm(u, axis=2)
    sq = np.sum(u * u, axis=2)

    if d == 2:
        det = u[:, 0, 0] * u[:, 1, 1] - u[:, 0, 1] * u[:, 1, 0]
        scale = norms[:, 0] * norms[:, 1]
        good = np.abs(det) > DEGENERACY_TOL * scale
        radii = np.zeros(pts.shape[0])
        with np.errstate(divide="ignore", invalid="ignore"):
            cx = 0.5 * (sq[:, 0] * u[:, 1, 1] - sq[:, 1] * u[:, 0, 1]) / det
            cy = 0.5 * (u[:, 0, 0] * sq[:, 1] - u[:, 1, 0] * sq[:, 0]) / det
        radii[good] = np.hypot(cx[good], cy[good])
        return radii

    if d == 3:
        cross23 = np.cross(u[:, 1], u[:, 2])
        cross31 = np.cross(u[:, 2], u[:, 0])
        cross12 = np.cross(u[:, 0], u[:, 1])
        det = np.einsum("ij,ij->i", u[:, 0], cross23)
        scale = norms[:, 0] * norms[:, 1] * norms[:, 2]
        good = np.abs(det) > DEGENERACY_TOL * scale
        radii = np.zeros(pts.shape[0])
        with np.errstate(divide="ignore", invalid="ignore"):
            num = (
                sq[:, 0, None] * cross23
                + sq[:, 1, None] * cross31
                + sq[:, 2, None] * cross12
            )
            center = 0.5 * num / det[:, None]
        radii[good] = np.linalg.norm(center[good], axis=1)
        return radii

    det = np.linalg.det(u)
    scale = np.prod(norms, axis=1)
    good = np.abs(det) > DEGENERACY_TOL * scale
    radii = np.zeros(pts.shape[0])
    if np.any(good):
        sol = np.linalg.solve(u[good], 0.5 * sq[good][..., None])
        radii[good] = np.linalg.norm(sol[..., 0], axis=1)
    return radii


def circumradius_of_differences(differences) -> float:
    """Radius from the translation-reduced form.

    Given the d difference vectors ``u_i = base - x_i`` of a tuple relative
    to its last point, the circumradius equals that of the tuple
    ``{-u_1, ..., -u_d, 0}``; the value is independent of the base point.
    """
    diffs = np.asarray(differences, dtype=float)
    if diffs.ndim != 2 or diffs.shape[0] != diffs.shape[1]:
        raise InputError("expected d difference vectors in R^d")
    if not np.all(np.isfinite(diffs)):
        raise InputError("differences must be finite")
    d = diffs.shape[1]
    pts = np.vstack([-diffs, np.zeros((1, d))])
    return circumsphere(pts).radius


def cayley_menger_radius(points) -> float:
    """Circumradius via the Cayley-Menger determinant ratio.

    With D the (d+1)x(d+1) matrix of pairwise squared distances and CM its
    bordered (d+2)x(d+2) extension, ``R^2 = -det(D) / (2 det(CM))``.  The
    simplex-volume determinant det(CM) vanishing within tolerance yields 0.
    """
    pts = _validate_points(points)
    return float(cayley_menger_radius_batch(pts[None, :, :])[0])


def cayley_menger_radius_batch(points: np.ndarray) -> np.ndarray:
    """Vectorized Cayley-Menger radii for a batch of (d+1)-tuples."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 3 or pts.shape[2] + 1 != pts.shape[1]:
        raise InputError("batch must have shape (n, d+1, d)")
    if not np.all(np.isfinite(pts)):
        raise InputError("points must have finite coordinates")
    n, m, _ = pts.shape
    diffs = pts[:, :, None, :] - pts[:, None, :, :]
    dist2 = np.sum(diffs * diffs, axis=3)
    # normalize per tuple so the determinant tolerance is dimensionless
    scale = dist2.reshape(n, -1).max(axis=1)
    ok = scale > 0.0
    dn = np.where(ok[:, None, None], dist2 / np.where(ok, scale, 1.0)[:, None, None], 0.0)
    cm = np.ones((n, m + 1, m + 1))
    cm[:, 0, 0] = 0.0
    cm[:, 1:, 1:] = dn
    det_cm = np.linalg.det(cm)
    det_d = np.linalg.det(dn)
    radii = np.zeros(n)
    good = ok & (np.abs(det_cm) > 1e-13)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = -det_d / (2.0 * det_cm)
    good &= r2 > 0.0
    radii[good] = np.sqrt(r2[good] * scale[good])
    return radii
