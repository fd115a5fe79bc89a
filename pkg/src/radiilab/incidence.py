"""Incidence statistics of the circumradius map and their scaling in the window width.

The basic statistic is the product-measure mass of ordered (d+1)-tuples whose
circumradius falls within epsilon of a target t.  Ordered tuples with
repetition match the product-measure definition; repeated-point tuples are
degenerate (radius 0) and contribute only when t < epsilon.

Beyond the plain statistic this module provides the conditional variant (mass
in the third point only, for a fixed pair) and an adversarial profile that
searches pairs inside two horizontal unit strips for the largest conditional
mass, emulating the alignment of a thin near-vertical annulus cap with the
lattice structure of a translate-union construction.  For product measures
the conditional mass is evaluated exactly, column by column: the sublevel set
{R < s} of the circumradius with a fixed pair is the symmetric difference of
the two radius-s disks through the pair, so each vertical column meets the
window {|R - t| < eps} in at most four intervals whose measure is read off
prefix sums.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circumsphere import circumradius_batch
from .errors import InputError, ResourceError
from .measures import Axis1D, DiscreteMeasure, Interval, ProductSpec, SetSpec, axis_cells
from .scaling import ScalingFit, fit_scaling_exponent  # noqa: F401  (re-exported)
from .seeding import spawn_generator

BATCH = 65_536

__all__ = [
    "IncidenceQuery",
    "PairSearchGrid",
    "incidence_statistic",
    "conditional_incidence",
    "adversarial_conditional_profile",
    "fit_scaling_exponent",
    "sample_tuple_radii",
    "exhaustive_tuple_radii",
    "depth_for_epsilon",
]


@dataclass(frozen=True)
class IncidenceQuery:
    """Window query: target radius t, half-width epsilon, and evaluation plan."""

    t: float
    epsilon: float
    mode: str = "exhaustive"
    budget: int = 20_000_000
    seed: int = 0

    def __post_init__(self):
        if not (self.t > 0.0 and np.isfinite(self.t)):
            raise InputError("target radius t must be positive and finite")
        if not (0.0 < self.epsilon < self.t):
            raise InputError("need 0 < epsilon < t for a meaningful window")
        if self.mode not in ("exhaustive", "monte-carlo"):
            raise InputError("mode must be 'exhaustive' or 'monte-carlo'")
        if self.budget < 1:
            raise InputError("budget must be positive")


# ---------------------------------------------------------------------------
# Tuple drawing and enumeration
# ---------------------------------------------------------------------------
def _source_dim(measure) -> int:
    if isinstance(measure, DiscreteMeasure):
        return measure.dimension
    return len(measure)


def _draw_tuple_points(measure, rng, count: int, arity: int) -> np.ndarray:
    """(count, arity, d) points drawn i.i.d. by mass from the measure."""
    if isinstance(measure, DiscreteMeasure):
        idx = rng.choice(len(measure), size=(count, arity), p=measure.masses)
        return measure.atoms[idx]
    d = len(measure)
    pts = np.empty((count, arity, d))
    for axis_i, ax in enumerate(measure):
        uniform = np.allclose(ax.masses, ax.masses[0])
        if uniform:
            idx = rng.integers(0, len(ax), size=(count, arity))
        else:
            idx = rng.choice(len(ax), size=(count, arity), p=ax.masses)
        pts[:, :, axis_i] = ax.atoms[idx]
    return pts


def sample_tuple_radii(measure, count: int, seed: int, threads: int = 1) -> np.ndarray:
    """Circumradii of ``count`` i.i.d. (d+1)-tuples (0 where degenerate).

    Batched with logical batch seeds, so the output is independent of the
    thread count.
    """
    d = _source_dim(measure)
    arity = d + 1
    n_batches = (count + BATCH - 1) // BATCH

    def one(b: int) -> np.ndarray:
        size = min(BATCH, count - b * BATCH)
        rng = spawn_generator(seed, b)
        return circumradius_batch(_draw_tuple_points(measure, rng, size, arity))

    if threads > 1 and n_batches > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(n_batches)))
    else:
        parts = [one(b) for b in range(n_batches)]
    return np.concatenate(parts) if parts else np.empty(0)


def exhaustive_tuple_radii(measure: DiscreteMeasure, chunk: int = 1 << 19):
    """Yield (radii, weights) over every ordered (d+1)-tuple with repetition."""
    if not isinstance(measure, DiscreteMeasure):
        raise InputError("exhaustive enumeration needs a materialized measure")
    n = len(measure)
    arity = measure.dimension + 1
    total = n**arity
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        pts = np.empty((idx.size, arity, measure.dimension))
        weights = np.ones(idx.size)
        for k in range(arity):
            sub = (idx // n**k) % n
            pts[:, k, :] = measure.atoms[sub]
            weights *= measure.masses[sub]
        yield circumradius_batch(pts), weights


def incidence_statistic(measure, query: IncidenceQuery, threads: int = 1):
    """Mass of (d+1)-tuples with |R - t| < epsilon, with its standard error.

    Exhaustive mode returns the exact weighted fraction (stderr 0); it
    requires atoms^(d+1) within the query budget and raises a ResourceError
    naming the necessary budget otherwise.  Monte-Carlo mode returns the
    unbiased sample mean over ``budget`` tuples with its standard error;
    results are bit-identical for a fixed seed regardless of ``threads``.
    """
    if query.mode == "exhaustive":
        if not isinstance(measure, DiscreteMeasure):
            raise InputError("exhaustive mode needs a materialized DiscreteMeasure")
        n = len(measure)
        total = n ** (measure.dimension + 1)
        if total > query.budget:
            raise ResourceError(
                f"exhaustive enumeration needs budget {total} (atoms^{measure.dimension + 1}), "
                f"got {query.budget}"
            )
        partials = []
        for radii, weights in exhaustive_tuple_radii(measure):
            hit = np.abs(radii - query.t) < query.epsilon
            partials.append(float(np.sum(weights[hit])))
        return math.fsum(partials), 0.0

    d = _source_dim(measure)
    arity = d + 1
    count = query.budget
    n_batches = (count + BATCH - 1) // BATCH

    def one(b: int) -> int:
        size = min(BATCH, count - b * BATCH)
        rng = spawn_generator(query.seed, b)
        radii = circumradius_batch(_draw_tuple_points(measure, rng, size, arity))
        return int(np.count_nonzero(np.abs(radii - query.t) < query.epsilon))

    if threads > 1 and n_batches > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(one, range(n_batches)))
    else:
        hits = sum(one(b) for b in range(n_batches))
    p = hits / count
    stderr = math.sqrt(p * (1.0 - p) / (count - 1)) if count > 1 else 0.0
    return p, stderr


# ---------------------------------------------------------------------------
# Conditional incidence
# ---------------------------------------------------------------------------
def conditional_incidence(
    measure_z: DiscreteMeasure, x, y, t: float, epsilon: float
) -> float:
    """Mass of atoms z with |R(x, y, z) - t| < epsilon (exact, d = 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if measure_z.dimension != 2 or x.shape != (2,) or y.shape != (2,):
        raise InputError("conditional incidence is defined in the plane")
    if np.array_equal(x, y):
        raise InputError("the conditioning points must be distinct")
    n = len(measure_z)
    pts = np.empty((n, 3, 2))
    pts[:, 0, :] = x
    pts[:, 1, :] = y
    pts[:, 2, :] = measure_z.atoms
    radii = circumradius_batch(pts)
    hit = np.abs(radii - t) < epsilon
    return float(np.sum(measure_z.masses[hit]))


class SortedAtomsAxis:
    """Interval-mass oracle over a materialized sorted 1-D factor."""

    def __init__(self, axis: Axis1D):
        order = np.argsort(axis.atoms, kind="stable")
        self.atoms = axis.atoms[order]
        self.masses = axis.masses[order]
        self._prefix = np.concatenate([[0.0], np.cumsum(self.masses)])
        self.lo = float(self.atoms[0])
        self.hi = float(self.atoms[-1])

    def open_mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo_ = np.nan_to_num(lo, nan=np.inf)
        hi_ = np.nan_to_num(hi, nan=-np.inf)
        left = np.searchsorted(self.atoms, lo_, side="right")
        right = np.searchsorted(self.atoms, hi_, side="left")
        return np.maximum(self._prefix[np.maximum(right, left)] - self._prefix[left], 0.0)

    def nearest_centers(self, value: float, count: int = 2) -> np.ndarray:
        i = np.searchsorted(self.atoms, value)
        lo = max(0, i - count)
        hi = min(self.atoms.size, i + count)
        return self.atoms[lo:hi]


class UniformGridAxis:
    """Closed-form interval-mass oracle for a uniform grid of cell centers.

    Equivalent to a materialized uniform axis but with O(1) queries, which
    keeps deep vertical discretizations (hundreds of millions of cells)
    affordable in the adversarial search.
    """

    def __init__(self, lo: float, hi: float, n_cells: int):
        if n_cells < 1 or not hi > lo:
            raise InputError("uniform axis needs hi > lo and at least one cell")
        self.lo = float(lo)
        self.hi = float(hi)
        self.n = int(n_cells)
        self.width = (self.hi - self.lo) / self.n
        self.mass_per_cell = 1.0 / self.n

    def _count_lt(self, b: np.ndarray) -> np.ndarray:
        q = (b - self.lo) / self.width
        return np.clip(np.ceil(q - 0.5), 0, self.n)

    def _count_le(self, a: np.ndarray) -> np.ndarray:
        q = (a - self.lo) / self.width
        return np.clip(np.floor(q - 0.5) + 1, 0, self.n)

    def open_mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo_ = np.nan_to_num(np.asarray(lo, dtype=float), nan=np.inf)
        hi_ = np.nan_to_num(np.asarray(hi, dtype=float), nan=-np.inf)
        counts = self._count_lt(hi_) - self._count_le(lo_)
        return np.maximum(counts, 0.0) * self.mass_per_cell

    def nearest_centers(self, value: float, count: int = 2) -> np.ndarray:
        i = int(np.clip(np.round((value - self.lo) / self.width - 0.5), 0, self.n - 1))
        idx = np.arange(max(0, i - count + 1), min(self.n, i + count))
        return self.lo + (idx + 0.5) * self.width


def _product_conditional_mass(col_axis, y_axis, x, y, t, eps) -> float:
    """Exact conditional window mass for a product measure.

    ``col_axis`` carries the first-coordinate atoms/masses; ``y_axis`` is an
    interval-mass oracle for the second coordinate.  The window region
    {|R - t| < eps} intersects each vertical column in at most four open
    intervals obtained from the two outer and two inner disks through
    (x, y); the kept segments satisfy (in O+ xor O-) and not (in I+ xor I-).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    chord = y - x
    length = float(np.hypot(chord[0], chord[1]))
    if length == 0.0:
        raise InputError("the conditioning points must be distinct")
    s_out = t + eps
    s_in = t - eps
    if s_out <= length / 2.0:
        return 0.0
    mid = (x + y) / 2.0
    perp = np.array([-chord[1], chord[0]]) / length

    disks = []
    eta_out = math.sqrt(s_out * s_out - 0.25 * length * length)
    disks.append((mid + eta_out * perp, s_out))
    disks.append((mid - eta_out * perp, s_out))
    if s_in > length / 2.0:
        eta_in = math.sqrt(s_in * s_in - 0.25 * length * length)
        disks.append((mid + eta_in * perp, s_in))
        disks.append((mid - eta_in * perp, s_in))

    cols = col_axis.atoms
    lo = np.full((cols.size, 4), np.nan)
    hi = np.full((cols.size, 4), np.nan)
    for k, (center, s) in enumerate(disks):
        disc = s * s - (cols - center[0]) ** 2
        valid = disc > 0.0
        half = np.sqrt(np.where(valid, disc, np.nan))
        lo[:, k] = center[1] - half
        hi[:, k] = center[1] + half

    bp = np.sort(np.concatenate([lo, hi], axis=1), axis=1)  # NaNs sort last
    seg_lo = bp[:, :-1]
    seg_hi = bp[:, 1:]
    mids = 0.5 * (seg_lo + seg_hi)

    def member(k: int) -> np.ndarray:
        return (mids > lo[:, k : k + 1]) & (mids < hi[:, k : k + 1])

    kept = member(0) ^ member(1)
    if len(disks) == 4:
        kept &= ~(member(2) ^ member(3))
    seg_mass = y_axis.open_mass(seg_lo, seg_hi)
    col_mass = np.sum(np.where(kept, seg_mass, 0.0), axis=1)
    return float(np.dot(col_axis.masses, col_mass))


# ---------------------------------------------------------------------------
# Adversarial profile over strip pairs
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PairSearchGrid:
    """Grid parameters for the strip-pair search.

    The first point is taken in the unit strip at height 0, the second in
    strips at heights spanning [a_min, a_max]; ``a_count`` coarse strip
    positions are scanned and the vertical coordinate of the second point is
    then refined by bisection so that an extreme abscissa of the window
    annulus lands on a cell endpoint of the first-coordinate factor.  For
    each strip and each of the four extremes, up to ``targets_per_extreme``
    endpoints inside the reachable sweep range are tried.
    """

    a_min: float = 6.0
    a_max: float = 19.5
    a_count: int = 24
    x_count: int = 2
    targets_per_extreme: int = 16
    bisect_iters: int = 50
    random_pairs: int = 8

    def __post_init__(self):
        if self.a_count < 1 or self.x_count < 1:
            raise InputError("pair search grid must be nonempty")
        if self.a_max < self.a_min:
            raise InputError("need a_max >= a_min")
        if self.bisect_iters < 1:
            raise InputError("bisect_iters must be positive")


def depth_for_epsilon(spec: SetSpec, eps: float, max_depth: int = 24) -> int:
    """Smallest depth whose realized cell widths are at most eps / 4."""
    if eps <= 0:
        raise InputError("epsilon must be positive")
    from .measures import _cantor_cell_hint  # shared generative cell logic

    for depth in range(1, max_depth + 1):
        widths = []
        if isinstance(spec, ProductSpec):
            factors = spec.factors
        else:
            factors = (spec,)
        hint = _cantor_cell_hint(spec, depth)
        for f in factors:
            own = _cantor_cell_hint(f, depth)
            if own is not None:
                widths.append(own)
            elif isinstance(f, Interval):
                widths.append(hint if hint is not None else (f.hi - f.lo) / 2.0**depth)
            else:
                widths.append((1.0) / 2.0**depth)
        if max(widths) <= eps / 4.0:
            return depth
    raise ResourceError(f"no depth <= {max_depth} resolves epsilon {eps}")


def _strip_axes(spec: ProductSpec, depth: int):
    """Realize the two factors: columns materialized, vertical as an oracle."""
    col = SortedAtomsAxis(axis_cells(spec.factors[0], depth))
    f2 = spec.factors[1]
    if isinstance(f2, Interval):
        width = col.atoms[1] - col.atoms[0] if col.atoms.size > 1 else (f2.hi - f2.lo)
        # match vertical cells to the column cell width (isotropic resolution)
        cells = axis_cells(spec.factors[0], depth)
        n = max(1, int(round((f2.hi - f2.lo) / cells.cell_width)))
        return col, UniformGridAxis(f2.lo, f2.hi, n)
    return col, SortedAtomsAxis(axis_cells(f2, depth))


def _extreme_abscissas(x, y, t) -> np.ndarray | None:
    """Abscissas of the four vertical-tangent points of the two radius-t circles."""
    chord = (y[0] - x[0], y[1] - x[1])
    length = math.hypot(*chord)
    if length == 0.0 or length >= 2.0 * t:
        return None
    eta = math.sqrt(t * t - 0.25 * length * length)
    px = -chord[1] / length
    mid_x = 0.5 * (x[0] + y[0])
    c1 = mid_x + eta * px
    c2 = mid_x - eta * px
    return np.array([c1 - t, c1 + t, c2 - t, c2 + t])


def _extremes_vec(x1: float, x2: float, y1: float, y2s: np.ndarray, t: float) -> np.ndarray:
    """Vectorized extreme abscissas, shape (4, n); y2s must keep L < 2t."""
    d1 = y1 - x1
    d2 = y2s - x2
    length = np.hypot(d1, d2)
    eta = np.sqrt(np.maximum(t * t - 0.25 * length * length, 0.0))
    px = -d2 / length
    mid_x = 0.5 * (x1 + y1)
    c1 = mid_x + eta * px
    c2 = mid_x - eta * px
    return np.stack([c1 - t, c1 + t, c2 - t, c2 + t])


def adversarial_conditional_profile(
    spec: SetSpec,
    t: float,
    epsilon_grid,
    pair_search: PairSearchGrid | None = None,
    depth: int | None = None,
    seed: int = 0,
    threads: int = 1,
) -> ScalingFit:
    """Max-over-pairs conditional incidence per epsilon, with its log-log fit.

    For each epsilon the search scans pairs (x, y) with x in the height-0
    unit strip and y in unit strips over the configured height range, then
    locally refines the vertical coordinate of y by bisection so that an
    extreme abscissa of the window annulus aligns with a cell endpoint of
    the first-coordinate factor; the best conditional mass found is recorded.
    Fewer than 3 positive points yields an undefined-slope fit carrying the
    raw points.  ``threads`` parallelizes over the epsilon grid and never
    changes results.
    """
    if pair_search is None:
        pair_search = PairSearchGrid()
    if not isinstance(spec, ProductSpec) or spec.ndim != 2:
        raise InputError("the adversarial profile needs a 2-D product spec")
    eps_list = sorted(set(float(e) for e in epsilon_grid), reverse=True)
    if not eps_list:
        raise InputError("epsilon grid is empty")

    def one(eps: float) -> tuple[float, float, float]:
        d_eps = depth if depth is not None else depth_for_epsilon(spec, eps)
        col, vert = _strip_axes(spec, d_eps)
        return (eps, _best_pair_value(col, vert, t, eps, pair_search, seed), 0.0)

    if threads > 1 and len(eps_list) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, eps_list))
    else:
        rows = [one(e) for e in eps_list]

    positive = [r for r in rows if r[1] > 0.0]
    if len(positive) < 3:
        return ScalingFit(
            points=tuple(rows), slope=float("nan"), intercept=float("nan"),
            r_squared=float("nan"), defined=False,
        )
    return fit_scaling_exponent(rows)


def _column_endpoints(col: SortedAtomsAxis) -> np.ndarray:
    # Atoms sit at cell centers; reconstruct endpoints from the local spacing.
    # The finest spacing equals the cell width for generative axes.
    if col.atoms.size < 2:
        return col.atoms.copy()
    width = np.min(np.diff(col.atoms))
    return np.unique(
        np.concatenate([col.atoms - width / 2.0, col.atoms + width / 2.0])
    )


def _best_pair_value(col, vert, t, eps, grid: PairSearchGrid, seed: int) -> float:
    strip_atoms = col.atoms[(col.atoms >= 0.0) & (col.atoms <= 1.0)]
    if strip_atoms.size == 0:
        return 0.0
    pick = np.unique(
        np.linspace(0, strip_atoms.size - 1, grid.x_count).round().astype(int)
    )
    x1_candidates = strip_atoms[pick]
    x2 = float(vert.nearest_centers(0.5, 1)[0])
    endpoints = _column_endpoints(col)
    a_values = np.linspace(grid.a_min, grid.a_max, grid.a_count)
    best = 0.0

    def evaluate(xp, y1, y2) -> float:
        if y1 == xp[0] and y2 == xp[1]:
            return 0.0  # coincident pair: no conditioning geometry
        return _product_conditional_mass(col, vert, xp, np.array([y1, y2]), t, eps)

    for x1 in x1_candidates:
        xp = np.array([x1, x2])
        mirror = strip_atoms[
            int(np.clip(np.searchsorted(strip_atoms, 1.0 - x1), 0, strip_atoms.size - 1))
        ]
        for y1 in np.unique([mirror, x1]):
            candidates: set[float] = set()
            for a in a_values:
                w_lo = max(a, vert.lo)
                w_hi = min(a + 1.0, vert.hi)
                if w_hi <= w_lo:
                    continue
                for f in (0.25, 0.5, 0.75):
                    candidates.add(float(vert.nearest_centers(w_lo + f * (w_hi - w_lo), 1)[0]))
                candidates.update(
                    _aligned_y2_cells(vert, x1, x2, y1, (w_lo, w_hi), t, grid, endpoints)
                )
            for y2 in candidates:
                val = evaluate(xp, y1, y2)
                if val > best:
                    best = val

    if grid.random_pairs > 0:
        rng = spawn_generator(seed, 7001)
        for _ in range(grid.random_pairs):
            x1 = float(rng.choice(strip_atoms))
            y1 = float(rng.choice(strip_atoms))
            a = float(rng.uniform(grid.a_min, grid.a_max))
            y2 = float(vert.nearest_centers(a + rng.uniform(0.0, 1.0), 1)[0])
            if vert.lo <= y2 <= vert.hi:
                best = max(best, evaluate(np.array([x1, x2]), y1, y2))
    return best


def _aligned_y2_cells(vert, x1, x2, y1, window, t, grid, endpoints) -> list[float]:
    """Vertical cells aligning an extreme abscissa with some cell endpoint.

    For each of the four extremes, the monotone sweep of the extreme
    abscissa over the window brackets a set of endpoint targets; a
    vectorized bisection inverts the sweep at up to ``targets_per_extreme``
    of them and the solutions are snapped to grid cells.
    """
    w_lo, w_hi = window
    d1 = y1 - x1
    max_sep_sq = 4.0 * t * t - d1 * d1
    if max_sep_sq <= 0.0:
        return []
    hi = min(w_hi, x2 + math.sqrt(max_sep_sq) * (1.0 - 1e-12))
    if d1 == 0.0:
        # overlapping strips: keep the sweep clear of the coincident pair
        w_lo = max(w_lo, x2 + 1e-9)
    if hi <= w_lo:
        return []
    lo_ext = _extremes_vec(x1, x2, y1, np.array([w_lo]), t)[:, 0]
    hi_ext = _extremes_vec(x1, x2, y1, np.array([hi]), t)[:, 0]

    cells: list[float] = []
    for k in range(4):
        e_lo, e_hi = sorted((lo_ext[k], hi_ext[k]))
        j0, j1 = np.searchsorted(endpoints, [e_lo, e_hi])
        targets = endpoints[j0:j1]
        if targets.size == 0:
            continue
        if targets.size > grid.targets_per_extreme:
            keep = np.unique(
                np.linspace(0, targets.size - 1, grid.targets_per_extreme).astype(int)
            )
            targets = targets[keep]
        lo_arr = np.full(targets.size, w_lo)
        hi_arr = np.full(targets.size, hi)
        f_lo = lo_ext[k] - targets
        for _ in range(grid.bisect_iters):
            mid = 0.5 * (lo_arr + hi_arr)
            fm = _extremes_vec(x1, x2, y1, mid, t)[k] - targets
            same = (fm < 0) == (f_lo < 0)
            lo_arr = np.where(same, mid, lo_arr)
            f_lo = np.where(same, fm, f_lo)
            hi_arr = np.where(same, hi_arr, mid)
        for y2_star in 0.5 * (lo_arr + hi_arr):
            for y2 in vert.nearest_centers(float(y2_star), 2):
                if w_lo <= y2 <= w_hi:
                    cells.append(float(y2))
    return cells
