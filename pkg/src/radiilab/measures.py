"""Discrete approximations of fractal sets and their natural measures.

Constructions are generative: a 1-D self-similar (Cantor-type) description,
uniform intervals, unions of integer translates, scalings, and tensor
products of 1-D factors.  Realizing a description at generation ``depth``
places one atom at the center of each surviving cell with equal mass per
cell, which is exact, reproducible, and refinement-consistent: the
depth-(n+1) measure pushed forward by the parent-cell map reproduces the
depth-n measure atom by atom.

Diagnostics included here: seeded sampling, a Frostman-quotient scan
(mass-of-ball over r^s), and a box-counting dimension fit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceError
from .scaling import ScalingFit, box_dimension_fit
from .seeding import spawn_generator

DEFAULT_ATOM_BUDGET = 5_000_000

__all__ = [
    "CantorSpec",
    "DiscreteMeasure",
    "SetSpec",
    "Cantor",
    "Interval",
    "TranslateUnion",
    "Scaled",
    "ProductSpec",
    "two_piece_cantor",
    "middle_thirds",
    "lattice_interval_product",
    "build_cantor",
    "cantor_cells",
    "axis_cells",
    "count_atoms",
    "realize",
    "realize_factors",
    "sample",
    "frostman_ratio",
    "box_dimension",
]


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CantorSpec:
    """Self-similar subset of [0, 1]: m children of width ``ratio`` each.

    ``offsets`` are the left endpoints of the surviving child intervals,
    strictly increasing with gaps >= ratio (touching children are allowed
    only when the gap equals the ratio exactly).  The similarity dimension
    is log(pieces) / log(1/ratio).
    """

    pieces: int
    ratio: float
    offsets: tuple[float, ...]

    def __post_init__(self):
        if self.pieces < 1:
            raise InputError("pieces must be a positive integer")
        if not (0.0 < self.ratio <= 1.0 / self.pieces):
            raise InputError("ratio must lie in (0, 1/pieces]")
        offs = tuple(float(o) for o in self.offsets)
        if len(offs) != self.pieces:
            raise InputError("need exactly one offset per piece")
        if offs[0] < 0.0 or offs[-1] > 1.0 - self.ratio + 1e-15:
            raise InputError("offsets must lie in [0, 1 - ratio]")
        for a, b in zip(offs, offs[1:]):
            if b - a < self.ratio:
                raise InputError("children overlap: consecutive offsets closer than ratio")
        object.__setattr__(self, "offsets", offs)

    @property
    def similarity_dimension(self) -> float:
        if self.pieces == 1:
            return 0.0 if self.ratio < 1.0 else 1.0
        return float(np.log(self.pieces) / np.log(1.0 / self.ratio))


def two_piece_cantor(alpha: float) -> CantorSpec:
    """Two-piece Cantor set of similarity dimension ``alpha`` in (0, 1].

    The contraction ratio is 2^(-1/alpha) with children at both ends of the
    unit interval.
    """
    if not (0.0 < alpha <= 1.0):
        raise InputError("alpha must lie in (0, 1]")
    ratio = 2.0 ** (-1.0 / alpha)
    return CantorSpec(pieces=2, ratio=ratio, offsets=(0.0, 1.0 - ratio))


def middle_thirds() -> CantorSpec:
    """The classical middle-thirds construction (dimension log2/log3)."""
    return CantorSpec(pieces=2, ratio=1.0 / 3.0, offsets=(0.0, 2.0 / 3.0))


class SetSpec:
    """Base class for generative set descriptions (see subclasses)."""

    @property
    def ndim(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Cantor(SetSpec):
    spec: CantorSpec

    @property
    def ndim(self) -> int:
        return 1


@dataclass(frozen=True)
class Interval(SetSpec):
    """Uniform measure on [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.hi > self.lo):
            raise InputError("interval needs hi > lo")

    @property
    def ndim(self) -> int:
        return 1


@dataclass(frozen=True)
class TranslateUnion(SetSpec):
    """Union of integer translates child + k for k in [k_min, k_max], mass split uniformly."""

    child: SetSpec
    k_min: int
    k_max: int

    def __post_init__(self):
        if self.k_max < self.k_min:
            raise InputError("translate range is empty")
        if self.child.ndim != 1:
            raise InputError("translate-union applies to 1-D children")

    @property
    def ndim(self) -> int:
        return 1


@dataclass(frozen=True)
class Scaled(SetSpec):
    """The child set scaled by a positive factor about the origin."""

    child: SetSpec
    factor: float

    def __post_init__(self):
        if not (self.factor > 0.0):
            raise InputError("scale factor must be positive")

    @property
    def ndim(self) -> int:
        return self.child.ndim


@dataclass(frozen=True)
class ProductSpec(SetSpec):
    """Tensor product of 1-D factors; masses multiply."""

    factors: tuple[SetSpec, ...]

    def __post_init__(self):
        if len(self.factors) < 1:
            raise InputError("product needs at least one factor")
        for f in self.factors:
            if f.ndim != 1:
                raise InputError("product factors must be 1-D")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def ndim(self) -> int:
        return len(self.factors)


def lattice_interval_product(cantor: CantorSpec, span: int) -> ProductSpec:
    """Union of integer translates of a Cantor set, crossed with an interval.

    The first factor is ``union_{k=-span..span} (C + k)`` and the second the
    uniform measure on [-span, span]; the vertical discretization is matched
    to the Cantor cell width at realization time.
    """
    if span < 1:
        raise InputError("span must be >= 1")
    return ProductSpec(
        factors=(
            TranslateUnion(Cantor(cantor), -span, span),
            Interval(-span, span),
        )
    )


# ---------------------------------------------------------------------------
# Discrete measures
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure with generation metadata.

    ``resolution`` is the diameter bound of the generation cells the atoms
    were placed in; ``cell_edges`` are the per-axis cell edge lengths (used
    for jittered sampling).  Masses sum to 1 within 1e-12 and atoms are
    pairwise distinct.
    """

    dimension: int
    atoms: np.ndarray
    masses: np.ndarray
    resolution: float
    depth: int | None = None
    cell_edges: tuple[float, ...] | None = None

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        masses = np.asarray(self.masses, dtype=float)
        if atoms.shape[0] != masses.shape[0]:
            raise InputError("atoms and masses must have matching lengths")
        if atoms.shape[1] != self.dimension:
            raise InputError("atom coordinates do not match the stated dimension")
        if np.any(masses <= 0.0):
            raise InputError("all masses must be positive")
        total = float(np.sum(masses))
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"masses must sum to 1 within 1e-12, got {total!r}")
        if self.resolution <= 0.0:
            raise InputError("resolution must be positive")
        if np.unique(atoms, axis=0).shape[0] != atoms.shape[0]:
            raise InputError("atoms must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return self.atoms.shape[0]

    @property
    def diameter(self) -> float:
        spread = self.atoms.max(axis=0) - self.atoms.min(axis=0)
        return float(np.linalg.norm(spread) + self.resolution)


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------
def cantor_cells(spec: CantorSpec, depth: int) -> tuple[np.ndarray, float]:
    """Left endpoints and width of the depth-generation cells in [0, 1]."""
    if depth < 0:
        raise InputError("depth must be >= 0")
    lefts = np.zeros(1)
    width = 1.0
    offsets = np.asarray(spec.offsets)
    for _ in range(depth):
        lefts = (lefts[:, None] + width * offsets[None, :]).ravel()
        width *= spec.ratio
    return lefts, width


def build_cantor(spec: CantorSpec, depth: int) -> DiscreteMeasure:
    """Measure with one atom per depth-generation cell, mass m^-depth each."""
    lefts, width = cantor_cells(spec, depth)
    n = lefts.size
    atoms = (lefts + width / 2.0)[:, None]
    masses = np.full(n, 1.0 / n)
    return DiscreteMeasure(
        dimension=1,
        atoms=atoms,
        masses=masses,
        resolution=width,
        depth=depth,
        cell_edges=(width,),
    )


@dataclass(frozen=True)
class Axis1D:
    """A realized 1-D factor: sorted atoms, masses, and cell geometry."""

    atoms: np.ndarray
    masses: np.ndarray
    cell_width: float
    lefts: np.ndarray  # cell left endpoints, sorted like atoms

    def __len__(self) -> int:
        return self.atoms.size

    @property
    def endpoints(self) -> np.ndarray:
        """Sorted distinct cell endpoints (left and right) of this axis."""
        return np.unique(np.concatenate([self.lefts, self.lefts + self.cell_width]))

    def mass_prefix(self) -> np.ndarray:
        """Prefix sums for O(log n) interval-mass queries."""
        return np.concatenate([[0.0], np.cumsum(self.masses)])


def _cantor_cell_hint(node: SetSpec, depth: int) -> float | None:
    """Finest Cantor cell width under this node at ``depth``, if any."""
    if isinstance(node, Cantor):
        return node.spec.ratio**depth
    if isinstance(node, TranslateUnion):
        return _cantor_cell_hint(node.child, depth)
    if isinstance(node, Scaled):
        hint = _cantor_cell_hint(node.child, depth)
        return None if hint is None else hint * node.factor
    if isinstance(node, ProductSpec):
        hints = [_cantor_cell_hint(f, depth) for f in node.factors]
        hints = [h for h in hints if h is not None]
        return min(hints) if hints else None
    return None


def _realize_axis(node: SetSpec, depth: int, cell_hint: float | None) -> Axis1D:
    if isinstance(node, Cantor):
        lefts, width = cantor_cells(node.spec, depth)
        n = lefts.size
        return Axis1D(lefts + width / 2.0, np.full(n, 1.0 / n), width, lefts)
    if isinstance(node, Interval):
        length = node.hi - node.lo
        width = cell_hint if cell_hint is not None else length / 2.0**depth
        n = max(1, int(round(length / width)))
        width = length / n
        lefts = node.lo + width * np.arange(n)
        return Axis1D(lefts + width / 2.0, np.full(n, 1.0 / n), width, lefts)
    if isinstance(node, TranslateUnion):
        base = _realize_axis(node.child, depth, cell_hint)
        ks = np.arange(node.k_min, node.k_max + 1, dtype=float)
        count = ks.size
        atoms = (base.atoms[None, :] + ks[:, None]).ravel()
        lefts = (base.lefts[None, :] + ks[:, None]).ravel()
        masses = np.tile(base.masses / count, count)
        return Axis1D(atoms, masses, base.cell_width, lefts)
    if isinstance(node, Scaled):
        base = _realize_axis(node.child, depth, None if cell_hint is None else cell_hint / node.factor)
        return Axis1D(
            base.atoms * node.factor,
            base.masses,
            base.cell_width * node.factor,
            base.lefts * node.factor,
        )
    raise InputError(f"not a 1-D realizable node: {type(node).__name__}")


def realize_factors(spec: SetSpec, depth: int) -> list[Axis1D]:
    """Realize the 1-D factors of a spec without materializing the product."""
    if isinstance(spec, ProductSpec):
        hint = _cantor_cell_hint(spec, depth)
        factors = []
        for f in spec.factors:
            own_hint = _cantor_cell_hint(f, depth)
            factors.append(_realize_axis(f, depth, hint if own_hint is None else None))
        return factors
    if isinstance(spec, Scaled) and isinstance(spec.child, ProductSpec):
        inner = realize_factors(spec.child, depth)
        return [
            Axis1D(
                a.atoms * spec.factor,
                a.masses,
                a.cell_width * spec.factor,
                a.lefts * spec.factor,
            )
            for a in inner
        ]
    if spec.ndim == 1:
        return [_realize_axis(spec, depth, None)]
    raise InputError(f"cannot factor spec of type {type(spec).__name__}")


def realize(spec: SetSpec, depth: int, budget: int = DEFAULT_ATOM_BUDGET) -> DiscreteMeasure:
    """Materialize the measure described by ``spec`` at generation ``depth``.

    Tensor factors multiply masses; translate-unions split mass uniformly
    over the translates; interval factors discretize with cells matched to
    the finest sibling Cantor cell width.  Exceeding the atom budget raises a
    ResourceError naming the required count.
    """
    if depth < 0:
        raise InputError("depth must be >= 0")
    axes = realize_factors(spec, depth)
    counts = [len(a) for a in axes]
    total = 1
    for c in counts:
        total *= c
    if total > budget:
        raise ResourceError(
            f"realization needs {total} atoms but the budget is {budget}; "
            "raise the budget explicitly to proceed"
        )
    if len(axes) == 1:
        ax = axes[0]
        order = np.argsort(ax.atoms, kind="stable")
        return DiscreteMeasure(
            dimension=1,
            atoms=ax.atoms[order, None],
            masses=ax.masses[order],
            resolution=ax.cell_width,
            depth=depth,
            cell_edges=(ax.cell_width,),
        )
    grids = np.meshgrid(*[a.atoms for a in axes], indexing="ij")
    atoms = np.column_stack([g.ravel() for g in grids])
    mass = np.ones(1)
    for a in axes:
        mass = np.multiply.outer(mass, a.masses).ravel()
    edges = tuple(a.cell_width for a in axes)
    resolution = float(np.linalg.norm(edges))
    return DiscreteMeasure(
        dimension=len(axes),
        atoms=atoms,
        masses=mass,
        resolution=resolution,
        depth=depth,
        cell_edges=edges,
    )


def axis_cells(spec: SetSpec, depth: int) -> Axis1D:
    """Realized cell structure of a 1-D spec (atoms, lefts, width)."""
    if spec.ndim != 1:
        raise InputError("axis_cells applies to 1-D specs")
    return _realize_axis(spec, depth, None)


def _axis_count(node: SetSpec, depth: int, cell_hint: float | None) -> int:
    if isinstance(node, Cantor):
        return node.spec.pieces**depth
    if isinstance(node, Interval):
        length = node.hi - node.lo
        width = cell_hint if cell_hint is not None else length / 2.0**depth
        return max(1, int(round(length / width)))
    if isinstance(node, TranslateUnion):
        return (node.k_max - node.k_min + 1) * _axis_count(node.child, depth, cell_hint)
    if isinstance(node, Scaled):
        inner = None if cell_hint is None else cell_hint / node.factor
        return _axis_count(node.child, depth, inner)
    raise InputError(f"not a 1-D node: {type(node).__name__}")


def count_atoms(spec: SetSpec, depth: int) -> int:
    """Atom count of realize(spec, depth) without materializing anything."""
    if isinstance(spec, ProductSpec):
        hint = _cantor_cell_hint(spec, depth)
        total = 1
        for f in spec.factors:
            own = _cantor_cell_hint(f, depth)
            total *= _axis_count(f, depth, hint if own is None else None)
        return total
    if isinstance(spec, Scaled) and isinstance(spec.child, ProductSpec):
        return count_atoms(spec.child, depth)
    return _axis_count(spec, depth, None)


# ---------------------------------------------------------------------------
# Sampling and diagnostics
# ---------------------------------------------------------------------------
def sample(
    measure: DiscreteMeasure,
    count: int,
    seed: int,
    jitter: bool = False,
) -> np.ndarray:
    """I.i.d. draws from the atomic distribution, deterministic given seed.

    With ``jitter`` each draw is spread uniformly inside its generation cell
    (callers should flag jittered output in their metadata).
    """
    if count < 1:
        raise InputError("count must be positive")
    rng = spawn_generator(seed, 0)
    idx = rng.choice(len(measure), size=count, p=measure.masses)
    pts = measure.atoms[idx].copy()
    if jitter:
        if measure.cell_edges is None:
            raise InputError("measure carries no cell geometry to jitter within")
        edges = np.asarray(measure.cell_edges)
        pts += (rng.random((count, measure.dimension)) - 0.5) * edges[None, :]
    return pts


def frostman_ratio(
    measure: DiscreteMeasure,
    s: float,
    trials: int,
    seed: int,
    r_grid_size: int = 24,
    r_min: float | None = None,
    return_profile: bool = False,
):
    """Max over sampled (x, r) of mass(B(x, r)) / r^s.

    Centers are drawn from the atoms by mass; for each center the quotient is
    scanned over a log-spaced r grid in [resolution, diameter].  A finite
    Frostman constant at s certifies dimension >= s; for s above the measure
    dimension the quotient blows up as r approaches the resolution.
    """
    if not (0.0 < s <= measure.dimension):
        raise InputError("require 0 < s <= d")
    if trials < 1:
        raise InputError("trials must be positive")
    rng = spawn_generator(seed, 1)
    lo = measure.resolution if r_min is None else max(r_min, measure.resolution)
    hi = max(measure.diameter, lo * (1.0 + 1e-9))
    rs = np.geomspace(lo, hi, r_grid_size)
    centers = measure.atoms[rng.choice(len(measure), size=trials, p=measure.masses)]
    per_r_max = np.zeros(r_grid_size)
    for x in centers:
        raw = np.linalg.norm(measure.atoms - x[None, :], axis=1)
        order = np.argsort(raw, kind="stable")
        dist = raw[order]
        prefix = np.concatenate([[0.0], np.cumsum(measure.masses[order])])
        counts = np.searchsorted(dist, rs, side="right")
        ratios = prefix[counts] / rs**s
        per_r_max = np.maximum(per_r_max, ratios)
    best = float(per_r_max.max())
    if return_profile:
        return best, rs, per_r_max
    return best


def box_dimension(measure: DiscreteMeasure, scale_grid) -> ScalingFit:
    """Box-counting dimension fit of the measure's support.

    ``scale_grid`` must contain at least 3 scales inside
    [resolution, diameter]; the slope is log(occupied boxes) against
    log(1/scale).
    """
    scales = sorted(float(b) for b in scale_grid)
    if len(scales) < 3:
        raise InputError("need at least 3 scales for a dimension fit")
    lo = measure.resolution * (1.0 - 1e-9)
    hi = measure.diameter * (1.0 + 1e-9)
    for b in scales:
        if not (lo <= b <= hi):
            raise InputError(f"scale {b} outside [resolution, diameter]")
    return box_dimension_fit(measure.atoms, scales[::-1])
