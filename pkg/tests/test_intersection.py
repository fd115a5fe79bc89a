import numpy as np
import pytest

from radiilab.errors import InputError
from radiilab.intersection import (
    annulus_mass,
    center_validity,
    dilation_set,
    intersection_dimension,
    radii_set_measure,
    unique_sphere_fit,
)
from radiilab.measures import (
    Cantor,
    DiscreteMeasure,
    ProductSpec,
    build_cantor,
    middle_thirds,
    realize,
    two_piece_cantor,
)


def circle_measure(n=512, radius=1.0):
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    atoms = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    spacing = 2.0 * np.pi * radius / n
    return DiscreteMeasure(2, atoms, np.full(n, 1.0 / n), resolution=spacing)


# ---------------------------------------------------------------------------
# annulus restriction
# ---------------------------------------------------------------------------
def test_single_atom_on_annulus():
    m = DiscreteMeasure(2, np.array([[1.0, 0.0]]), np.array([1.0]), 0.01)
    s = annulus_mass(m, [0.0, 0.0], 1.0, 0.05)
    assert s.total_mass == 1.0
    s2 = annulus_mass(m, [0.0, 0.0], 3.0, 0.5)
    assert s2.total_mass == 0.0 and s2.atoms.shape[0] == 0


def test_annulus_needs_resolvable_thickness():
    m = circle_measure()
    with pytest.raises(InputError):
        annulus_mass(m, [0.0, 0.0], 1.0, m.resolution / 10.0)


def test_annulus_monotone_in_delta_and_recount_oracle():
    spec = ProductSpec((Cantor(two_piece_cantor(0.9)), Cantor(two_piece_cantor(0.9))))
    m = realize(spec, 8, budget=10**6)
    a, r = np.array([0.21, -0.13]), 0.8
    deltas = [0.04, 0.02, 0.01]
    masses = []
    for d in deltas:
        s = annulus_mass(m, a, r, d)
        # independent recount
        dist = np.linalg.norm(m.atoms - a, axis=1)
        oracle = m.masses[np.abs(dist - r) < d].sum()
        assert s.total_mass == pytest.approx(oracle, abs=1e-15)
        assert abs(s.masses.sum() - s.total_mass) <= 1e-12
        masses.append(s.total_mass)
    assert masses[0] >= masses[1] >= masses[2]


# ---------------------------------------------------------------------------
# dilation sets
# ---------------------------------------------------------------------------
def test_dilation_uniform_circle():
    m = circle_measure(2048)
    delta = 0.05
    grid = np.arange(0.2, 2.0, delta / 2.0)
    ds = dilation_set(m, [0.0, 0.0], delta, 0.0, grid)
    assert len(ds.intervals) == 1
    lo, hi = ds.intervals[0]
    assert lo == pytest.approx(1.0 - delta, abs=delta)
    assert hi == pytest.approx(1.0 + delta, abs=delta)
    assert ds.lebesgue_estimate == pytest.approx(2.0 * delta, rel=0.15)


def test_dilation_two_shells():
    atoms = np.array([[1.0, 0.0], [0.0, 2.0]])
    m = DiscreteMeasure(2, atoms, np.array([0.5, 0.5]), 0.01)
    delta = 0.1
    grid = np.arange(0.5, 3.0, delta / 2.0)
    ds = dilation_set(m, [0.0, 0.0], delta, 0.0, grid)
    assert len(ds.intervals) == 2
    assert ds.lebesgue_estimate == pytest.approx(0.4, rel=0.2)
    # threshold monotonicity: raising the threshold cannot grow the estimate
    ds_hi = dilation_set(m, [0.0, 0.0], delta, 0.9, grid)
    assert ds_hi.lebesgue_estimate <= ds.lebesgue_estimate


def test_dilation_grid_aliasing_rejected():
    m = circle_measure()
    with pytest.raises(InputError):
        dilation_set(m, [0.0, 0.0], 0.01, 0.0, np.arange(0.5, 2.0, 0.3))


# ---------------------------------------------------------------------------
# center validity
# ---------------------------------------------------------------------------
def test_center_validity_rules():
    m = circle_measure(64)
    assert center_validity(m, [0.0, 0.0])
    atom = m.atoms[7]
    assert not center_validity(m, atom)
    nudge = atom + np.array([m.resolution / 4.0, 0.0])
    assert not center_validity(m, nudge)


# ---------------------------------------------------------------------------
# intersection dimension
# ---------------------------------------------------------------------------
def test_intersection_dimension_circle_slice():
    m = circle_measure(4096)
    fit = intersection_dimension(
        m, [0.0, 0.0], 1.0, 0.02, [0.02, 0.04, 0.08, 0.16, 0.32]
    )
    assert fit.slope == pytest.approx(1.0, abs=0.1)


def test_intersection_dimension_empty_and_single():
    m = circle_measure(256)
    with pytest.raises(InputError):
        intersection_dimension(m, [10.0, 0.0], 1.0, 0.05, [0.05, 0.1, 0.2])
    single = DiscreteMeasure(
        2, np.array([[1.0, 0.0], [5.0, 5.0]]), np.array([0.5, 0.5]), 0.001
    )
    with pytest.raises(InputError, match="occupied"):
        intersection_dimension(single, [0.0, 0.0], 1.0, 0.01, [0.01, 0.02, 0.04])


# ---------------------------------------------------------------------------
# sphere fitting
# ---------------------------------------------------------------------------
def test_sphere_fit_symmetric_points():
    pts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (0, -1, 0)]
    fit = unique_sphere_fit(pts, tol=1e-9)
    assert fit.status == "ok"
    np.testing.assert_allclose(fit.center, [0, 0, 0], atol=1e-12)
    assert fit.radius == pytest.approx(1.0, abs=1e-12)


def test_sphere_fit_equator_is_ambiguous():
    theta = np.linspace(0.0, 2.0 * np.pi, 17)[:-1]
    pts = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    assert unique_sphere_fit(pts, tol=1e-9).status == "ambiguous"


def test_sphere_fit_inconsistent_points():
    pts = [(0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (5.0, 5.0)]
    fit = unique_sphere_fit(pts, tol=1e-6)
    assert fit.status == "inconsistent"
    assert fit.residual > 1e-6


def test_sphere_fit_exact_recovery():
    rng = np.random.default_rng(12)
    for d in (2, 3):
        center = rng.uniform(-5, 5, size=d)
        radius = rng.uniform(0.5, 4.0)
        u = rng.normal(size=(3 * d, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        pts = center + radius * u
        fit = unique_sphere_fit(pts, tol=1e-9)
        assert fit.status == "ok"
        np.testing.assert_allclose(fit.center, center, atol=1e-9)
        assert fit.radius == pytest.approx(radius, abs=1e-9)


def test_sphere_fit_needs_enough_points():
    with pytest.raises(InputError):
        unique_sphere_fit([(0.0, 0.0), (1.0, 0.0)])


# ---------------------------------------------------------------------------
# radii-set covering
# ---------------------------------------------------------------------------
def test_hyperplane_support_gives_zero_length():
    xs = np.linspace(0.0, 1.0, 6)
    m = DiscreteMeasure(
        2, np.column_stack([xs, 2.0 * xs + 1.0]), np.full(6, 1 / 6), 0.2
    )
    rows = radii_set_measure(m, [0.1, 0.01, 0.001], budget=10**6, seed=0)
    assert all(length == 0.0 for _, length in rows)


def test_triangle_covering_is_twice_epsilon():
    m = DiscreteMeasure(
        2,
        np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]),
        np.full(3, 1 / 3),
        resolution=0.5,
    )
    rows = radii_set_measure(m, [0.1, 0.03], budget=10**4, seed=0)
    for eps, length in rows:
        assert length == pytest.approx(2.0 * eps, abs=1e-15)


def test_radii_set_scale_equivariance():
    m = build_cantor(two_piece_cantor(0.8), 4)
    m2 = realize(ProductSpec((Cantor(two_piece_cantor(0.8)), Cantor(two_piece_cantor(0.8)))), 3)
    lam = 2.5
    scaled = DiscreteMeasure(
        2, lam * m2.atoms, m2.masses, lam * m2.resolution
    )
    rows = radii_set_measure(m2, [0.02], budget=10**6, seed=1)
    rows_scaled = radii_set_measure(scaled, [lam * 0.02], budget=10**6, seed=1)
    assert rows_scaled[0][1] == pytest.approx(lam * rows[0][1], rel=1e-9)
