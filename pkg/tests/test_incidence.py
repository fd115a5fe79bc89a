import numpy as np
import pytest

from radiilab.errors import InputError, ResourceError
from radiilab.incidence import (
    IncidenceQuery,
    PairSearchGrid,
    SortedAtomsAxis,
    UniformGridAxis,
    _product_conditional_mass,
    _strip_axes,
    adversarial_conditional_profile,
    conditional_incidence,
    depth_for_epsilon,
    fit_scaling_exponent,
    incidence_statistic,
)
from radiilab.circumsphere import circumradius_batch
from radiilab.measures import (
    Cantor,
    DiscreteMeasure,
    Interval,
    ProductSpec,
    lattice_interval_product,
    middle_thirds,
    realize,
    two_piece_cantor,
)

TRIANGLE = DiscreteMeasure(
    2,
    np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]),
    np.full(3, 1.0 / 3.0),
    resolution=0.5,
)


def test_triangle_exhaustive_oracle():
    # brute force over all 27 weighted triples: only the 6 permutations of the
    # distinct triple have R = 1; every repeated-point triple is degenerate
    est, err = incidence_statistic(TRIANGLE, IncidenceQuery(t=1.0, epsilon=0.1))
    assert est == pytest.approx(6.0 / 27.0, abs=1e-15)
    assert err == 0.0


def test_empty_window_beyond_max_radius():
    est, _ = incidence_statistic(TRIANGLE, IncidenceQuery(t=50.0, epsilon=0.5))
    assert est == 0.0


def test_monotone_in_epsilon():
    prev = 0.0
    for eps in (0.01, 0.05, 0.1, 0.4):
        est, _ = incidence_statistic(TRIANGLE, IncidenceQuery(t=1.0, epsilon=eps))
        assert est >= prev
        prev = est


def test_window_additivity_disjoint():
    m = realize(ProductSpec((Cantor(middle_thirds()), Cantor(middle_thirds()))), 1)
    q1 = IncidenceQuery(t=0.4, epsilon=0.05)
    q2 = IncidenceQuery(t=0.6, epsilon=0.05)
    e1, _ = incidence_statistic(m, q1)
    e2, _ = incidence_statistic(m, q2)
    # union oracle computed directly from the radii of all tuples
    n = len(m)
    idx = np.indices((n, n, n)).reshape(3, -1).T
    pts = m.atoms[idx]
    radii = circumradius_batch(pts)
    w = m.masses[idx].prod(axis=1)
    union = np.sum(
        w[(np.abs(radii - 0.4) < 0.05) | (np.abs(radii - 0.6) < 0.05)]
    )
    assert e1 + e2 == pytest.approx(union, abs=1e-12)


def test_translation_invariance():
    m = realize(ProductSpec((Cantor(middle_thirds()), Cantor(middle_thirds()))), 1)
    shifted = DiscreteMeasure(
        2, m.atoms + np.array([3.0, -7.0]), m.masses, m.resolution
    )
    q = IncidenceQuery(t=0.5, epsilon=0.2)
    a, _ = incidence_statistic(m, q)
    b, _ = incidence_statistic(shifted, q)
    assert b == pytest.approx(a, rel=1e-9)


def test_degenerate_tuples_count_only_when_t_below_epsilon():
    line = DiscreteMeasure(
        2,
        np.column_stack([np.linspace(0, 1, 4), np.zeros(4)]),
        np.full(4, 0.25),
        resolution=0.3,
    )
    est, _ = incidence_statistic(line, IncidenceQuery(t=1.0, epsilon=0.5))
    assert est == 0.0
    # with t < epsilon the degenerate (R = 0) points fall inside the window;
    # that regime is only reachable below the query layer, whose invariant
    # keeps epsilon < t
    x, y = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    kept = conditional_incidence(line, x, y, t=0.4, epsilon=0.5)
    assert kept == pytest.approx(1.0, abs=1e-12)
    excluded = conditional_incidence(line, x, y, t=0.6, epsilon=0.5)
    assert excluded == 0.0


def test_exhaustive_budget_error_names_requirement():
    with pytest.raises(ResourceError, match="27"):
        incidence_statistic(TRIANGLE, IncidenceQuery(t=1.0, epsilon=0.1, budget=26))


def test_monte_carlo_agrees_with_exhaustive():
    m = realize(ProductSpec((Cantor(middle_thirds()), Cantor(middle_thirds()))), 2)
    q_ex = IncidenceQuery(t=0.5, epsilon=0.1)
    exact, _ = incidence_statistic(m, q_ex)
    q_mc = IncidenceQuery(t=0.5, epsilon=0.1, mode="monte-carlo", budget=10**6, seed=4)
    est, err = incidence_statistic(m, q_mc)
    assert abs(est - exact) <= 3.0 * err


def test_monte_carlo_thread_independence():
    m = realize(ProductSpec((Cantor(middle_thirds()), Cantor(middle_thirds()))), 2)
    q = IncidenceQuery(t=0.5, epsilon=0.1, mode="monte-carlo", budget=3 * 65536 + 17, seed=9)
    a = incidence_statistic(m, q, threads=1)
    b = incidence_statistic(m, q, threads=8)
    assert a == b


def test_query_validation():
    with pytest.raises(InputError):
        IncidenceQuery(t=1.0, epsilon=1.5)
    with pytest.raises(InputError):
        IncidenceQuery(t=-1.0, epsilon=0.1)
    with pytest.raises(InputError):
        IncidenceQuery(t=1.0, epsilon=0.1, mode="guess")


# ---------------------------------------------------------------------------
# scaling fits
# ---------------------------------------------------------------------------
def test_fit_exact_powers():
    eps = [2.0**-k for k in range(3, 10)]
    fit = fit_scaling_exponent([(e, e) for e in eps])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    fit56 = fit_scaling_exponent([(e, e ** (5.0 / 6.0)) for e in eps])
    assert fit56.slope == pytest.approx(5.0 / 6.0, abs=1e-12)
    assert fit56.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_with_multiplicative_noise():
    rng = np.random.default_rng(21)
    eps = np.geomspace(1e-4, 1e-1, 9)
    vals = eps**0.9 * np.exp(rng.normal(0.0, 0.05, size=9))
    fit = fit_scaling_exponent(list(zip(eps, vals)))
    assert fit.slope == pytest.approx(0.9, abs=0.05)


def test_fit_requires_three_positive_points():
    with pytest.raises(InputError):
        fit_scaling_exponent([(0.1, 1.0), (0.01, 0.5)])
    with pytest.raises(InputError):
        fit_scaling_exponent([(0.1, 1.0), (0.01, 0.0), (0.001, 0.0)])


# ---------------------------------------------------------------------------
# conditional incidence
# ---------------------------------------------------------------------------
def test_conditional_on_circle_atom():
    m = DiscreteMeasure(2, np.array([[1.0, 1.0]]), np.array([1.0]), 0.01)
    x, y = np.array([0.0, 0.0]), np.array([0.0, 2.0])
    for eps in (1e-6, 1e-2, 0.5):
        assert conditional_incidence(m, x, y, 1.0, eps) == 1.0


def test_conditional_far_atom_zero():
    m = DiscreteMeasure(2, np.array([[10.0, 10.0]]), np.array([1.0]), 0.01)
    x, y = np.array([0.0, 0.0]), np.array([0.0, 2.0])
    assert conditional_incidence(m, x, y, 1.0, 0.1) == 0.0


def test_conditional_equal_points_rejected():
    m = DiscreteMeasure(2, np.array([[1.0, 1.0]]), np.array([1.0]), 0.01)
    with pytest.raises(InputError):
        conditional_incidence(m, np.zeros(2), np.zeros(2), 1.0, 0.1)


def test_product_evaluator_matches_materialized():
    # the column-interval evaluation must reproduce atom filtering exactly
    spec = lattice_interval_product(two_piece_cantor(1 / 3), 2)
    depth = 2
    meas = realize(spec, depth, budget=10**6)
    col, vert = _strip_axes(spec, depth)
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.uniform([0, 0], [1, 1])
        y = rng.uniform([0, 0], [1, 4])
        t = rng.uniform(0.5, 4.0)
        eps = rng.uniform(0.001, 0.3) * t
        direct = conditional_incidence(meas, x, y, t, eps)
        fast = _product_conditional_mass(col, vert, x, y, t, eps)
        assert fast == pytest.approx(direct, abs=1e-12)


def test_uniform_axis_matches_sorted_atoms():
    from radiilab.measures import axis_cells

    ax = axis_cells(Interval(-2.0, 2.0), 6)
    sorted_axis = SortedAtomsAxis(ax)
    uniform = UniformGridAxis(-2.0, 2.0, len(ax))
    rng = np.random.default_rng(5)
    lo = rng.uniform(-3, 3, size=200)
    hi = lo + rng.uniform(0, 2, size=200)
    np.testing.assert_allclose(
        sorted_axis.open_mass(lo, hi), uniform.open_mass(lo, hi), atol=1e-15
    )


# ---------------------------------------------------------------------------
# adversarial profile
# ---------------------------------------------------------------------------
def test_profile_single_point_is_undefined():
    spec = lattice_interval_product(two_piece_cantor(1 / 3), 2)
    grid = PairSearchGrid(a_min=1.0, a_max=1.5, a_count=2, x_count=1, random_pairs=0)
    fit = adversarial_conditional_profile(spec, 2.0, [0.05], grid, depth=2)
    assert not fit.defined
    assert np.isnan(fit.slope)
    assert len(fit.points) == 1 and fit.points[0][1] >= 0.0


def test_profile_uniform_square_slope_one():
    # annular lens area scales linearly in the window width on a 2-D uniform
    # measure, so the adversarial profile has slope about 1
    spec = ProductSpec((Interval(0.0, 1.0), Interval(0.0, 1.0)))
    grid = PairSearchGrid(
        a_min=0.0, a_max=0.0, a_count=1, x_count=2, targets_per_extreme=4,
        random_pairs=6,
    )
    # below ~2^-5 the window clears the saturation regime of fat annuli
    eps_grid = [2.0**-k for k in range(6, 11)]
    fit = adversarial_conditional_profile(spec, 0.6, eps_grid, grid, seed=3)
    assert fit.slope == pytest.approx(1.0, abs=0.1)


def test_profile_uniform_lens_area_oracle():
    # quadrature oracle: window mass at one fixed pair halves with epsilon
    spec = ProductSpec((Interval(0.0, 1.0), Interval(0.0, 1.0)))
    depth = 9
    col, vert = _strip_axes(spec, depth)
    x, y = np.array([0.3, 0.5]), np.array([0.7, 0.6])
    t = 0.6
    grid = np.linspace(0.5 / 1024, 1 - 0.5 / 1024, 1024)
    gx, gy = np.meshgrid(grid, grid, indexing="ij")
    pts = np.stack([np.broadcast_to(x, gx.shape + (2,)), np.broadcast_to(y, gx.shape + (2,)),
                    np.stack([gx, gy], axis=-1)], axis=-2).reshape(-1, 3, 2)
    radii = circumradius_batch(pts)
    for eps in (0.05, 0.025):
        area = np.mean(np.abs(radii - t) < eps)
        fast = _product_conditional_mass(col, vert, x, y, t, eps)
        assert fast == pytest.approx(area, abs=0.01)


def test_depth_rule_resolves_epsilon():
    spec = lattice_interval_product(two_piece_cantor(1 / 3), 20)
    assert depth_for_epsilon(spec, 2.0**-4) >= 2
    d = depth_for_epsilon(spec, 2.0**-12)
    assert 8.0**-d <= 2.0**-14

    with pytest.raises(InputError):
        adversarial_conditional_profile(
            ProductSpec((Interval(0, 1), Interval(0, 1))), 0.5, [],
        )
