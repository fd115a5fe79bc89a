import numpy as np
import pytest

from radiilab.circumsphere import (
    cayley_menger_radius,
    circumradius_batch,
    circumradius_of_differences,
    circumsphere,
)
from radiilab.errors import InputError


def test_right_triangle_example():
    ct = circumsphere([(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)])
    assert not ct.degenerate
    np.testing.assert_allclose(ct.center, [1.0, 0.0], atol=1e-12)
    assert ct.radius == pytest.approx(1.0, abs=1e-12)


def test_collinear_is_degenerate():
    ct = circumsphere([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
    assert ct.degenerate
    assert ct.radius == 0.0
    assert ct.center is None


def test_repeated_point_is_degenerate():
    ct = circumsphere([(0.3, 0.4), (0.3, 0.4), (1.0, 2.0)])
    assert ct.degenerate and ct.radius == 0.0


def test_symmetric_tetrahedron():
    pts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0)]
    ct = circumsphere(pts)
    np.testing.assert_allclose(ct.center, [0, 0, 0], atol=1e-12)
    assert ct.radius == pytest.approx(1.0, abs=1e-12)


def test_equidistance_invariant():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        for _ in range(50):
            ct = circumsphere(rng.normal(size=(d + 1, d)))
            if ct.degenerate:
                continue
            dists = np.linalg.norm(ct.points - ct.center[None, :], axis=1)
            assert np.all(np.abs(dists - ct.radius) <= 1e-9 * (1.0 + ct.radius))


def test_nonfinite_input_rejected():
    with pytest.raises(InputError):
        circumsphere([(0.0, np.inf), (1.0, 0.0), (0.0, 1.0)])


def test_cayley_menger_equilateral():
    pts = [(0.0, 0.0), (1.0, 0.0), (0.5, np.sqrt(3.0) / 2.0)]
    assert cayley_menger_radius(pts) == pytest.approx(1.0 / np.sqrt(3.0), rel=1e-12)


def test_cayley_menger_degenerate():
    assert cayley_menger_radius([(1.0, 1.0), (1.0, 1.0), (0.0, 3.0)]) == 0.0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_solver_agrees_with_determinant_oracle(d):
    rng = np.random.default_rng(100 + d)
    pts = rng.normal(size=(2000, d + 1, d))
    radii = circumradius_batch(pts)
    for k in range(0, 2000, 7):
        oracle = cayley_menger_radius(pts[k])
        assert radii[k] == pytest.approx(oracle, rel=1e-9)


def test_batch_matches_single():
    rng = np.random.default_rng(7)
    for d in (2, 3, 4):
        pts = rng.normal(size=(64, d + 1, d))
        batch = circumradius_batch(pts)
        single = np.array([circumsphere(p).radius for p in pts])
        np.testing.assert_allclose(batch, single, rtol=1e-12, atol=0.0)


def test_translation_invariance():
    rng = np.random.default_rng(11)
    for d in (2, 3):
        pts = rng.normal(size=(d + 1, d))
        base = circumsphere(pts).radius
        for _ in range(10):
            v = rng.uniform(-1.0, 1.0, size=d) * 1e3
            shifted = circumsphere(pts + v).radius
            assert shifted == pytest.approx(base, rel=1e-9)


def test_rotation_and_permutation_invariance():
    rng = np.random.default_rng(13)
    for d in (2, 3, 4):
        pts = rng.normal(size=(d + 1, d))
        base = circumsphere(pts).radius
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        assert circumsphere(pts @ q.T).radius == pytest.approx(base, rel=1e-9)
        perm = rng.permutation(d + 1)
        assert circumsphere(pts[perm]).radius == pytest.approx(base, rel=1e-12)


def test_scaling_equivariance():
    rng = np.random.default_rng(17)
    pts = rng.normal(size=(3, 2))
    base = circumsphere(pts).radius
    for lam in (2.5, 0.01, -3.0):
        assert circumsphere(lam * pts).radius == pytest.approx(abs(lam) * base, rel=1e-9)


def test_differences_form_matches_tuple_radius():
    # translation-reduced evaluation agrees with the full tuple
    u = np.array([(-2.0, 0.0), (-1.0, -1.0)])
    assert circumradius_of_differences(u) == pytest.approx(1.0, abs=1e-12)

    rng = np.random.default_rng(23)
    for d in (2, 3):
        for _ in range(50):
            pts = rng.normal(size=(d + 1, d))
            diffs = pts[-1] - pts[:-1]
            direct = circumsphere(pts).radius
            reduced = circumradius_of_differences(diffs)
            assert reduced == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_repeated_difference_is_degenerate():
    u = np.array([(0.5, 0.25), (0.5, 0.25)])
    assert circumradius_of_differences(u) == 0.0
