import numpy as np
import pytest

from geotree import BoundaryExhaustedError, PointSample, Window, sample_ppp
from geotree.forest_uniform import (
    ancestor_forest_rho,
    build_forest_rho,
    default_left_margin,
    survivor_count,
    survivor_curve,
)

RHO = 1.0


def rect(xmin, xmax, ymin, ymax):
    return Window.rect_bounds(xmin, xmax, ymin, ymax)


def test_sole_admissible_point():
    s = PointSample.from_points([(-3.0, 0.2)], rect(-10, 1, -2, 2))
    aid, apt = ancestor_forest_rho((0.0, 0.0), s, RHO)
    assert np.allclose(apt, (-3.0, 0.2))


def test_largest_abscissa_within_strip():
    s = PointSample.from_points([(-3.0, 0.2), (-1.0, -0.9), (-2.0, 5.0)], rect(-10, 1, -6, 6))
    aid, apt = ancestor_forest_rho((0.0, 0.0), s, RHO)
    assert np.allclose(apt, (-1.0, -0.9))


def test_self_point_excluded():
    s = PointSample.from_points([(0.0, 0.0), (-2.0, 0.5)], rect(-10, 1, -2, 2))
    aid, apt = ancestor_forest_rho((0.0, 0.0), s, RHO)
    assert np.allclose(apt, (-2.0, 0.5))


def test_boundary_exhausted_on_empty_strip():
    s = PointSample.from_points([(-3.0, 5.0)], rect(-10, 1, -7, 7))
    with pytest.raises(BoundaryExhaustedError):
        ancestor_forest_rho((0.0, 0.0), s, RHO)


def test_boundary_exhausted_on_vertical_overflow():
    s = PointSample.from_points([(-3.0, 0.0)], rect(-10, 1, -0.5, 0.5))
    with pytest.raises(BoundaryExhaustedError):
        ancestor_forest_rho((0.0, 0.0), s, RHO)


def test_gap_tail_bound():
    """P(l_X > l) <= exp(-2 rho l), and is in fact exactly that value."""
    reps = 3000
    gaps = []
    win = rect(-30.0, 0.5, -2.0, 2.0)
    for i in range(reps):
        s = sample_ppp(win, 1.0, 505, i)
        try:
            _, apt = ancestor_forest_rho((0.0, 0.0), s, RHO)
        except BoundaryExhaustedError:
            apt = (-30.0, 0.0)
        gaps.append(0.0 - apt[0])
    gaps = np.asarray(gaps)
    for l in (1.0, 2.0, 3.0):
        p_hat = np.mean(gaps > l)
        bound = np.exp(-2.0 * RHO * l)
        sigma = np.sqrt(bound * (1 - bound) / reps)
        assert p_hat <= bound + 3.0 * sigma


def test_forest_build_and_optimality_audit():
    win = rect(-60.0, 20.0, -10.0, 10.0)
    s = sample_ppp(win, 1.0, 9)
    region = rect(-20.0, 20.0, -8.0, 8.0)
    forest = build_forest_rho(s, RHO, region)
    pts = s.points
    built = np.nonzero(forest.ancestor != -1)[0]
    assert len(built) > 0
    for i in built:
        a = forest.ancestor[i]
        ax, ay = pts[a]
        xi, yi = pts[i]
        assert ax <= xi and (ax, ay) != (xi, yi)
        assert abs(ay - yi) <= RHO
        # U_X audit: open rectangle between ancestor and X avoids the sample
        inside = (
            (pts[:, 0] > ax)
            & (pts[:, 0] < xi)
            & (np.abs(pts[:, 1] - yi) <= RHO)
        )
        assert not np.any(inside)


def test_empty_region_forest():
    win = rect(-20.0, 5.0, -5.0, 5.0)
    s = sample_ppp(win, 1.0, 4)
    forest = build_forest_rho(s, RHO, rect(3.0, 4.0, 4.0, 4.9))
    assert np.all(forest.ancestor[forest.ancestor != -1] >= 0)


def test_survivor_trivial_cases():
    win = rect(-120.0, 2.0, -40.0, 60.0)
    s = sample_ppp(win, 1.0, 21)
    starts = np.column_stack((np.zeros(20), np.linspace(0.0, 20.0, 20)))
    assert survivor_count(s, RHO, starts, 0.0) == 20
    assert survivor_count(s, RHO, starts[:1], 50.0) == 1


def test_survivor_monotone_and_coalescing():
    win = rect(-120.0, 2.0, -40.0, 60.0)
    drops = 0
    for i in range(20):
        s = sample_ppp(win, 1.0, 33, i)
        starts = np.column_stack((np.zeros(10), np.linspace(0.0, 20.0, 10)))
        curve = survivor_curve(s, RHO, starts, [0.0, 5.0, 20.0, 80.0])
        assert all(a >= b for a, b in zip(curve, curve[1:])), curve
        drops += curve[-1] < curve[1]
    assert drops >= 15  # branches do coalesce over a run of 80


def test_survivor_boundary_exhausted():
    win = rect(-30.0, 2.0, -10.0, 30.0)
    s = sample_ppp(win, 1.0, 5)
    starts = np.column_stack((np.zeros(5), np.linspace(0.0, 18.0, 5)))
    with pytest.raises(BoundaryExhaustedError):
        survivor_count(s, RHO, starts, 200.0)


def test_gap_translation_invariance():
    """l_X law agrees at two distant reference points (CI overlap)."""
    win = rect(-80.0, 40.0, -3.0, 3.0)
    g1, g2 = [], []
    for i in range(1200):
        s = sample_ppp(win, 1.0, 61, i)
        for X, out in (((0.0, 0.0), g1), ((30.0, 0.0), g2)):
            _, apt = ancestor_forest_rho(X, s, RHO)
            out.append(X[0] - apt[0])
    m1, m2 = np.mean(g1), np.mean(g2)
    se = np.sqrt(np.var(g1) / len(g1) + np.var(g2) / len(g2))
    assert abs(m1 - m2) < 3.5 * se


def test_default_margin_policy():
    assert default_left_margin(1.0, 1.0, 0.0) == 20.0
    assert default_left_margin(0.1, 1.0, 50.0) == 50.0 + 20.0 * 5.0
