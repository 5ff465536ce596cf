import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pachsel import lp
from pachsel.errors import DimensionMismatchError, PreconditionError
from pachsel.geometry import (
    LabeledPointSet,
    OrientedHyperplane,
    affine_hulls_intersect,
    find_general_position_violation,
    hyperplane_through_points,
    in_general_position,
    orientation,
    point_in_simplex,
    satisfies_condition_G,
    strict_separation,
)
from pachsel.rational import matrix_rank_fraction, vec_sub

from conftest import general_position_points, random_points


small_fraction = st.fractions(
    min_value=Fraction(-4), max_value=Fraction(4), max_denominator=64
)


def test_orientation_examples():
    assert orientation([(0,), (1,)]) == 1
    assert orientation([(0, 0), (1, 0), (0, 1)]) == 1
    assert orientation([(0, 0), (1, 1), (2, 2)]) == 0


def test_orientation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        orientation([(0, 0), (1, 0)])


@settings(max_examples=60)
@given(st.lists(st.tuples(small_fraction, small_fraction), min_size=3, max_size=3))
def test_orientation_antisymmetry(points):
    base = orientation(points)
    swapped = [points[1], points[0], points[2]]
    assert orientation(swapped) == -base


@settings(max_examples=60)
@given(
    st.lists(st.tuples(small_fraction, small_fraction), min_size=3, max_size=3),
    st.tuples(small_fraction, small_fraction),
)
def test_orientation_translation_invariance(points, shift):
    translated = [tuple(c + s for c, s in zip(p, shift)) for p in points]
    assert orientation(translated) == orientation(points)


def test_orientation_float_sign_agrees_on_generic_input():
    pts = [(0.0, 0.0), (1.0, 0.25), (0.5, 2.0)]
    exact = [tuple(Fraction(c) for c in p) for p in pts]
    assert orientation(pts) == orientation(exact)


# ---------------------------------------------------------------------------
# general position


def _naive_general_position(points, d):
    """Independent oracle: exact rank check over all subsets of size <= d+1."""
    for k in range(2, min(len(points), d + 1) + 1):
        for combo in itertools.combinations(points, k):
            rows = [vec_sub(p, combo[0]) for p in combo[1:]]
            if matrix_rank_fraction(rows) < k - 1:
                return False
    return True


def test_general_position_examples():
    assert not in_general_position([(0, 0), (1, 1), (2, 2), (5, 0)])
    square_plus_center = [(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))]
    assert not in_general_position(square_plus_center)


def test_general_position_perturbed_grid_matches_naive_oracle():
    rng = random.Random(7)
    grid = []
    for i in range(3):
        for j in range(3):
            grid.append(
                (
                    i + Fraction(rng.randint(1, 999), 10007),
                    j + Fraction(rng.randint(1, 999), 10007),
                )
            )
    assert _naive_general_position(grid, 2)
    assert in_general_position(grid)


def test_general_position_agrees_with_naive_on_random_instances():
    rng = random.Random(3)
    for d in (1, 2, 3):
        for _ in range(10):
            pts = random_points(rng, d + 4, d, den=8, box=1)  # coarse: collisions likely
            assert in_general_position(pts) == _naive_general_position(pts, d)


def test_general_position_small_sets():
    assert in_general_position([(0, 0, 0), (1, 0, 0)])
    assert not in_general_position([(0, 0, 0), (0, 0, 0)])
    assert in_general_position([(0, 0), (1, 0), (0, 1)])


# ---------------------------------------------------------------------------
# condition (G)


def _naive_condition_g(points, d):
    """Brute force over all tuples of d+1 disjoint subsets of sizes 1..d."""
    if not in_general_position(points):
        return False
    n = len(points)
    subsets = []
    for k in range(1, d + 1):
        subsets.extend(itertools.combinations(range(n), k))
    for tup in itertools.combinations(subsets, d + 1):
        flat = [i for part in tup for i in part]
        if len(set(flat)) != len(flat):
            continue
        if affine_hulls_intersect([[points[i] for i in part] for part in tup]):
            return False
    return True


def test_condition_g_concurrent_lines_is_false():
    pts = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)]
    res = satisfies_condition_G(pts)
    assert res.is_false
    assert res.witness is not None
    assert not _naive_condition_g(pts, 2)


def test_condition_g_d1_distinct_points():
    assert satisfies_condition_G([(0,), (1,), (Fraction(7, 2),)]).is_true


def test_condition_g_perturbed_grid_matches_naive():
    rng = random.Random(11)
    grid = []
    for i in range(3):
        for j in range(3):
            grid.append(
                (
                    i + Fraction(rng.randint(1, 999), 9973),
                    j + Fraction(rng.randint(1, 999), 9973),
                )
            )
    res = satisfies_condition_G(grid)
    assert res.is_true
    assert _naive_condition_g(grid, 2)


def test_condition_g_agrees_with_naive_on_coarse_random_instances():
    rng = random.Random(5)
    for _ in range(8):
        pts = random_points(rng, 6, 2, den=4, box=1)
        if not in_general_position(pts):
            continue
        assert satisfies_condition_G(pts).is_true == _naive_condition_g(pts, 2)


def test_condition_g_implies_general_position(rng):
    for d in (1, 2):
        for _ in range(10):
            pts = random_points(rng, d + 5, d)
            if satisfies_condition_G(pts).is_true:
                assert in_general_position(pts)


def test_condition_g_single_parts_tuple():
    pts = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)]
    res = satisfies_condition_G(pts, parts=[(0, 1), (2, 3), (4, 5)])
    assert res.is_false
    ok = satisfies_condition_G(pts, parts=[(0, 2), (1, 3), (4, 5)])
    assert ok.status in ("true", "false")  # exact single-tuple answer
    with pytest.raises(PreconditionError):
        satisfies_condition_G(pts, parts=[(0, 1), (1, 2), (3, 4)])


def test_condition_g_cap_yields_indeterminate():
    rng = random.Random(9)
    pts = general_position_points(rng, 10, 3)
    res = satisfies_condition_G(pts, cap=10)
    assert res.status == "indeterminate"
    assert res.checked == 10


# ---------------------------------------------------------------------------
# simplex containment


def test_point_in_simplex_examples():
    tri = [(0, 0), (1, 0), (0, 1)]
    assert point_in_simplex((Fraction(1, 3), Fraction(1, 3)), tri, "open")
    assert not point_in_simplex((0, 0), tri, "open")
    assert point_in_simplex((0, 0), tri, "closed")
    assert not point_in_simplex((10, 10), tri, "closed")


def test_degenerate_simplex_has_empty_interior_but_closed_hull():
    seg = [(0, 0), (2, 2), (1, 1)]  # collinear
    assert not point_in_simplex((1, 1), seg, "open")
    assert point_in_simplex((1, 1), seg, "closed")
    assert not point_in_simplex((1, 0), seg, "closed")


def test_point_in_simplex_agrees_with_convex_combination_lp(rng):
    for d in (1, 2, 3):
        for _ in range(1000):
            verts = random_points(rng, d + 1, d, den=32, box=1)
            p = random_points(rng, 1, d, den=32, box=1)[0]
            via_lp = lp.convex_combination(p, verts) is not None
            assert point_in_simplex(p, verts, "closed") == via_lp


def test_convex_combination_coefficients_are_valid():
    verts = [(0, 0), (2, 0), (0, 2)]
    lam = lp.convex_combination((Fraction(1, 2), Fraction(1, 2)), verts)
    assert lam is not None
    assert sum(lam) == 1
    assert all(x >= 0 for x in lam)
    rebuilt = tuple(
        sum(l * Fraction(v[k]) for l, v in zip(lam, verts)) for k in range(2)
    )
    assert rebuilt == (Fraction(1, 2), Fraction(1, 2))


# ---------------------------------------------------------------------------
# strict separation


def test_strict_separation_line_example():
    h = strict_separation((0,), [(1,), (2,)])
    assert h is not None
    assert h.side((0,)) < 0
    assert h.side((1,)) > 0 and h.side((2,)) > 0


def test_strict_separation_infeasible_cases():
    pts = [(0, 0), (2, 0), (0, 2)]
    centroid = (Fraction(2, 3), Fraction(2, 3))
    assert strict_separation(centroid, pts) is None
    assert strict_separation((0, 0), pts) is None  # on the hull boundary
    assert strict_separation((Fraction(1, 2), Fraction(1, 2)), pts) is None


def _caratheodory_hull_membership(point, points, d):
    """LP-free oracle: some (d+1)-subset's closed simplex contains the point.

    Valid whenever the points are in general position (no degenerate
    subsets), which the caller ensures.
    """
    for combo in itertools.combinations(points, d + 1):
        if point_in_simplex(point, list(combo), "closed"):
            return True
    return False


def test_separation_farkas_duality_small(rng):
    for d in (1, 2, 3):
        for _ in range(40):
            pts = general_position_points(rng, d + 4, d, den=64, box=1)
            p = random_points(rng, 1, d, den=64, box=1)[0]
            separated = strict_separation(p, pts) is not None
            inside = _caratheodory_hull_membership(p, pts, d)
            assert separated == (not inside)


def test_hyperplane_through_points():
    h = hyperplane_through_points([(1, 0), (0, 1)])
    assert h.side((1, 0)) == 0 and h.side((0, 1)) == 0
    assert h.side((0, 0)) != 0
    with pytest.raises(PreconditionError):
        hyperplane_through_points([(0, 0), (0, 0)])


def test_oriented_hyperplane_flip_consistency():
    h = OrientedHyperplane((Fraction(1), Fraction(-2)), Fraction(3, 7))
    p = (5, 1)
    assert h.side(p) == -h.flipped().side(p)
    with pytest.raises(PreconditionError):
        OrientedHyperplane((0, 0), 1)


def test_labeled_point_set_validation():
    with pytest.raises(PreconditionError):
        LabeledPointSet.create(2, [[(0, 0)], [(1, 1)]])  # needs 3 colors
    ps = LabeledPointSet.create(1, [[(0,), (1,)], [(2,)]])
    assert ps.sizes() == (2, 1)
    assert find_general_position_violation(ps) is None
