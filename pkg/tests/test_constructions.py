import math
from fractions import Fraction

import pytest

from pachsel.constructions import (
    CornerVolumeReport,
    GridBallConfig,
    corner_volume_audit,
    discretize_measure,
    gaussian_set,
    generate_grid_ball,
    grid_ball_count_bounds,
    grid_cubes_meeting_ball,
    uniform_ball_set,
    upper_bound_witness,
)
from pachsel.errors import InputValidationError, PreconditionError
from pachsel.geometry import in_general_position, satisfies_condition_G
from pachsel.rational import squared_norm, to_fraction
from pachsel.selection import (
    GenericPachConfiguration,
    PipelineParams,
    certificate_configuration,
    run_pipeline,
)


def _cube_index(point, eps):
    return tuple(to_fraction(c) // eps for c in point)


def test_grid_ball_interval():
    eps = Fraction(1, 2)
    ps = generate_grid_ball(GridBallConfig(1, eps, seed=1))
    assert ps.sizes() == (4, 4)
    lower, upper, ok = grid_ball_count_bounds(1, eps, 4)
    assert ok
    for color in ps.colors:
        cubes = {_cube_index(p, eps) for p in color}
        assert len(cubes) == 4  # one point per cube per color
        for p in color:
            assert squared_norm(p) < 1


def test_grid_ball_plane_sandwich_and_condition_g():
    eps = Fraction(1, 2)
    ps = generate_grid_ball(GridBallConfig(2, eps, seed=2))
    n = ps.sizes()[0]
    assert n == len(grid_cubes_meeting_ball(2, eps))
    lower, upper, ok = grid_ball_count_bounds(2, eps, n)
    assert ok
    for color in ps.colors:
        assert len({_cube_index(p, eps) for p in color}) == n
        for p in color:
            assert squared_norm(p) < 1
    assert satisfies_condition_G(ps.union_points()).is_true


def test_grid_ball_huge_cubes_still_tile():
    # huge cubes: only the two cubes flanking the origin meet the interval
    ps = generate_grid_ball(GridBallConfig(1, Fraction(3), seed=0))
    assert ps.sizes() == (2, 2)
    with pytest.raises(PreconditionError):
        GridBallConfig(1, Fraction(0))


def test_uniform_and_gaussian_sets_admissible():
    ps = uniform_ball_set(2, 6, seed=3)
    assert ps.sizes() == (6, 6, 6)
    assert all(squared_norm(p) < 1 for p in ps.union_points())
    assert satisfies_condition_G(ps.union_points()).is_true
    g = gaussian_set(2, 5, seed=4)
    assert g.sizes() == (5, 5, 5)
    assert in_general_position(g.union_points())


def test_corner_volume_audit_interval_vacuous_but_true():
    ps = uniform_ball_set(1, 6, seed=6)
    cert = run_pipeline(ps, PipelineParams(seed=3))
    cfg = certificate_configuration(ps, cert)
    report = corner_volume_audit(cfg, 100_000, seed=9)
    # d=1: msa is exactly 1/2, so the bound is 2 * (1/2) * beta_1 = 2
    assert report.bound == pytest.approx(2.0, abs=0.05)
    assert report.passed
    assert report.min_volume <= 2.0


def test_corner_volume_audit_plane_pipeline():
    ps = uniform_ball_set(2, 8, seed=7)
    cert = run_pipeline(ps, PipelineParams(seed=5))
    report = corner_volume_audit(certificate_configuration(ps, cert), 200_000, seed=11)
    assert isinstance(report, CornerVolumeReport)
    assert report.passed
    assert len(report.volumes) == 3
    assert report.min_volume == min(report.volumes)


def test_corner_volume_audit_rejects_points_outside_ball():
    ps_raw = gaussian_set(2, 5, seed=8)
    scaled = [[tuple(3 * c for c in p) for p in color] for color in ps_raw.colors]
    from pachsel.geometry import LabeledPointSet

    big = LabeledPointSet.create(2, scaled)
    cert = run_pipeline(big, PipelineParams(seed=2))
    cfg = GenericPachConfiguration(big, cert.index_sets, cert.point)
    if any(squared_norm(p) > 1 for color in cfg.selected_colors() for p in color):
        with pytest.raises(PreconditionError):
            corner_volume_audit(cfg, 1_000, seed=0)


def test_corner_volume_audit_near_boundary_configuration():
    # push a valid configuration close to the sphere: the bound is unconditional
    ps = uniform_ball_set(2, 8, seed=9)
    cert = run_pipeline(ps, PipelineParams(seed=6))
    norms = [
        math.sqrt(float(squared_norm(p)))
        for color in certificate_configuration(ps, cert).selected_colors()
        for p in color
    ]
    scale = Fraction(99, 100) / Fraction(round(max(norms) * 4096), 4096)
    if scale > 1:
        from pachsel.geometry import LabeledPointSet

        stretched = LabeledPointSet.create(
            2, [[tuple(scale * c for c in p) for p in color] for color in ps.colors]
        )
        cert2 = run_pipeline(stretched, PipelineParams(seed=6))
        report = corner_volume_audit(
            certificate_configuration(stretched, cert2), 150_000, seed=13
        )
        assert report.passed


def test_upper_bound_witness_plane_report():
    report = upper_bound_witness(2, Fraction(1, 2), seed=3, samples=100_000)
    assert report.n == 16
    assert report.g_is_vacuous  # g(2) > 1: no pass/fail on the g comparison
    assert len(report.volume_ratios) == 3
    assert len(report.certificate_fractions) == 3
    assert report.corner_report.passed
    data = report.as_dict()
    assert data["n"] == 16 and "seed" in data


def test_upper_bound_witness_3d_small_scale():
    report = upper_bound_witness(3, Fraction(1), seed=5, samples=60_000)
    assert report.n == 8
    assert len(report.shrunk_fractions) == 4
    assert report.corner_report.passed
    assert 0 < report.min_fraction <= 1


def test_discretize_measure_examples():
    # single point of weight 1 plus a 1/3-2/3 color: common denominator 3
    colors = [
        [((Fraction(1, 2),), Fraction(1))],
        [((0,), Fraction(1, 3)), ((1,), Fraction(2, 3))],
    ]
    spread = Fraction(1, 50)
    ps = discretize_measure(1, colors, spread, seed=1)
    assert ps.sizes() == (3, 3)
    assert in_general_position(ps.union_points())
    # displacement bound is strict and exact
    for p in ps.colors[0]:
        assert squared_norm((p[0] - Fraction(1, 2),)) < spread * spread
    base = {0: Fraction(0), 1: Fraction(0), 2: Fraction(1)}
    # one copy near 0, two near 1
    near_zero = sum(1 for p in ps.colors[1] if abs(p[0]) < spread)
    near_one = sum(1 for p in ps.colors[1] if abs(p[0] - 1) < spread)
    assert (near_zero, near_one) == (1, 2)


def test_discretize_measure_shared_support_point():
    colors = [
        [((0, 0), Fraction(1, 2)), ((1, 0), Fraction(1, 2))],
        [((0, 0), Fraction(1))],
        [((Fraction(1, 2), 1), Fraction(1))],
    ]
    ps = discretize_measure(2, colors, Fraction(1, 100), seed=2)
    assert ps.sizes() == (2, 2, 2)
    union = ps.union_points()
    assert len(set(union)) == len(union)
    assert in_general_position(union)


def test_discretize_measure_validation():
    with pytest.raises(InputValidationError):
        discretize_measure(1, [[((0,), Fraction(1, 2))], [((1,), Fraction(1))]], Fraction(1, 10))
    with pytest.raises(PreconditionError):
        discretize_measure(1, [[((0,), Fraction(1))], [((1,), Fraction(1))]], Fraction(0))
