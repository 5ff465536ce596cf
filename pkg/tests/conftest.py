import random
from fractions import Fraction

import pytest

from pachsel.geometry import (
    LabeledPointSet,
    OrientedHyperplane,
    in_general_position,
)
from pachsel.arrangements import build_arrangement


def random_rational_point(rng, d, den=1 << 16, box=2):
    return tuple(Fraction(rng.randint(-box * den, box * den), den) for _ in range(d))


def random_points(rng, n, d, den=1 << 16, box=2):
    return [random_rational_point(rng, d, den, box) for _ in range(n)]


def general_position_points(rng, n, d, den=1 << 16, box=2, tries=50):
    for _ in range(tries):
        pts = random_points(rng, n, d, den, box)
        if in_general_position(pts):
            return pts
    raise RuntimeError("could not sample points in general position")


def random_labeled_set(d, n, seed, den=1 << 16, box=2):
    rng = random.Random(seed)
    while True:
        colors = [random_points(rng, n, d, den, box) for _ in range(d + 1)]
        union = [p for c in colors for p in c]
        if in_general_position(union):
            return LabeledPointSet.create(d, colors)


def random_arrangement(d, seed, coeff=20):
    """A random rational arrangement of d+1 hyperplanes in general position."""
    rng = random.Random(seed)
    while True:
        planes = []
        for _ in range(d + 1):
            normal = tuple(Fraction(rng.randint(-coeff, coeff)) for _ in range(d))
            if all(c == 0 for c in normal):
                break
            planes.append(OrientedHyperplane(normal, Fraction(rng.randint(-coeff, coeff), 7)))
        if len(planes) != d + 1:
            continue
        try:
            return build_arrangement(planes)
        except Exception:
            continue


def random_cover_instance(d, seed):
    """Random (arrangement, corner points, central point) covering instance."""
    rng = random.Random(seed)
    arr = random_arrangement(d, seed)
    ys = []
    for i in range(d + 1):
        corner = arr.corner(i)
        y = list(corner.apex)
        for ray in corner.ray_directions:
            lam = Fraction(rng.randint(0, 64), 16)
            y = [a + lam * r for a, r in zip(y, ray)]
        ys.append(tuple(y))
    weights = [Fraction(rng.randint(1, 50)) for _ in range(d + 1)]
    total = sum(weights)
    p = tuple(
        sum(w * v[k] for w, v in zip(weights, arr.vertices)) / total for k in range(d)
    )
    return arr, ys, p


def naive_closed_containment_fraction(point_set, index_sets, point):
    """LP-free independent oracle: per-simplex orientation containment test."""
    import itertools

    from pachsel.geometry import point_in_simplex

    colors = [
        [point_set.point(ci, i) for i in idxs] for ci, idxs in enumerate(index_sets)
    ]
    total = 0
    hits = 0
    for verts in itertools.product(*colors):
        total += 1
        if point_in_simplex(point, list(verts), mode="closed"):
            hits += 1
    return Fraction(hits, total) if total else Fraction(1)


@pytest.fixture
def rng():
    return random.Random(12345)
