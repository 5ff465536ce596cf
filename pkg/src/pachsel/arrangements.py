"""Arrangements of d+1 hyperplanes in general position: the central simplex,
corner regions, the separation dichotomy, and the corner covering property.

All computations are exact on rational inputs.  An arrangement is immutable
after build; queries are pure.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

from .errors import InternalInvariantError, PreconditionError
from .geometry import OrientedHyperplane, orientation, point_in_simplex, strict_separation
from .rational import format_scalar, point_to_fractions, solve_linear_fraction, vec_sub


@dataclass(frozen=True)
class CornerRegion:
    """C_i: intersection of the positive halfspaces of all hyperplanes but H_i.

    A simplicial cone with apex at the arrangement vertex h_i, generated by
    the directions from the other vertices toward h_i.
    """

    index: int
    apex: tuple
    halfspaces: tuple  # (j, OrientedHyperplane) for j != index
    ray_directions: tuple  # h_i - h_j for j != index

    def contains(self, point, strict: bool = False) -> bool:
        if strict:
            return all(h.side(point) > 0 for _, h in self.halfspaces)
        return all(h.side(point) >= 0 for _, h in self.halfspaces)


@dataclass(frozen=True)
class HyperplaneArrangement:
    """d+1 oriented hyperplanes in general position.

    Orientation convention after build: the central simplex lies in every
    negative closed halfspace, i.e. normal.h_j <= offset with equality
    exactly for j != i.
    """

    dim: int
    hyperplanes: tuple
    vertices: tuple  # h_i = intersection of all hyperplanes but H_i

    def corner(self, i: int) -> CornerRegion:
        halfspaces = tuple(
            (j, self.hyperplanes[j]) for j in range(self.dim + 1) if j != i
        )
        rays = tuple(vec_sub(self.vertices[i], self.vertices[j]) for j in range(self.dim + 1) if j != i)
        return CornerRegion(i, self.vertices[i], halfspaces, rays)

    def corners(self):
        return tuple(self.corner(i) for i in range(self.dim + 1))

    def central_simplex_contains(self, point, strict: bool = True) -> bool:
        """Membership in Delta(H) = intersection of the negative halfspaces."""
        if strict:
            return all(h.side(point) < 0 for h in self.hyperplanes)
        return all(h.side(point) <= 0 for h in self.hyperplanes)

    def point_on_some_hyperplane(self, point) -> bool:
        return any(h.side(point) == 0 for h in self.hyperplanes)


def build_arrangement(hyperplanes) -> HyperplaneArrangement:
    """Compute vertices, verify general position, and fix side orientations.

    General position: every d of the d+1 normals are linearly independent and
    the d+1 hyperplanes have no common point.  Each H_i is flipped, if
    needed, so that the central simplex lies on its negative side.
    """
    planes = [h.as_fractions() for h in hyperplanes]
    if not planes:
        raise PreconditionError("empty arrangement")
    d = planes[0].dim
    if len(planes) != d + 1:
        raise PreconditionError(f"need d+1 = {d + 1} hyperplanes, got {len(planes)}")
    vertices = []
    for i in range(d + 1):
        rows = [planes[j].normal for j in range(d + 1) if j != i]
        rhs = [planes[j].offset for j in range(d + 1) if j != i]
        try:
            vertices.append(solve_linear_fraction(rows, rhs))
        except ValueError:
            raise PreconditionError(
                f"normals of the hyperplanes other than {i} are linearly dependent"
            )
    for i in range(d + 1):
        if planes[i].value(vertices[i]) == 0:
            raise PreconditionError("all d+1 hyperplanes pass through one point")
    if orientation(vertices) == 0:
        raise InternalInvariantError("arrangement vertices are affinely dependent")
    oriented = []
    for i in range(d + 1):
        # h_i is the only vertex off H_i; its side determines the flip.
        oriented.append(planes[i].flipped() if planes[i].value(vertices[i]) > 0 else planes[i])
    return HyperplaneArrangement(d, tuple(oriented), tuple(vertices))


@dataclass(frozen=True)
class DichotomyResult:
    branch: str  # "inside" | "outside"
    witness: OrientedHyperplane | None = None

    @property
    def inside(self) -> bool:
        return self.branch == "inside"


def _check_dichotomy_preconditions(point, arrangement, subsets):
    d = arrangement.dim
    if len(subsets) != d + 1:
        raise PreconditionError(f"need d+1 = {d + 1} point subsets")
    for i, h in enumerate(arrangement.hyperplanes):
        if h.side(point) == 0:
            raise PreconditionError(f"point lies on hyperplane {i}")
        p_side = h.side(point)
        for j, pts in enumerate(subsets):
            if j == i:
                continue
            for k, y in enumerate(pts):
                if h.side(y) == p_side or h.side(y) == 0:
                    raise PreconditionError(
                        f"hyperplane {i} does not strictly separate the point from "
                        f"subset {j} (offending point index {k})"
                    )


def separation_dichotomy(point, arrangement: HyperplaneArrangement, subsets) -> DichotomyResult:
    """Either the point is in the central simplex and every subset sits
    strictly inside its corner region, or a single hyperplane strictly
    separates the point from the union of the subsets.

    Precondition (checked): H_i strictly separates the point from the union
    of the subsets other than i, and the point avoids every hyperplane.
    """
    point = point_to_fractions(point)
    subsets = [tuple(point_to_fractions(y) for y in pts) for pts in subsets]
    _check_dichotomy_preconditions(point, arrangement, subsets)
    if arrangement.central_simplex_contains(point, strict=True):
        for i, pts in enumerate(subsets):
            corner = arrangement.corner(i)
            for y in pts:
                if not corner.contains(y, strict=True):
                    raise InternalInvariantError(
                        f"point of subset {i} not interior to its corner region"
                    )
        return DichotomyResult("inside")
    union = [y for pts in subsets for y in pts]
    witness = strict_separation(point, union)
    if witness is None:
        raise InternalInvariantError(
            "separator guaranteed by the dichotomy does not exist; inputs are inconsistent"
        )
    return DichotomyResult("outside", witness)


def dump_counterexample_bundle(arrangement, corner_points, point, reason: str) -> str:
    """Write a reproducible JSON bundle for a failed covering instance.

    Destination directory comes from PACHSEL_COUNTEREXAMPLE_DIR (default cwd).
    """
    directory = os.environ.get("PACHSEL_COUNTEREXAMPLE_DIR", ".")
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"pachsel-counterexample-{int(time.time() * 1000)}.json")
    bundle = {
        "reason": reason,
        "hyperplanes": [
            {"normal": [format_scalar(c) for c in h.normal], "offset": format_scalar(h.offset)}
            for h in arrangement.hyperplanes
        ],
        "corner_points": [[format_scalar(c) for c in y] for y in corner_points],
        "point": [format_scalar(c) for c in point],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, sort_keys=True, indent=2)
    return path


def corners_cover_simplex(arrangement: HyperplaneArrangement, corner_points, point) -> bool:
    """With one point picked in each corner region and a point of the central
    simplex, test whether the picked points' simplex covers it.

    This always returns True (it is a proved covering property); a False
    return indicates an implementation bug, and the offending instance is
    dumped as a counterexample bundle before returning.
    """
    d = arrangement.dim
    if len(corner_points) != d + 1:
        raise PreconditionError(f"need one point per corner region ({d + 1})")
    point = point_to_fractions(point)
    corner_points = [point_to_fractions(y) for y in corner_points]
    for i, y in enumerate(corner_points):
        if not arrangement.corner(i).contains(y, strict=False):
            raise PreconditionError(f"point {i} is not in corner region {i}")
    if not arrangement.central_simplex_contains(point, strict=False):
        raise PreconditionError("query point is not in the central simplex")
    covered = point_in_simplex(point, corner_points, mode="closed")
    if not covered:
        dump_counterexample_bundle(
            arrangement, corner_points, point, "corner points fail to cover the query point"
        )
    return covered
