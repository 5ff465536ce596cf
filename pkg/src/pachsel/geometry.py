"""Exact geometric primitives: orientation, general position, condition (G),
simplex containment, and strict hyperplane separation.

All combinatorial predicates run on exact rational arithmetic (floats are
converted losslessly).  Volume and angle estimation live in cones.py and are
deliberately float-only; the split keeps the pipeline's correctness claims
exact while the audits stay statistical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lp
from .errors import DimensionMismatchError, PreconditionError
from .rational import (
    det_fraction,
    det_int,
    dot,
    is_exact,
    matrix_rank_fraction,
    point_to_fractions,
    scale_points_to_ints,
    to_fraction,
    vec_sub,
)

# Scaled integer coordinates below this bound keep d=2 cross products inside
# int64, enabling the vectorized general-position check.
_NUMPY_SAFE_BOUND = 1 << 30


def _is_exact_point(point) -> bool:
    return all(is_exact(c) for c in point)


def _det_float(rows) -> float:
    a = np.asarray(rows, dtype=float)
    return float(np.linalg.det(a))


def orientation(points) -> int:
    """Sign of the orientation determinant of d+1 points in R^d.

    Exact (via rational arithmetic) whenever the inputs are exact; float
    inputs get the float determinant's sign, reliable off degeneracies.
    """
    k = len(points)
    d = k - 1
    for p in points:
        if len(p) != d:
            raise DimensionMismatchError(
                f"orientation of {k} points needs dimension {d}, got point of dimension {len(p)}"
            )
    base = points[0]
    rows = [vec_sub(p, base) for p in points[1:]]
    if all(_is_exact_point(p) for p in points):
        det = det_fraction(rows)
        return (det > 0) - (det < 0)
    det = _det_float(rows)
    return (det > 0) - (det < 0)


def orientation_int(int_points) -> int:
    """orientation() for pre-scaled integer points (fast path)."""
    base = int_points[0]
    rows = [tuple(a - b for a, b in zip(p, base)) for p in int_points[1:]]
    det = det_int(rows)
    return (det > 0) - (det < 0)


@dataclass(frozen=True)
class OrientedHyperplane:
    """Hyperplane normal.x = offset; x is on the positive side iff normal.x > offset."""

    normal: tuple
    offset: object

    def __post_init__(self):
        if all(c == 0 for c in self.normal):
            raise PreconditionError("hyperplane normal must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def value(self, point):
        return dot(self.normal, point) - self.offset

    def side(self, point) -> int:
        v = self.value(point)
        return (v > 0) - (v < 0)

    def flipped(self) -> "OrientedHyperplane":
        return OrientedHyperplane(tuple(-c for c in self.normal), -self.offset)

    def as_fractions(self) -> "OrientedHyperplane":
        return OrientedHyperplane(point_to_fractions(self.normal), to_fraction(self.offset))


def hyperplane_through_points(points) -> OrientedHyperplane:
    """The hyperplane spanned by d affinely independent points in R^d."""
    d = len(points)
    for p in points:
        if len(p) != d:
            raise DimensionMismatchError("need d points of dimension d")
    pts = [point_to_fractions(p) for p in points]
    if d == 1:
        return OrientedHyperplane((Fraction(1),), pts[0][0])
    base = pts[0]
    diffs = [vec_sub(p, base) for p in pts[1:]]  # (d-1) x d
    normal = []
    for k in range(d):
        minor = [[row[c] for c in range(d) if c != k] for row in diffs]
        normal.append((-1) ** k * det_fraction(minor))
    if all(c == 0 for c in normal):
        raise PreconditionError("points are affinely dependent; no unique hyperplane")
    normal = tuple(normal)
    return OrientedHyperplane(normal, dot(normal, base))


@dataclass(frozen=True)
class LabeledPointSet:
    """d+1 colored finite point sets in R^d with stable within-color indices."""

    dim: int
    colors: tuple
    exact: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise PreconditionError("dimension must be positive")
        if len(self.colors) != self.dim + 1:
            raise PreconditionError(
                f"expected {self.dim + 1} colors for dimension {self.dim}, got {len(self.colors)}"
            )
        for pts in self.colors:
            for p in pts:
                if len(p) != self.dim:
                    raise DimensionMismatchError("point dimension mismatch")
                if self.exact and not _is_exact_point(p):
                    raise PreconditionError("exact point set contains non-exact coordinates")

    @classmethod
    def create(cls, dim, colors, exact=True):
        normalized = tuple(
            tuple(point_to_fractions(p) if exact else tuple(float(c) for c in p) for p in pts)
            for pts in colors
        )
        return cls(dim, normalized, exact)

    def sizes(self):
        return tuple(len(pts) for pts in self.colors)

    def union_points(self):
        return [p for pts in self.colors for p in pts]

    def union_with_ids(self):
        return [((ci, pi), p) for ci, pts in enumerate(self.colors) for pi, p in enumerate(pts)]

    def point(self, color, index):
        return self.colors[color][index]

    def subset(self, index_sets) -> "LabeledPointSet":
        colors = tuple(
            tuple(self.colors[ci][i] for i in sorted(index_sets[ci])) for ci in range(len(self.colors))
        )
        return LabeledPointSet(self.dim, colors, self.exact)


def _point_list(obj):
    if isinstance(obj, LabeledPointSet):
        return obj.dim, obj.union_points()
    pts = list(obj)
    if not pts:
        raise PreconditionError("empty point collection")
    return len(pts[0]), pts


def find_general_position_violation(obj):
    """First affinely dependent (<= d+1)-tuple of the given points, or None.

    Affine dependence is monotone under supersets, so scanning all
    (d+1)-subsets suffices once the collection has more than d+1 points.
    """
    d, pts = _point_list(obj)
    n = len(pts)
    if n <= d + 1:
        rows = [vec_sub(p, pts[0]) for p in pts[1:]]
        if not rows:
            return None
        if all(_is_exact_point(p) for p in pts):
            rank = matrix_rank_fraction(rows)
        else:
            rank = int(np.linalg.matrix_rank(np.asarray(rows, dtype=float)))
        if rank < n - 1:
            return tuple(range(n))
        return None
    if all(_is_exact_point(p) for p in pts):
        int_pts, _ = scale_points_to_ints(pts)
        if d == 2 and max(abs(c) for p in int_pts for c in p) < _NUMPY_SAFE_BOUND:
            arr = np.asarray(int_pts, dtype=np.int64)
            idx = np.fromiter(
                itertools.chain.from_iterable(itertools.combinations(range(n), 3)),
                dtype=np.int64,
            ).reshape(-1, 3)
            a, b, c = arr[idx[:, 0]], arr[idx[:, 1]], arr[idx[:, 2]]
            cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
                c[:, 0] - a[:, 0]
            )
            bad = np.nonzero(cross == 0)[0]
            if bad.size:
                return tuple(int(x) for x in idx[bad[0]])
            return None
        for combo in itertools.combinations(range(n), d + 1):
            if orientation_int([int_pts[i] for i in combo]) == 0:
                return combo
        return None
    for combo in itertools.combinations(range(n), d + 1):
        if orientation([pts[i] for i in combo]) == 0:
            return combo
    return None


def in_general_position(obj) -> bool:
    """True iff every <= d+1 of the points are affinely independent."""
    return find_general_position_violation(obj) is None


@dataclass(frozen=True)
class ConditionGResult:
    """Tri-state outcome of a condition (G) check.

    status is 'true', 'false', or 'indeterminate' (enumeration cap hit).
    witness carries the failing tuple of index tuples when status is 'false'.
    """

    status: str
    witness: tuple | None = None
    checked: int = 0

    @property
    def is_true(self) -> bool:
        return self.status == "true"

    @property
    def is_false(self) -> bool:
        return self.status == "false"


DEFAULT_CONDITION_G_CAP = 10_000_000


def affine_hulls_intersect(point_groups) -> bool:
    """Exact test whether the affine hulls of the groups share a point.

    Solvability of the stacked affine-combination system, decided by a
    rational rank comparison.
    """
    groups = [[point_to_fractions(p) for p in g] for g in point_groups]
    if any(not g for g in groups):
        return False
    d = len(groups[0][0])
    nmu = sum(len(g) for g in groups)
    ncols = d + nmu
    rows = []
    rhs = []
    mu_off = d
    for g in groups:
        for k in range(d):  # sum_j mu_j * s_j - x = 0
            row = [Fraction(0)] * ncols
            row[k] = Fraction(-1)
            for j, s in enumerate(g):
                row[mu_off + j] = s[k]
            rows.append(row)
            rhs.append(Fraction(0))
        row = [Fraction(0)] * ncols  # affine combination: coefficients sum to 1
        for j in range(len(g)):
            row[mu_off + j] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
        mu_off += len(g)
    rank_a = matrix_rank_fraction(rows)
    rank_ab = matrix_rank_fraction([r + [b] for r, b in zip(rows, rhs)])
    return rank_a == rank_ab


# Integer coordinates up to this bound keep the worst line-pair intermediate
# (8 * M^3) inside int64 for the vectorized planar condition-(G) check.
_PLANE_INT64_BOUND = 900_000


def _condition_g_plane_vectorized(int_pts) -> ConditionGResult:
    n = len(int_pts)
    arr = np.asarray(int_pts, dtype=np.int64)
    supports = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), 2)), dtype=np.int64
    ).reshape(-1, 2)
    pa, pb = arr[supports[:, 0]], arr[supports[:, 1]]
    la = pa[:, 1] - pb[:, 1]
    lb = pb[:, 0] - pa[:, 0]
    lc = pa[:, 0] * pb[:, 1] - pa[:, 1] * pb[:, 0]
    nlines = len(supports)
    checked = 0
    collected = []
    for i in range(nlines - 1):
        a1, b1, c1 = int(la[i]), int(lb[i]), int(lc[i])
        s1, s2 = int(supports[i, 0]), int(supports[i, 1])
        disjoint = (
            (supports[i + 1 :, 0] != s1)
            & (supports[i + 1 :, 0] != s2)
            & (supports[i + 1 :, 1] != s1)
            & (supports[i + 1 :, 1] != s2)
        )
        w = a1 * lb[i + 1 :] - la[i + 1 :] * b1
        valid = disjoint & (w != 0)
        if not valid.any():
            continue
        w = w[valid]
        x = b1 * lc[i + 1 :][valid] - lb[i + 1 :][valid] * c1
        y = c1 * la[i + 1 :][valid] - lc[i + 1 :][valid] * a1
        neg = w < 0
        w = np.where(neg, -w, w)
        x = np.where(neg, -x, x)
        y = np.where(neg, -y, y)
        g = np.gcd(np.gcd(np.abs(x), np.abs(y)), w)
        collected.append(np.stack([x // g, y // g, w // g], axis=1))
        checked += int(valid.sum())
    if not collected:
        return ConditionGResult("true", None, checked)
    keys = np.concatenate(collected)
    uniq, counts = np.unique(keys, axis=0, return_counts=True)
    bad = np.nonzero(counts >= 3)[0]
    if bad.size == 0:
        return ConditionGResult("true", None, checked)
    # Exact hit: >= 3 concurrent pairwise-disjoint spanned lines.  Recover
    # the support pairs for the witness.
    x0, y0, w0 = (int(v) for v in uniq[bad[0]])
    witness = []
    for k in range(nlines):
        if int(la[k]) * x0 + int(lb[k]) * y0 + int(lc[k]) * w0 == 0:
            witness.append((int(supports[k, 0]), int(supports[k, 1])))
        if len(witness) == 3:
            break
    return ConditionGResult("false", tuple(witness), checked)


def _condition_g_plane(points) -> ConditionGResult:
    """Exact planar condition (G) via spanned-line intersection hashing.

    Assumes general position already verified.  Under general position the
    only possible violations are three pairwise-disjoint point pairs whose
    spanned lines are concurrent, and any two distinct spanned lines through
    a common non-input point automatically have disjoint supports, so it
    suffices to find a point hit by three distinct lines.
    """
    int_pts, _ = scale_points_to_ints(points)
    if max(abs(c) for p in int_pts for c in p) <= _PLANE_INT64_BOUND:
        return _condition_g_plane_vectorized(int_pts)
    n = len(int_pts)
    lines = []
    for a in range(n):
        xa, ya = int_pts[a]
        for b in range(a + 1, n):
            xb, yb = int_pts[b]
            lines.append((ya - yb, xb - xa, xa * yb - ya * xb, a, b))
    buckets: dict = {}
    checked = 0
    nlines = len(lines)
    for i in range(nlines):
        a1, b1, c1, pa1, pb1 = lines[i]
        for j in range(i + 1, nlines):
            a2, b2, c2, pa2, pb2 = lines[j]
            if pa1 == pa2 or pa1 == pb2 or pb1 == pa2 or pb1 == pb2:
                continue
            w = a1 * b2 - a2 * b1
            if w == 0:
                continue
            checked += 1
            x = b1 * c2 - b2 * c1
            y = c1 * a2 - c2 * a1
            if w < 0:
                x, y, w = -x, -y, -w
            key = (Fraction(x, w), Fraction(y, w))
            bucket = buckets.get(key)
            if bucket is None:
                buckets[key] = {i, j}
            else:
                bucket.add(i)
                bucket.add(j)
                if len(bucket) >= 3:
                    ids = sorted(bucket)[:3]
                    witness = tuple((lines[k][3], lines[k][4]) for k in ids)
                    return ConditionGResult("false", witness, checked)
    return ConditionGResult("true", None, checked)


def _iter_disjoint_subset_tuples(n, d):
    """All unordered tuples of d+1 pairwise disjoint index subsets of sizes 2..d.

    Singleton subsets cannot participate in a violation once general position
    holds, so they are not enumerated.  Tuples are canonicalized by requiring
    strictly increasing minima across parts.
    """
    sizes = range(2, d + 1)

    def rec(parts):
        if len(parts) == d + 1:
            yield tuple(parts)
            return
        used = set().union(*parts) if parts else set()
        last_min = min(parts[-1]) if parts else -1
        avail = [i for i in range(n) if i not in used]
        for size in sizes:
            for combo in itertools.combinations(avail, size):
                if combo[0] <= last_min:
                    continue
                yield from rec(parts + [combo])

    yield from rec([])


def satisfies_condition_G(obj, parts=None, cap: int = DEFAULT_CONDITION_G_CAP) -> ConditionGResult:
    """Condition (G): general position plus empty common intersection of the
    affine hulls of any d+1 pairwise disjoint subsets of size <= d.

    With ``parts`` given, checks only that tuple of index subsets.  Without
    it, the check is exhaustive: closed form for d=1, exact line-intersection
    hashing for d=2, and capped enumeration for d >= 3 (result 'indeterminate'
    once ``cap`` tuples were examined).
    """
    d, pts = _point_list(obj)
    if parts is not None:
        for a, b in itertools.combinations(parts, 2):
            if set(a) & set(b):
                raise PreconditionError("parts must be pairwise disjoint")
        for part in parts:
            if len(part) > d:
                raise PreconditionError("parts must have size at most d")
        groups = [[pts[i] for i in part] for part in parts]
        hit = affine_hulls_intersect(groups)
        return ConditionGResult("false" if hit else "true", tuple(parts) if hit else None, 1)
    violation = find_general_position_violation(pts)
    if violation is not None:
        return ConditionGResult("false", (violation,), 0)
    if d == 1:
        return ConditionGResult("true", None, 0)  # distinct points suffice
    if d == 2:
        return _condition_g_plane(pts)
    checked = 0
    for tup in _iter_disjoint_subset_tuples(len(pts), d):
        checked += 1
        if checked > cap:
            return ConditionGResult("indeterminate", None, checked - 1)
        groups = [[pts[i] for i in part] for part in tup]
        if affine_hulls_intersect(groups):
            return ConditionGResult("false", tup, checked)
    return ConditionGResult("true", None, checked)


def point_in_simplex(point, vertices, mode: str = "closed") -> bool:
    """Membership of a point in the simplex spanned by d+1 vertices.

    closed: membership in the convex hull (degenerate simplices allowed,
    decided by an exact convex-combination LP).  open: interior membership
    via d+1 orientation signs; degenerate simplices have empty interior.
    """
    if mode not in ("closed", "open"):
        raise ValueError(f"unknown mode {mode!r}")
    d = len(point)
    if len(vertices) != d + 1:
        raise DimensionMismatchError("simplex needs d+1 vertices")
    verts = tuple(vertices)
    s_full = orientation(list(verts))
    if s_full == 0:
        if mode == "open":
            return False
        return lp.convex_combination(point, verts) is not None
    for i in range(d + 1):
        repl = list(verts)
        repl[i] = point
        s = orientation(repl)
        if mode == "open":
            if s != s_full:
                return False
        else:
            if s * s_full < 0:
                return False
    return True


def strict_separation(point, points):
    """Hyperplane H with H.value(point) < 0 < H.value(s) for all s, or None.

    None (infeasible) occurs exactly when the point lies in the closed convex
    hull of ``points``; this is a normal return, not a failure.
    """
    if not points:
        raise PreconditionError("cannot separate from an empty set")
    result = lp.max_margin_separation(point, points)
    if result is None:
        return None
    normal, offset, _margin = result
    h = OrientedHyperplane(normal, offset)
    if h.side(point) >= 0 or any(h.side(s) <= 0 for s in points):
        raise AssertionError("separation LP returned an invalid hyperplane")
    return h
