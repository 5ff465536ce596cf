"""The selection pipeline: deep rainbow point, anchor perturbation, weak
hypergraph regularity, few separations, and certificate assembly.

Stages communicate by value and are deterministic given their seeds.  Every
combinatorial decision is exact; see geometry.py for the predicate layer.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, prod

import numpy as np

from .arrangements import HyperplaneArrangement, build_arrangement, separation_dichotomy
from .enumeration import RainbowEnumerator
from .errors import (
    BudgetExceededError,
    GeneralPositionError,
    InputValidationError,
    InternalInvariantError,
    PreconditionError,
)
from .geometry import (
    LabeledPointSet,
    OrientedHyperplane,
    find_general_position_violation,
    satisfies_condition_G,
    strict_separation,
)
from .rational import det_int, point_to_fractions, scale_points_to_ints, to_fraction

_BRANCH_ALL = "all-contain"
_BRANCH_NONE = "none-contain"


# ---------------------------------------------------------------------------
# Rainbow hypergraph


@dataclass(frozen=True)
class RainbowHypergraph:
    """(d+1)-partite incidence structure of rainbow simplices containing p.

    ``edges[local indices]`` is True when the rainbow simplex with one vertex
    per part (closed hull, exact arithmetic) contains the anchor.
    """

    point_set: LabeledPointSet
    parts: tuple  # original indices per color
    anchor: tuple
    edges: np.ndarray

    @property
    def sizes(self):
        return tuple(len(p) for p in self.parts)

    @property
    def edge_count(self) -> int:
        return int(self.edges.sum())

    @property
    def density(self) -> Fraction:
        return Fraction(self.edge_count, prod(self.sizes))

    def sub_edge_count(self, local_subsets) -> int:
        return int(self.edges[np.ix_(*local_subsets)].sum())


def rainbow_hypergraph(point_set: LabeledPointSet, anchor, parts=None) -> RainbowHypergraph:
    """Build the containment hypergraph of an anchor over the given parts."""
    if parts is None:
        parts = tuple(tuple(range(n)) for n in point_set.sizes())
    else:
        parts = tuple(tuple(p) for p in parts)
    colors = [[point_set.point(ci, i) for i in idxs] for ci, idxs in enumerate(parts)]
    enum = RainbowEnumerator(colors)
    closed, _ = enum.containment_masks(anchor)
    return RainbowHypergraph(point_set, parts, point_to_fractions(anchor), closed)


# ---------------------------------------------------------------------------
# Deep rainbow point


@dataclass(frozen=True)
class DeepPointStrategy:
    use_centroid: bool = True
    use_coordinate_median: bool = True
    random_candidates: int = 200
    extra_points: tuple = ()


@dataclass(frozen=True)
class DeepPointResult:
    point: tuple
    depth: int
    open_depth: int
    total: int
    candidate_label: str
    candidates_evaluated: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.depth, self.total)


def _coordinate_median(points):
    d = len(points[0])
    coords = []
    for k in range(d):
        vals = sorted(p[k] for p in points)
        n = len(vals)
        if n % 2 == 1:
            coords.append(vals[n // 2])
        else:
            coords.append((vals[n // 2 - 1] + vals[n // 2]) / 2)
    return tuple(coords)


def deep_rainbow_point(
    point_set: LabeledPointSet,
    strategy: DeepPointStrategy | None = None,
    seed: int = 0,
    budget: int = 5_000_000,
) -> DeepPointResult:
    """Best candidate point by exact closed rainbow-containment count.

    Enumerates all rainbow simplices once, then scores candidate points:
    the centroid, the coordinate-wise median, seeded random rainbow-simplex
    centroids, and any user-supplied points.  The winner's depth/total ratio
    is reported so callers can compare against the first-selection constant.
    """
    strategy = strategy or DeepPointStrategy()
    sizes = point_set.sizes()
    if prod(sizes) > budget:
        raise BudgetExceededError(f"{prod(sizes)} rainbow simplices exceed budget {budget}")
    violation = find_general_position_violation(point_set)
    if violation is not None:
        raise GeneralPositionError("input set is not in general position", violation)
    union = [point_to_fractions(p) for p in point_set.union_points()]
    candidates = []
    if strategy.use_centroid:
        n = len(union)
        centroid = tuple(sum(p[k] for p in union) / n for k in range(point_set.dim))
        candidates.append(("centroid", centroid))
    if strategy.use_coordinate_median:
        candidates.append(("coordinate-median", _coordinate_median(union)))
    rng = random.Random(seed)
    k = point_set.dim + 1
    for t in range(strategy.random_candidates):
        verts = [
            point_to_fractions(point_set.point(ci, rng.randrange(sizes[ci]))) for ci in range(k)
        ]
        centroid = tuple(sum(v[j] for v in verts) / k for j in range(point_set.dim))
        candidates.append((f"simplex-centroid-{t}", centroid))
    for i, p in enumerate(strategy.extra_points):
        candidates.append((f"user-{i}", point_to_fractions(p)))
    if not candidates:
        raise PreconditionError("no candidate points to evaluate")
    seen = set()
    enum = RainbowEnumerator([list(c) for c in point_set.colors])
    best = None
    for label, cand in candidates:
        if cand in seen:
            continue
        seen.add(cand)
        closed, open_, _ = enum.containment_counts(cand)
        if best is None or closed > best[0]:
            best = (closed, open_, cand, label)
    closed, open_, cand, label = best
    return DeepPointResult(cand, closed, open_, enum.total, label, len(seen))


# ---------------------------------------------------------------------------
# Spanned-hyperplane sign machinery and anchor perturbation


def _spanned_sign_vector(int_points, int_anchor, d):
    """Signs of the anchor against every hyperplane spanned by d points."""
    signs = []
    for combo in itertools.combinations(range(len(int_points)), d):
        pts = [int_points[i] for i in combo] + [int_anchor]
        base = pts[0]
        rows = [tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]
        v = det_int(rows)
        signs.append((v > 0) - (v < 0))
    return signs


def _random_rational_vector(rng, d, den=1 << 20):
    return tuple(Fraction(rng.randint(-den, den), den) for _ in range(d))


def _nudge_off_hyperplanes(anchor, points, seed, retries, scale):
    """Shift the anchor off every spanned hyperplane while crossing none.

    Preserving the nonzero spanned-hyperplane signs preserves, in particular,
    open containment in every simplex spanned by the points.  Returns the
    original anchor unchanged when it is already off all hyperplanes.
    """
    d = len(anchor)
    anchor_fr = point_to_fractions(anchor)
    all_pts = [point_to_fractions(p) for p in points]
    int_all, den = scale_points_to_ints(all_pts + [anchor_fr])
    int_points, int_anchor = int_all[:-1], int_all[-1]
    base_signs = _spanned_sign_vector(int_points, int_anchor, d)
    if all(s != 0 for s in base_signs):
        return anchor_fr
    rng = random.Random(seed)
    magnitude = to_fraction(scale)
    for attempt in range(retries):
        direction = _random_rational_vector(rng, d)
        cand = tuple(a + magnitude * u for a, u in zip(anchor_fr, direction))
        int_all2, _ = scale_points_to_ints(all_pts + [cand])
        cand_signs = _spanned_sign_vector(int_all2[:-1], int_all2[-1], d)
        ok = all(
            (b == 0 and c != 0) or (b != 0 and c == b)
            for b, c in zip(base_signs, cand_signs)
        )
        if ok:
            return cand
        magnitude /= 2
    raise BudgetExceededError(f"anchor perturbation failed after {retries} attempts")


def perturb_anchor(
    anchor, point_set: LabeledPointSet, seed: int = 0, retries: int = 50
) -> tuple:
    """Move the anchor into general position with the set without leaving the
    interior of any rainbow simplex that contained it.

    Precondition: the anchor is interior to at least one rainbow simplex.
    The open-containment bit-vector is re-verified exhaustively afterwards.
    """
    enum = RainbowEnumerator([list(c) for c in point_set.colors])
    _, before_open = enum.containment_masks(anchor)
    if not before_open.any():
        raise PreconditionError("anchor has no open-interior margin")
    union = point_set.union_points()
    violation = find_general_position_violation(union)
    if violation is not None:
        raise GeneralPositionError("input set is not in general position", violation)
    # Magnitude scale: small relative to the coordinate spread of the set.
    spread = max(
        (abs(to_fraction(c)) for p in union for c in p),
        default=Fraction(1),
    )
    scale = (spread + 1) / (1 << 20)
    moved = _nudge_off_hyperplanes(anchor, union, seed, retries, scale)
    _, after_open = enum.containment_masks(moved)
    # every simplex that held the anchor in its interior must still hold it;
    # boundary simplices may open up, which only increases the depth
    if not np.array_equal(before_open, before_open & after_open):
        raise InternalInvariantError("perturbation lost an open containment")
    violation = find_general_position_violation(union + [moved])
    if violation is not None:
        raise InternalInvariantError("perturbed anchor still in degenerate position")
    return moved


# ---------------------------------------------------------------------------
# Weak hypergraph regularity


@dataclass(frozen=True)
class RegularityParams:
    epsilon: Fraction
    beta: Fraction
    witness_budget: int = 2000
    exhaustive_cap: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        eps = to_fraction(self.epsilon)
        if not Fraction(0) < eps < Fraction(1, 2):
            raise PreconditionError("epsilon must lie in (0, 1/2)")
        if to_fraction(self.beta) <= 0:
            raise PreconditionError("beta must be positive")


@dataclass(frozen=True)
class RegularityStep:
    size_before: int
    size_after: int
    density_before: Fraction
    density_after: Fraction
    witness_source: str  # "exhaustive" | "sampled" | "forced"


@dataclass(frozen=True)
class RegularityResult:
    parts: tuple  # original indices per color, equal sizes
    local_parts: tuple  # indices into the hypergraph parts
    size: int
    density: Fraction
    status: str  # "exhaustive-clean" | "sampled-clean"
    trials: int
    steps: tuple

    def report(self) -> str:
        if self.status == "exhaustive-clean":
            return self.status
        return f"sampled-clean({self.trials})"


def _block_density(h, block):
    cnt = h.sub_edge_count(block)
    return Fraction(cnt, prod(len(b) for b in block))


def _greedy_trim(h, block, target):
    """Trim each part of a block to ``target`` vertices without losing density.

    Keeping the top-degree vertices of one part preserves at least the
    average edge share; parts are processed in order, recomputing degrees.
    """
    block = [list(b) for b in block]
    k = len(block)
    for i in range(k):
        if len(block[i]) == target:
            continue
        sub = h.edges[np.ix_(*block)]
        axes = tuple(j for j in range(k) if j != i)
        degrees = sub.sum(axis=axes)
        order = np.lexsort((np.arange(len(block[i])), -degrees))
        keep = sorted(order[:target])
        block[i] = [block[i][j] for j in keep]
    return tuple(tuple(b) for b in block)


def _restrict(h, local_parts, witness, source):
    """One restriction step: pick the densest non-witness block, equalize sizes."""
    k = len(local_parts)
    density_before = _block_density(h, local_parts)
    complements = [
        tuple(i for i in part if i not in set(w)) for part, w in zip(local_parts, witness)
    ]
    best = None
    for choice in itertools.product((0, 1), repeat=k):
        if all(c == 0 for c in choice):
            continue  # the all-witness block has no edges by construction
        block = tuple(
            witness[i] if choice[i] == 0 else complements[i] for i in range(k)
        )
        if any(len(b) == 0 for b in block):
            continue
        dens = _block_density(h, block)
        if best is None or dens > best[0]:
            best = (dens, block)
    if best is None:
        raise InternalInvariantError("no candidate block in restriction step")
    _, block = best
    target = min(len(b) for b in block)
    trimmed = _greedy_trim(h, block, target)
    density_after = _block_density(h, trimmed)
    if density_after < density_before:
        raise InternalInvariantError("restriction decreased density")
    step = RegularityStep(
        size_before=len(local_parts[0]),
        size_after=target,
        density_before=density_before,
        density_after=density_after,
        witness_source=source,
    )
    return trimmed, step


def _find_zero_edge_witness(h, local_parts, t, cap, budget, rng):
    """Zero-edge tuple of size-t subsets, with the guarantee actually used.

    Returns (witness or None, source string, trials).  Exhaustive only when
    the tuple count is within ``cap``; otherwise ``budget`` random samples.
    """
    s = len(local_parts[0])
    k = len(local_parts)
    n_tuples = comb(s, t) ** k
    if n_tuples <= cap:
        for combo in itertools.product(
            *[itertools.combinations(part, t) for part in local_parts]
        ):
            if h.sub_edge_count(combo) == 0:
                return tuple(combo), "exhaustive", n_tuples
        return None, "exhaustive", n_tuples
    for trial in range(budget):
        combo = tuple(tuple(sorted(rng.sample(part, t))) for part in local_parts)
        if h.sub_edge_count(combo) == 0:
            return combo, "sampled", trial + 1
    return None, "sampled", budget


def weak_regularity(
    h: RainbowHypergraph,
    params: RegularityParams,
    initial_parts=None,
    forced_witness=None,
) -> RegularityResult:
    """Constructive weak regularity: equal-size parts of density >= beta such
    that no found tuple of eps-fraction subsets is edge-free.

    Whenever a zero-edge witness tuple is found the parts restrict to the
    densest block (density gain >= 1/(1 - eps^k)) and the search repeats; the
    returned report says whether the final clean witness search was
    exhaustive or sampled, which is the guarantee actually established.
    ``forced_witness`` lets a caller inject an externally discovered
    zero-edge tuple (local indices) before searching.
    """
    k = len(h.parts)
    eps = to_fraction(params.epsilon)
    if initial_parts is None:
        local_parts = tuple(tuple(range(n)) for n in h.sizes)
    else:
        local_parts = tuple(tuple(p) for p in initial_parts)
    sizes = {len(p) for p in local_parts}
    if len(sizes) != 1:
        raise PreconditionError("parts must have equal sizes")
    density = _block_density(h, local_parts)
    if density < to_fraction(params.beta):
        raise PreconditionError(f"density {density} below the floor {params.beta}")
    rng = random.Random(params.seed)
    steps = []
    if forced_witness is not None:
        t = max(1, ceil(eps * len(local_parts[0])))
        trimmed_witness = tuple(tuple(sorted(w)[:t]) for w in forced_witness)
        if any(len(w) != t for w in trimmed_witness):
            raise PreconditionError("forced witness parts are smaller than eps * s")
        if h.sub_edge_count(trimmed_witness) != 0:
            raise PreconditionError("forced witness spans an edge")
        local_parts, step = _restrict(h, local_parts, trimmed_witness, "forced")
        steps.append(step)
    status = None
    trials = 0
    while True:
        s = len(local_parts[0])
        t = max(1, ceil(eps * s))
        if t >= s:
            # A witness would be the whole tuple, which has positive density.
            status, trials = "exhaustive-clean", 0
            break
        witness, source, count = _find_zero_edge_witness(
            h, local_parts, t, params.exhaustive_cap, params.witness_budget, rng
        )
        if witness is None:
            status = "exhaustive-clean" if source == "exhaustive" else "sampled-clean"
            trials = count
            break
        local_parts, step = _restrict(h, local_parts, witness, source)
        steps.append(step)
    parts = tuple(
        tuple(h.parts[ci][i] for i in local) for ci, local in enumerate(local_parts)
    )
    return RegularityResult(
        parts=parts,
        local_parts=local_parts,
        size=len(local_parts[0]),
        density=_block_density(h, local_parts),
        status=status,
        trials=trials,
        steps=tuple(steps),
    )


# ---------------------------------------------------------------------------
# Ham-sandwich bisection


def _int_hyperplane_through(int_points):
    """(normal, offset) integer data of the hyperplane spanned by d points."""
    d = len(int_points)
    if d == 1:
        return (1,), int_points[0][0]
    base = int_points[0]
    diffs = [tuple(a - b for a, b in zip(p, base)) for p in int_points[1:]]
    normal = []
    for kk in range(d):
        minor = [[row[c] for c in range(d) if c != kk] for row in diffs]
        normal.append((-1) ** kk * det_int(minor))
    offset = sum(n * x for n, x in zip(normal, base))
    return tuple(normal), offset


def ham_sandwich_bisect(sets) -> OrientedHyperplane:
    """A hyperplane simultaneously bisecting d point sets in R^d.

    Enumerates hyperplanes spanned by one point of each set (deterministic
    lexicographic order) and returns the first whose two open sides each
    contain at least floor((|S_i| - on_i)/2) points of every set, where on_i
    counts the set's points on the hyperplane.  In general position some such
    spanned cut always exists; exhausting the enumeration therefore signals a
    general-position violation.
    """
    d = len(sets)
    if d > 3:
        raise PreconditionError("enumerative ham-sandwich supports d <= 3")
    if any(len(s) == 0 for s in sets):
        raise PreconditionError("empty set cannot be bisected")
    all_points = [point_to_fractions(p) for s in sets for p in s]
    violation = find_general_position_violation(all_points)
    if violation is not None:
        raise GeneralPositionError("sets are not in general position", violation)
    int_points, den = scale_points_to_ints(all_points)
    offsets = []
    pos = 0
    for s in sets:
        offsets.append(pos)
        pos += len(s)
    set_slices = [int_points[offsets[i] : offsets[i] + len(sets[i])] for i in range(d)]
    for combo in itertools.product(*[range(len(s)) for s in sets]):
        span = [set_slices[i][combo[i]] for i in range(d)]
        normal, offset = _int_hyperplane_through(span)
        if all(n == 0 for n in normal):
            continue
        ok = True
        for i in range(d):
            neg = pos_count = on = 0
            for q in set_slices[i]:
                v = sum(n * x for n, x in zip(normal, q)) - offset
                if v > 0:
                    pos_count += 1
                elif v < 0:
                    neg += 1
                else:
                    on += 1
            need = (len(set_slices[i]) - on) // 2
            if pos_count < need or neg < need:
                ok = False
                break
        if ok:
            return OrientedHyperplane(
                tuple(Fraction(n) for n in normal), Fraction(offset, den)
            )
    raise GeneralPositionError("no spanned bisecting cut found; inputs degenerate")


# ---------------------------------------------------------------------------
# Few separations


@dataclass(frozen=True)
class FewSeparationsResult:
    index_sets: tuple  # original indices per color
    arrangement: HyperplaneArrangement
    branch: str  # "all-contain" | "none-contain"
    separators: tuple  # the d+1 pre-perturbation separating hyperplanes

    @property
    def all_contain(self) -> bool:
        return self.branch == _BRANCH_ALL


def _shift_toward(cut: OrientedHyperplane, anchor, keep_points):
    """Shift a cut toward the anchor by half the smallest off-cut margin."""
    values = [cut.value(q) for q in keep_points if cut.value(q) != 0]
    vp = cut.value(anchor)
    margin = min([abs(vp)] + [abs(v) for v in values])
    sigma = 1 if vp > 0 else -1
    return OrientedHyperplane(cut.normal, cut.offset + sigma * margin / 2)


def _perturb_hyperplanes_general_position(planes, anchor, protected, seed, retries=50):
    """Rational perturbation of hyperplanes into general position.

    Preserves the strict sign of the anchor and of every protected point
    against its plane by keeping each coefficient change below the slack.
    """
    try:
        return build_arrangement(planes), planes
    except (PreconditionError, InternalInvariantError):
        pass
    d = planes[0].dim
    rng = random.Random(seed)
    slacks = []
    for h, pts in zip(planes, protected):
        slack = min(abs(h.value(q)) for q in list(pts) + [anchor])
        reach = max(
            sum(abs(to_fraction(c)) for c in q) + 1 for q in list(pts) + [anchor]
        )
        slacks.append(slack / (2 * reach))
    eta = min(slacks)
    for attempt in range(retries):
        jittered = []
        for h in planes:
            dn = _random_rational_vector(rng, d)
            doff = Fraction(rng.randint(-(1 << 20), 1 << 20), 1 << 20)
            jittered.append(
                OrientedHyperplane(
                    tuple(c + eta * u for c, u in zip(h.normal, dn)),
                    h.offset + eta * doff,
                )
            )
        sides_ok = all(
            all(hj.side(q) == h.side(q) for q in list(pts) + [anchor])
            for h, hj, pts in zip(planes, jittered, protected)
        )
        if not sides_ok:
            eta /= 2
            continue
        try:
            return build_arrangement(jittered), jittered
        except (PreconditionError, InternalInvariantError):
            eta /= 2
    raise BudgetExceededError("could not perturb hyperplanes into general position")


def few_separations(
    point_set: LabeledPointSet, index_sets, anchor, seed: int = 0
) -> FewSeparationsResult:
    """d+1 rounds of ham-sandwich halving, then one arrangement classifying
    the anchor: it lies in all rainbow simplices of the kept subsets or in
    none of them; each kept subset retains at least a 1/2^d fraction.
    """
    d = point_set.dim
    anchor = point_to_fractions(anchor)
    current = [
        [(i, point_to_fractions(point_set.point(ci, i))) for i in idxs]
        for ci, idxs in enumerate(index_sets)
    ]
    union = [p for part in current for _, p in part]
    violation = find_general_position_violation(union + [anchor])
    if violation is not None:
        raise GeneralPositionError(
            "subsets and anchor are not in general position", violation
        )
    separators: list = []
    for j in range(d + 1):
        others = [i for i in range(d + 1) if i != j]
        cut = ham_sandwich_bisect([[p for _, p in current[i]] for i in others])
        if cut.side(anchor) == 0:
            # Impossible once the union with the anchor is in general position:
            # the cut is spanned by d input points.
            raise GeneralPositionError("anchor lies on a spanned ham-sandwich cut")
        off_points = [p for i in others for _, p in current[i]]
        shifted = _shift_toward(cut, anchor, off_points)
        anchor_side = shifted.side(anchor)
        before = [len(current[i]) for i in range(d + 1)]
        for i in others:
            kept = [(idx, p) for idx, p in current[i] if shifted.side(p) == -anchor_side]
            if 2 * len(kept) < before[i]:
                raise InternalInvariantError("halving round kept fewer than half")
            current[i] = kept
        if len(current[j]) != before[j]:
            raise InternalInvariantError("round modified its own set")
        separators.append(shifted)
    index_result = tuple(tuple(sorted(idx for idx, _ in part)) for part in current)
    protected = []
    for j in range(d + 1):
        protected.append(
            [p for i in range(d + 1) if i != j for _, p in current[i]]
        )
    arrangement, _ = _perturb_hyperplanes_general_position(
        separators, anchor, protected, seed
    )
    subsets = [[p for _, p in part] for part in current]
    outcome = separation_dichotomy(anchor, arrangement, subsets)
    branch = _BRANCH_ALL if outcome.inside else _BRANCH_NONE
    return FewSeparationsResult(index_result, arrangement, branch, tuple(separators))


# ---------------------------------------------------------------------------
# Generic configurations (shrink + separating arrangement)


@dataclass(frozen=True)
class GenericPachConfiguration:
    """Disjoint selected subsets plus a point interior to all their rainbow
    simplices, with the union in general position."""

    point_set: LabeledPointSet
    index_sets: tuple
    point: tuple

    def selected_colors(self):
        return [
            [self.point_set.point(ci, i) for i in idxs]
            for ci, idxs in enumerate(self.index_sets)
        ]

    def validate(self) -> None:
        colors = self.selected_colors()
        union = [p for c in colors for p in c]
        violation = find_general_position_violation(union + [list(self.point)])
        if violation is not None:
            raise GeneralPositionError("configuration union is degenerate", violation)
        enum = RainbowEnumerator(colors)
        _, open_ = enum.containment_masks(self.point)
        if not bool(open_.all()):
            raise InputValidationError("point is not interior to every rainbow simplex")


def shrink_to_generic(
    point_set: LabeledPointSet,
    index_sets,
    anchor,
    seed: int = 0,
    retries: int = 50,
    assume_condition_g: bool = False,
) -> GenericPachConfiguration:
    """Drop at most d points per color so the anchor becomes interior to all
    remaining rainbow simplices, then nudge it into general position.

    Requires condition (G) on the selected union, which bounds the greedy
    boundary family by d.  Colors of size >= d+1 therefore always survive;
    smaller colors are accepted and fail with a size-underflow error only
    when a removal would actually empty them.
    """
    d = point_set.dim
    index_sets = tuple(tuple(sorted(idxs)) for idxs in index_sets)
    if any(len(idxs) == 0 for idxs in index_sets):
        raise PreconditionError("every color needs at least one selected point")
    colors = [
        [point_to_fractions(point_set.point(ci, i)) for i in idxs]
        for ci, idxs in enumerate(index_sets)
    ]
    union = [p for c in colors for p in c]
    if not assume_condition_g:
        check = satisfies_condition_G(union)
        if check.is_false:
            raise PreconditionError(f"selected union violates condition (G): {check.witness}")
        if check.status == "indeterminate":
            raise BudgetExceededError(
                "condition (G) check indeterminate at this scale; "
                "pass assume_condition_g=True if the generator enforced it"
            )
    anchor = point_to_fractions(anchor)
    enum = RainbowEnumerator(colors)
    closed, open_ = enum.containment_masks(anchor)
    if not bool(closed.all()):
        raise PreconditionError("anchor is not in every closed rainbow simplex")
    boundary = np.argwhere(closed & ~open_)
    family = []
    used = [set() for _ in range(d + 1)]
    for idx in boundary:
        idx = tuple(int(x) for x in idx)
        if any(idx[ci] in used[ci] for ci in range(d + 1)):
            continue
        family.append(idx)
        for ci in range(d + 1):
            used[ci].add(idx[ci])
    if len(family) > d:
        raise PreconditionError(
            f"boundary family of size {len(family)} exceeds d; condition (G) violated"
        )
    if family and any(len(c) <= len(family) for c in colors):
        raise PreconditionError(
            "size underflow: removing the boundary family would empty a color "
            "(colors of size >= d+1 always survive)"
        )
    kept_local = [
        [i for i in range(len(colors[ci])) if i not in used[ci]] for ci in range(d + 1)
    ]
    new_index_sets = tuple(
        tuple(index_sets[ci][i] for i in kept_local[ci]) for ci in range(d + 1)
    )
    new_colors = [[colors[ci][i] for i in kept_local[ci]] for ci in range(d + 1)]
    enum2 = RainbowEnumerator(new_colors)
    _, open2 = enum2.containment_masks(anchor)
    if not bool(open2.all()):
        raise InternalInvariantError(
            "anchor not interior to all simplices after removing the boundary family"
        )
    new_union = [p for c in new_colors for p in c]
    spread = max((abs(c) for p in new_union for c in p), default=Fraction(1))
    moved = _nudge_off_hyperplanes(anchor, new_union, seed, retries, (spread + 1) / (1 << 20))
    cfg = GenericPachConfiguration(point_set, new_index_sets, moved)
    cfg.validate()
    return cfg


def certificate_configuration(
    point_set: LabeledPointSet, cert: "PachCertificate"
) -> GenericPachConfiguration:
    """Interpret a pipeline certificate as a generic configuration.

    The pipeline perturbs its anchor into general position with the whole
    input before selecting, so the certified point is interior to every
    selected rainbow simplex; this validates that and wraps the result.
    """
    cfg = GenericPachConfiguration(point_set, cert.index_sets, cert.point)
    cfg.validate()
    return cfg


def separating_arrangement(cfg: GenericPachConfiguration, seed: int = 0) -> HyperplaneArrangement:
    """Arrangement of strictly separating hyperplanes for a generic
    configuration, in general position, with the point inside the central
    simplex and each subset interior to its corner region."""
    colors = cfg.selected_colors()
    d = cfg.point_set.dim
    planes = []
    for i in range(d + 1):
        rest = [p for j, c in enumerate(colors) if j != i for p in c]
        h = strict_separation(cfg.point, rest)
        if h is None:
            raise InputValidationError(
                f"point is inside the hull of the other colors (i = {i}); "
                "not a generic configuration"
            )
        planes.append(h)
    protected = [
        [p for j, c in enumerate(colors) if j != i for p in c] for i in range(d + 1)
    ]
    arrangement, _ = _perturb_hyperplanes_general_position(planes, cfg.point, protected, seed)
    outcome = separation_dichotomy(cfg.point, arrangement, colors)
    if not outcome.inside:
        raise InternalInvariantError(
            "point escaped the central simplex; configuration was not generic"
        )
    return arrangement


def grow_selection(h: RainbowHypergraph, index_sets):
    """Greedily extend selected subsets while the anchor stays in every
    rainbow simplex they span.

    A vertex can join color i exactly when all edges through it and the
    current other colors are present; the result is a maximal complete box
    of the containment hypergraph, reached deterministically by scanning
    colors and vertices in index order.
    """
    part_pos = [
        {orig: pos for pos, orig in enumerate(h.parts[ci])} for ci in range(len(h.parts))
    ]
    current = [sorted(part_pos[ci][i] for i in idxs) for ci, idxs in enumerate(index_sets)]
    if not h.edges[np.ix_(*current)].all():
        raise PreconditionError("anchor is not in every rainbow simplex of the given subsets")
    changed = True
    while changed:
        changed = False
        for ci in range(len(current)):
            members = set(current[ci])
            probe = list(current)
            for v in range(len(h.parts[ci])):
                if v in members:
                    continue
                probe[ci] = [v]
                if bool(h.edges[np.ix_(*probe)].all()):
                    members.add(v)
                    changed = True
            current[ci] = sorted(members)
            probe[ci] = current[ci]
    return tuple(
        tuple(h.parts[ci][pos] for pos in current[ci]) for ci in range(len(current))
    )


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class PachCertificate:
    input_sha256: str
    point: tuple
    index_sets: tuple
    arrangement: HyperplaneArrangement
    fractions: tuple
    verified: str  # "exhaustive" | "arrangement"
    seed: int
    stages: tuple

    def to_json_dict(self) -> dict:
        from .io import arrangement_to_json_dict, scalar_to_json

        return {
            "input_sha256": self.input_sha256,
            "p": [scalar_to_json(c) for c in self.point],
            "Y": [list(idxs) for idxs in self.index_sets],
            "arrangement": arrangement_to_json_dict(self.arrangement),
            "fractions": [scalar_to_json(f) for f in self.fractions],
            "verified": self.verified,
            "seed": self.seed,
            "stages": list(self.stages),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PachCertificate":
        from .io import arrangement_from_json_dict, scalar_from_json

        return cls(
            input_sha256=data["input_sha256"],
            point=tuple(scalar_from_json(c) for c in data["p"]),
            index_sets=tuple(tuple(int(i) for i in idxs) for idxs in data["Y"]),
            arrangement=arrangement_from_json_dict(data["arrangement"]),
            fractions=tuple(scalar_from_json(f) for f in data["fractions"]),
            verified=data["verified"],
            seed=int(data["seed"]),
            stages=tuple(data["stages"]),
        )


@dataclass(frozen=True)
class VerificationReport:
    mode: str
    ok: bool
    fraction: Fraction
    witness: tuple | None = None
    detail: str = ""
    warnings: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "ok": self.ok,
            "fraction": f"{self.fraction.numerator}/{self.fraction.denominator}",
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
            "warnings": list(self.warnings),
        }


def verify_certificate(
    point_set: LabeledPointSet, cert: PachCertificate, mode: str = "exhaustive"
) -> VerificationReport:
    """Independent certificate check.

    exhaustive: exact closed containment of the certified point in every
    rainbow simplex of the selected subsets (fraction must be 1).
    arrangement: re-checks the separation preconditions and the inside
    branch of the dichotomy without enumerating simplices.
    """
    if mode not in ("exhaustive", "arrangement"):
        raise ValueError(f"unknown verification mode {mode!r}")
    sizes = point_set.sizes()
    for ci, idxs in enumerate(cert.index_sets):
        for i in idxs:
            if not 0 <= i < sizes[ci]:
                raise InputValidationError(f"certificate index {i} out of range for color {ci}")
    warnings = []
    if any(len(idxs) == 0 for idxs in cert.index_sets):
        warnings.append("some selected subsets are empty; containment is vacuous")
        return VerificationReport(mode, True, Fraction(1), None, "vacuous", tuple(warnings))
    colors = [
        [point_set.point(ci, i) for i in idxs] for ci, idxs in enumerate(cert.index_sets)
    ]
    if mode == "exhaustive":
        enum = RainbowEnumerator(colors)
        closed, _ = enum.containment_masks(cert.point)
        count = int(closed.sum())
        fraction = Fraction(count, enum.total)
        witness = None
        if count != enum.total:
            bad = np.argwhere(~closed)[0]
            witness = tuple(
                int(cert.index_sets[ci][int(bad[ci])]) for ci in range(len(colors))
            )
        return VerificationReport(
            mode,
            fraction == 1,
            fraction,
            witness,
            f"{count} of {enum.total} rainbow simplices contain the point",
            tuple(warnings),
        )
    arr = cert.arrangement
    point = cert.point
    try:
        outcome = separation_dichotomy(point, arr, colors)
    except PreconditionError as exc:
        return VerificationReport(mode, False, Fraction(0), None, str(exc), tuple(warnings))
    if not outcome.inside:
        return VerificationReport(
            mode, False, Fraction(0), None, "point is outside the central simplex", tuple(warnings)
        )
    return VerificationReport(
        mode, True, Fraction(1), None, "arrangement certifies containment", tuple(warnings)
    )


# ---------------------------------------------------------------------------
# Pipeline


@dataclass(frozen=True)
class PipelineParams:
    seed: int = 0
    epsilon: Fraction | None = None
    beta: Fraction | None = None
    witness_budget: int = 2000
    deep: DeepPointStrategy = field(default_factory=DeepPointStrategy)
    max_restrict_loops: int = 64
    verify: str = "exhaustive"  # "exhaustive" | "arrangement"
    deep_budget: int = 5_000_000
    grow: bool = True  # extend the selection to a maximal complete box


def default_epsilon(d: int) -> Fraction:
    """Pipeline default for the regularity parameter.

    1/2^d for d >= 2; the d = 1 case uses 1/4 because the regularity lemma
    requires epsilon strictly below 1/2 (the halving law still guarantees
    kept subsets of fraction 1/2 >= epsilon).
    """
    if d == 1:
        return Fraction(1, 4)
    return Fraction(1, 2**d)


def run_pipeline(
    point_set: LabeledPointSet, params: PipelineParams | None = None, input_sha256: str = ""
) -> PachCertificate:
    """Full selection pipeline producing a verified PachCertificate.

    deep point -> perturb anchor -> rainbow hypergraph -> weak regularity ->
    few separations.  A none-contain outcome yields a concrete zero-edge
    witness, which is fed back into the regularity stage; each such loop
    strictly increases the part density, so the process terminates with an
    all-contain certificate.
    """
    params = params or PipelineParams()
    d = point_set.dim
    sizes = point_set.sizes()
    if len(set(sizes)) != 1:
        raise PreconditionError(
            "colors must have equal sizes; replicate/discretize unequal inputs first"
        )
    stages = []
    deep = deep_rainbow_point(point_set, params.deep, seed=params.seed, budget=params.deep_budget)
    stages.append(
        {
            "stage": "deep-point",
            "candidate": deep.candidate_label,
            "depth": deep.depth,
            "open_depth": deep.open_depth,
            "total": deep.total,
            "candidates": deep.candidates_evaluated,
        }
    )
    anchor = perturb_anchor(deep.point, point_set, seed=params.seed + 1)
    h = rainbow_hypergraph(point_set, anchor)
    density = h.density
    beta = to_fraction(params.beta) if params.beta is not None else density
    if density <= 0:
        raise PreconditionError("anchor is contained in no rainbow simplex")
    stages.append(
        {
            "stage": "anchor",
            "moved": list(anchor) != list(deep.point),
            "density": f"{density.numerator}/{density.denominator}",
        }
    )
    eps = to_fraction(params.epsilon) if params.epsilon is not None else default_epsilon(d)
    reg_params = RegularityParams(
        epsilon=eps,
        beta=beta,
        witness_budget=params.witness_budget,
        seed=params.seed + 2,
    )
    reg = weak_regularity(h, reg_params)
    few = None
    loops = 0
    while True:
        stages.append(
            {
                "stage": "regularity",
                "s": reg.size,
                "density": f"{reg.density.numerator}/{reg.density.denominator}",
                "witness_report": reg.report(),
                "restrictions": len(reg.steps),
            }
        )
        few = few_separations(point_set, reg.parts, anchor, seed=params.seed + 3 + loops)
        min_kept = min(len(y) for y in few.index_sets)
        threshold = eps * reg.size
        if any(len(y) < threshold for y in few.index_sets):
            raise InternalInvariantError("few-separations kept less than the eps fraction")
        stages.append(
            {
                "stage": "few-separations",
                "branch": few.branch,
                "sizes": [len(y) for y in few.index_sets],
                "min_kept": min_kept,
            }
        )
        if few.branch == _BRANCH_ALL:
            break
        if reg.status == "exhaustive-clean":
            raise InternalInvariantError(
                "none-contain outcome despite an exhaustively clean regular tuple"
            )
        loops += 1
        if loops > params.max_restrict_loops:
            raise BudgetExceededError(
                "regularity-witness failure: restrict loop budget exhausted"
            )
        # The kept subsets span no edge; they are a concrete witness.  Feed
        # them back (in local coordinates of the hypergraph parts).
        part_pos = [
            {orig: pos for pos, orig in enumerate(h.parts[ci])} for ci in range(d + 1)
        ]
        forced = tuple(
            tuple(part_pos[ci][i] for i in few.index_sets[ci]) for ci in range(d + 1)
        )
        reg = weak_regularity(
            h, reg_params, initial_parts=reg.local_parts, forced_witness=forced
        )
    index_sets = few.index_sets
    arrangement = few.arrangement
    if params.grow:
        grown = grow_selection(h, index_sets)
        if grown != index_sets:
            # the arrangement certifies only the original subsets; rebuild it
            # around the enlarged configuration
            cfg = GenericPachConfiguration(point_set, grown, anchor)
            cfg.validate()
            arrangement = separating_arrangement(cfg, seed=params.seed + 4)
            stages.append(
                {
                    "stage": "grow",
                    "sizes_before": [len(y) for y in index_sets],
                    "sizes_after": [len(y) for y in grown],
                }
            )
            index_sets = grown
    fractions = tuple(
        Fraction(len(index_sets[ci]), sizes[ci]) for ci in range(d + 1)
    )
    cert = PachCertificate(
        input_sha256=input_sha256,
        point=anchor,
        index_sets=index_sets,
        arrangement=arrangement,
        fractions=fractions,
        verified="arrangement",
        seed=params.seed,
        stages=tuple(stages),
    )
    if params.verify == "exhaustive":
        report = verify_certificate(point_set, cert, mode="exhaustive")
        if not report.ok:
            raise InternalInvariantError(
                f"exhaustive verification failed: {report.detail} (witness {report.witness})"
            )
        cert = PachCertificate(
            input_sha256=cert.input_sha256,
            point=cert.point,
            index_sets=cert.index_sets,
            arrangement=cert.arrangement,
            fractions=cert.fractions,
            verified="exhaustive",
            seed=cert.seed,
            stages=cert.stages + ({"stage": "verify", "mode": "exhaustive", "fraction": "1/1"},),
        )
    return cert
