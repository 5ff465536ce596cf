"""Solid angles, simplicial/polar cones, restricted cone volumes, and the
bound chain for the minimum solid angle of a simplex.

Everything here is float64 + Monte Carlo by design: the package's
combinatorial claims are exact (geometry.py), while volume and angle
statements are statistical audits with reported standard errors.

Solid angles are estimated direction-wise: a uniform random direction lies
in the cone of the simplex at a vertex with probability equal to the
normalized solid angle, so no epsilon-ball is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, gamma, log, pi, sqrt

import numpy as np
from scipy.special import betainc

from .errors import PreconditionError

_DEGENERACY_TOL = 1e-12
_CHUNK = 1 << 16


def _chunk_rngs(seed, samples):
    """Deterministic per-chunk generators derived from one master seed.

    Chunking keeps memory constant and gives a seeded stream that could be
    consumed in parallel without changing the results.
    """
    offset = 0
    chunk_index = 0
    while offset < samples:
        m = min(_CHUNK, samples - offset)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,)))
        yield rng, m
        offset += m
        chunk_index += 1


def unit_ball_volume(d: int) -> float:
    """Volume of the unit d-ball, pi^{d/2} / Gamma(d/2 + 1)."""
    return pi ** (d / 2) / gamma(d / 2 + 1)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def as_dict(self):
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Simplex:
    """A d-simplex given by d+1 vertices (rows)."""

    vertices: np.ndarray

    @classmethod
    def create(cls, vertices) -> "Simplex":
        arr = np.array([[float(c) for c in v] for v in vertices], dtype=float)
        arr.setflags(write=False)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] + 1:
            raise PreconditionError("a d-simplex needs d+1 vertices in R^d")
        return cls(arr)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def edge_matrix(self, vertex: int) -> np.ndarray:
        """Rows are the edges from the given vertex to the others."""
        v = self.vertices[vertex]
        others = np.delete(self.vertices, vertex, axis=0)
        return others - v

    def is_degenerate(self) -> bool:
        m = self.edge_matrix(0)
        scale = np.prod(np.linalg.norm(m, axis=1))
        if scale == 0:
            return True
        return abs(np.linalg.det(m)) <= _DEGENERACY_TOL * scale


@dataclass(frozen=True)
class SimplicialCone:
    """Cone spanned by d unit generators (rows) from an apex."""

    apex: np.ndarray
    generators: np.ndarray

    @classmethod
    def create(cls, apex, generators) -> "SimplicialCone":
        apex_arr = np.array([float(c) for c in apex], dtype=float)
        gens = np.array([[float(c) for c in g] for g in generators], dtype=float)
        if gens.shape != (apex_arr.shape[0], apex_arr.shape[0]):
            raise PreconditionError("need d generators in R^d")
        norms = np.linalg.norm(gens, axis=1)
        if np.any(norms == 0):
            raise PreconditionError("zero generator")
        gens = gens / norms[:, None]
        apex_arr.setflags(write=False)
        gens.setflags(write=False)
        return cls(apex_arr, gens)

    @property
    def dim(self) -> int:
        return self.apex.shape[0]

    def is_degenerate(self) -> bool:
        return abs(np.linalg.det(self.generators)) <= _DEGENERACY_TOL

    def is_acute(self) -> bool:
        """Pairwise nonnegative generator dot products.

        The deviation bound only needs nonnegativity (it survives taking
        limits of strictly acute cones, e.g. the orthant), so that is what
        we require.
        """
        g = self.generators @ self.generators.T
        off = g[~np.eye(self.dim, dtype=bool)]
        return bool(np.all(off >= 0))


def solid_angle_mc(simplex: Simplex, vertex: int, samples: int, seed: int) -> McEstimate:
    """Normalized solid angle of a simplex at one vertex.

    Counts uniform random directions falling in the cone spanned at the
    vertex; std_error is the binomial sqrt(p(1-p)/n).
    """
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    if simplex.is_degenerate():
        raise PreconditionError("degenerate simplex has no solid angle")
    edges = simplex.edge_matrix(vertex)
    inv = np.linalg.inv(edges.T)  # direction u is inside iff inv @ u >= 0
    d = simplex.dim
    hits = 0
    for rng, m in _chunk_rngs(seed, samples):
        u = rng.standard_normal((m, d))
        coeffs = u @ inv.T
        hits += int(np.all(coeffs >= 0, axis=1).sum())
    p = hits / samples
    return McEstimate(p, sqrt(p * (1 - p) / samples), samples, seed)


@dataclass(frozen=True)
class MsaEstimate:
    value: float
    vertex: int
    std_error: float
    per_vertex: tuple

    def as_dict(self):
        return {
            "value": self.value,
            "vertex": self.vertex,
            "std_error": self.std_error,
            "per_vertex": [e.as_dict() for e in self.per_vertex],
        }


def msa_mc(simplex: Simplex, samples_per_vertex: int, seed: int) -> MsaEstimate:
    """Minimum solid angle over the vertices; ties go to the lowest index."""
    estimates = []
    for i in range(simplex.dim + 1):
        estimates.append(solid_angle_mc(simplex, i, samples_per_vertex, seed + i))
    best = min(range(len(estimates)), key=lambda i: (estimates[i].mean, i))
    e = estimates[best]
    return MsaEstimate(e.mean, best, e.std_error, tuple(estimates))


def msa_upper_bound(d: int) -> float:
    """Explicit upper bound for the minimum solid angle of a d-simplex.

    The fully explicit end of the round-cone/cylinder chain,
    (2 ln(d+1)/d)^{(d-1)/2} * d/(2 pi), clamped by the trivial bound 1/2.
    Meaningful as an msa bound for d >= 2.
    """
    if d < 1:
        raise PreconditionError("dimension must be >= 1")
    raw = (2.0 * log(d + 1) / d) ** ((d - 1) / 2.0) * d / (2.0 * pi)
    return min(raw, 0.5)


def msa_upper_bound_is_clamped(d: int) -> bool:
    raw = (2.0 * log(d + 1) / d) ** ((d - 1) / 2.0) * d / (2.0 * pi)
    return raw > 0.5


def rho_d_asymptotic(d: int) -> float:
    """Leading term of the solid angle of the regular d-simplex,
    sqrt(d+1)/(sqrt(2) e 2^d) * (2e/(pi d))^{d/2} (the 1+O(1/d) factor dropped)."""
    if d < 1:
        raise PreconditionError("dimension must be >= 1")
    return sqrt(d + 1) / (sqrt(2.0) * exp(1.0) * 2.0**d) * (2.0 * exp(1.0) / (pi * d)) ** (d / 2.0)


@dataclass(frozen=True)
class BoundTable:
    """One row of the bound table for a fixed dimension.

    lower_bound_exponent stores the integer m = d^2 + 3d of the selection
    lower bound 2^(-2^m); the bound itself underflows float64 from d = 3 on.
    """

    dim: int
    msa_bound: float  # u(d)
    corner_fraction_bound: float  # g(d) = 2^d u(d)
    lower_bound_exponent: int
    rho_asymptotic: float
    clamped: bool

    def as_dict(self):
        return {
            "dim": self.dim,
            "u": self.msa_bound,
            "g": self.corner_fraction_bound,
            "lower_bound_exponent": self.lower_bound_exponent,
            "rho_d_asymptotic": self.rho_asymptotic,
            "clamped": self.clamped,
        }


def bound_table(d: int) -> BoundTable:
    """All bound-table quantities for one dimension."""
    u = msa_upper_bound(d)
    return BoundTable(
        dim=d,
        msa_bound=u,
        corner_fraction_bound=(2.0**d) * u,
        lower_bound_exponent=d * d + 3 * d,
        rho_asymptotic=rho_d_asymptotic(d),
        clamped=msa_upper_bound_is_clamped(d),
    )


def polar_cone(cone: SimplicialCone) -> SimplicialCone:
    """Polar (normal) cone of a nondegenerate simplicial cone at the origin.

    Generators are the negated dual basis of the cone's generators; applying
    the operation twice returns the original cone up to generator order.
    """
    if np.any(cone.apex != 0):
        raise PreconditionError("polar cone requires the apex at the origin")
    if cone.is_degenerate():
        raise PreconditionError("generators are linearly dependent")
    dual = np.linalg.inv(cone.generators)  # columns are dual to the generator rows
    gens = -dual.T
    return SimplicialCone.create(cone.apex, gens)


def restricted_volume_mc(cone: SimplicialCone, samples: int, seed: int) -> McEstimate:
    """Volume of cone intersected with the unit ball, beta_d * hit fraction."""
    if np.any(cone.apex != 0):
        raise PreconditionError("restricted volume requires the apex at the origin")
    if cone.is_degenerate():
        raise PreconditionError("generators are linearly dependent")
    d = cone.dim
    beta = unit_ball_volume(d)
    inv = np.linalg.inv(cone.generators.T)
    hits = 0
    for rng, m in _chunk_rngs(seed, samples):
        u = rng.standard_normal((m, d))
        norms = np.linalg.norm(u, axis=1)
        norms[norms == 0] = 1.0
        radii = rng.random(m) ** (1.0 / d)
        x = u * (radii / norms)[:, None]
        coeffs = x @ inv.T
        hits += int(np.all(coeffs >= 0, axis=1).sum())
    p = hits / samples
    return McEstimate(beta * p, beta * sqrt(p * (1 - p) / samples), samples, seed)


@dataclass(frozen=True)
class FanCoverReport:
    coverage: float
    max_fraction: float
    argmax: int
    fractions: tuple
    samples: int
    seed: int

    def as_dict(self):
        return {
            "coverage": self.coverage,
            "max_fraction": self.max_fraction,
            "argmax": self.argmax,
            "fractions": list(self.fractions),
            "samples": self.samples,
            "seed": self.seed,
        }


def normal_fan_cover_check(simplex: Simplex, samples: int, seed: int) -> FanCoverReport:
    """Classify random directions into the polar cones of a simplex's vertices.

    A direction x goes to argmax_i x.v_i (lowest index on ties), which is
    exactly membership in the polar cone at vertex i, so every direction is
    classified and the fractions sum to one.
    """
    if simplex.is_degenerate():
        raise PreconditionError("degenerate simplex")
    d = simplex.dim
    counts = np.zeros(d + 1, dtype=np.int64)
    for rng, m in _chunk_rngs(seed, samples):
        u = rng.standard_normal((m, d))
        scores = u @ simplex.vertices.T
        counts += np.bincount(np.argmax(scores, axis=1), minlength=d + 1)
    fractions = counts / samples
    argmax = int(np.argmax(fractions))
    return FanCoverReport(
        coverage=float(counts.sum()) / samples,
        max_fraction=float(fractions[argmax]),
        argmax=argmax,
        fractions=tuple(float(f) for f in fractions),
        samples=samples,
        seed=seed,
    )


def spherical_cap_fraction(d: int, gamma_dist: float) -> float:
    """Normalized solid angle of the round cone cut at distance gamma_dist.

    Fraction of the unit sphere with x_1 >= gamma_dist, equal to the volume
    fraction of (cone ∩ ball); incomplete-beta closed form.
    """
    if d < 2:
        raise PreconditionError("round cones need d >= 2")
    if not 0.0 <= gamma_dist <= 1.0:
        raise PreconditionError("gamma must lie in [0, 1]")
    x = 1.0 - gamma_dist * gamma_dist
    return 0.5 * float(betainc((d - 1) / 2.0, 0.5, x))


def round_cone_cut_distance(d: int, volume: float, tol: float = 1e-10) -> float:
    """Distance from the origin of the hyperplane through the boundary sphere
    of the round cone with the given restricted volume; bisection on the
    exact cap-volume equation to the given tolerance."""
    beta = unit_ball_volume(d)
    if not 0.0 < volume < beta / 2.0:
        raise PreconditionError("volume must lie in (0, beta_d / 2)")
    target = volume / beta
    lo, hi = 0.0, 1.0  # fraction decreases from 1/2 at gamma=0 to 0 at gamma=1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if spherical_cap_fraction(d, mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def round_cone_polar_volume_bound(d: int, volume: float) -> float:
    """Cylinder bound gamma^{d-1} beta_{d-1} on the restricted volume of the
    polar of the round cone whose own restricted volume is ``volume``."""
    gamma_dist = round_cone_cut_distance(d, volume)
    return gamma_dist ** (d - 1) * unit_ball_volume(d - 1)


def round_cone_restricted_volume_mc(d: int, axis_cos: float, samples: int, seed: int) -> McEstimate:
    """MC restricted volume of the round cone {x : x_1 >= axis_cos * |x|}."""
    beta = unit_ball_volume(d)
    hits = 0
    for rng, m in _chunk_rngs(seed, samples):
        u = rng.standard_normal((m, d))
        norms = np.linalg.norm(u, axis=1)
        norms[norms == 0] = 1.0
        hits += int((u[:, 0] >= axis_cos * norms).sum())
    p = hits / samples
    return McEstimate(beta * p, beta * sqrt(p * (1 - p) / samples), samples, seed)


def regular_simplex(d: int) -> Simplex:
    """The regular d-simplex with unit circumradius, centered at the origin."""
    corners = np.eye(d + 1) - np.full((d + 1, d + 1), 1.0 / (d + 1))
    # rows live in the hyperplane orthogonal to (1,...,1); project isometrically
    _, _, vt = np.linalg.svd(corners)
    basis = vt[:d]
    verts = corners @ basis.T
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    return Simplex.create(verts)


@dataclass(frozen=True)
class MsaSearchReport:
    """Outcome of an empirical search for simplices whose minimum solid angle
    exceeds the regular simplex's vertex angle.

    Candidates are reported with 3-sigma separation on both estimates; the
    search claims nothing beyond listing them for inspection.
    """

    dim: int
    regular_angle: McEstimate
    trials: int
    candidates: tuple
    best_value: float
    seed: int

    def as_dict(self):
        return {
            "dim": self.dim,
            "regular_angle": self.regular_angle.as_dict(),
            "trials": self.trials,
            "candidates": [
                {"trial": t, "msa": e.as_dict(), "vertices": v} for t, e, v in self.candidates
            ],
            "best_value": self.best_value,
            "seed": self.seed,
        }


def msa_regular_comparison_search(
    d: int, trials: int, samples: int, seed: int
) -> MsaSearchReport:
    """Randomly search for a simplex with minimum solid angle above the
    regular simplex's.  No candidate is expected in low dimensions (the
    comparison is known to favor the regular simplex for d <= 4); any hit is
    a candidate counterexample only, to be re-examined at higher precision.
    """
    reg = regular_simplex(d)
    rho_est = solid_angle_mc(reg, 0, samples, seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1 << 20,)))
    candidates = []
    best = 0.0
    done = 0
    while done < trials:
        simplex = Simplex.create(rng.standard_normal((d + 1, d)))
        if simplex.is_degenerate():
            continue
        est = msa_mc(simplex, samples, seed + 1 + done)
        best = max(best, est.value)
        if est.value - 3 * est.std_error > rho_est.mean + 3 * rho_est.std_error:
            candidates.append(
                (done, est, [[float(c) for c in v] for v in simplex.vertices])
            )
        done += 1
    return MsaSearchReport(d, rho_est, trials, tuple(candidates), best, seed)


@dataclass(frozen=True)
class DeviationReport:
    delta: float
    bound: float
    observed_max: float
    samples: int
    seed: int

    def as_dict(self):
        return {
            "delta": self.delta,
            "bound": self.bound,
            "observed_max": self.observed_max,
            "samples": self.samples,
            "seed": self.seed,
        }


def acute_cone_admissible_deviation(
    cone: SimplicialCone, perturbed: SimplicialCone, samples: int, seed: int
) -> DeviationReport:
    """Stability of admissible vectors under generator perturbation.

    delta is the max generator deviation between the index-matched cones; an
    admissible vector of the perturbed cone (convex weights, normalized) maps
    to the admissible vector of the base cone with the same weights, and the
    worst-case distance is bounded by 2 d^2 delta.  Reports the empirical max
    over sampled weight vectors.
    """
    if cone.dim != perturbed.dim:
        raise PreconditionError("cones must share the ambient dimension")
    if not np.allclose(cone.apex, perturbed.apex):
        raise PreconditionError("cones must share the apex")
    if not cone.is_acute() or not perturbed.is_acute():
        raise PreconditionError("both cones must be acute")
    if cone.is_degenerate() or perturbed.is_degenerate():
        raise PreconditionError("cones must be simplicial (independent generators)")
    d = cone.dim
    delta = float(np.max(np.linalg.norm(cone.generators - perturbed.generators, axis=1)))
    bound = 2.0 * d * d * delta
    observed = 0.0
    for rng, m in _chunk_rngs(seed, samples):
        lam = rng.dirichlet(np.ones(d), size=m)
        x = lam @ cone.generators
        xp = lam @ perturbed.generators
        v = x / np.linalg.norm(x, axis=1)[:, None]
        vp = xp / np.linalg.norm(xp, axis=1)[:, None]
        dev = np.linalg.norm(v - vp, axis=1)
        observed = max(observed, float(dev.max()))
    return DeviationReport(delta, bound, observed, samples, seed)
