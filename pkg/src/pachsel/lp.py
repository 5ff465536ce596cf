"""Exact rational linear programming used by the combinatorial predicates.

Two entry points back the geometric operations:

* ``convex_combination`` -- Phase-I feasibility of expressing a point as a
  convex combination of given points (closed-hull membership).
* ``max_margin_separation`` -- maximum-margin strict separation of a point
  from a finite point set; infeasibility is exactly closed-hull membership
  (Farkas duality, exercised by the test suite).

The solver is a dense two-phase tableau simplex over Fractions.  Pivoting
uses the largest-coefficient rule for speed and falls back to Bland's rule
after a fixed number of iterations, which guarantees termination.  Problem
sizes here are desk scale (tens of rows), so no sparsity is attempted.
"""

from __future__ import annotations

from fractions import Fraction

from .rational import to_fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _pivot(tableau, basis, row, col):
    pivot = tableau[row][col]
    tableau[row] = [x / pivot for x in tableau[row]]
    prow = tableau[row]
    for i, r in enumerate(tableau):
        if i != row and r[col] != 0:
            f = r[col]
            tableau[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run_simplex(tableau, basis):
    """Minimize the objective encoded in the last tableau row.

    Returns 'optimal' or 'unbounded'.  The caller must provide a feasible
    starting basis (rhs column nonnegative, basis columns unit).
    """
    nrows = len(tableau) - 1
    ncols = len(tableau[0]) - 1
    dantzig_limit = 4 * (nrows + ncols) + 64
    iteration = 0
    while True:
        obj = tableau[nrows]
        enter = -1
        if iteration < dantzig_limit:
            best = _ZERO
            for j in range(ncols):
                if obj[j] < best:
                    best = obj[j]
                    enter = j
        else:
            for j in range(ncols):  # Bland: first improving column
                if obj[j] < 0:
                    enter = j
                    break
        if enter < 0:
            return "optimal"
        leave = -1
        best_ratio = None
        for i in range(nrows):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(tableau, basis, leave, enter)
        iteration += 1


def convex_combination(point, points):
    """Exact coefficients expressing ``point`` as a convex combination.

    Returns a list of Fractions (one per input point, nonnegative, summing
    to one) when ``point`` lies in the closed convex hull, else None.
    """
    p = [to_fraction(c) for c in point]
    pts = [[to_fraction(c) for c in q] for q in points]
    d = len(p)
    n = len(pts)
    if n == 0:
        return None
    # Equality system: sum_i lam_i * s_i = p ; sum_i lam_i = 1 ; lam >= 0.
    rows = []
    rhs = []
    for k in range(d):
        rows.append([pts[i][k] for i in range(n)])
        rhs.append(p[k])
    rows.append([_ONE] * n)
    rhs.append(_ONE)
    # Flip rows to make rhs nonnegative, then add one artificial per row.
    m = len(rows)
    tableau = []
    for i in range(m):
        row = rows[i][:]
        b = rhs[i]
        if b < 0:
            row = [-x for x in row]
            b = -b
        art = [_ZERO] * m
        art[i] = _ONE
        tableau.append(row + art + [b])
    # Phase-I objective: minimize the sum of artificials.
    obj = [_ZERO] * n + [_ONE] * m + [_ZERO]
    for i in range(m):
        obj = [a - b for a, b in zip(obj, tableau[i])]
    tableau.append(obj)
    basis = [n + i for i in range(m)]
    status = _run_simplex(tableau, basis)
    if status != "optimal":  # Phase-I objective is bounded below by zero
        raise AssertionError("phase-I simplex reported unbounded")
    objective = -tableau[m][-1]
    if objective != 0:
        return None
    lam = [_ZERO] * n
    for i, var in enumerate(basis):
        if var < n:
            lam[var] = tableau[i][-1]
    return lam


def max_margin_separation(point, points):
    """Maximum-margin hyperplane strictly separating ``point`` from ``points``.

    Solves  max t  s.t.  a.s - b >= t for all s,  b - a.p >= t,
    -1 <= a_j <= 1, via the split a = u - v, b = b1 - b2.  The optimum t* is
    positive exactly when ``point`` is outside the closed hull of ``points``;
    in that case returns (normal a, offset b, margin t*), else None.
    """
    p = [to_fraction(c) for c in point]
    pts = [[to_fraction(c) for c in q] for q in points]
    d = len(p)
    n = len(pts)
    if n == 0:
        raise ValueError("need at least one point to separate from")
    nvars = 2 * d + 3  # u_1..u_d, v_1..v_d, b1, b2, t
    iu, iv, ib1, ib2, it_ = 0, d, 2 * d, 2 * d + 1, 2 * d + 2
    rows = []
    for s in pts:  # -(a.s) + b + t <= 0
        row = [_ZERO] * nvars
        for j in range(d):
            row[iu + j] = -s[j]
            row[iv + j] = s[j]
        row[ib1] = _ONE
        row[ib2] = -_ONE
        row[it_] = _ONE
        rows.append((row, _ZERO))
    row = [_ZERO] * nvars  # a.p - b + t <= 0
    for j in range(d):
        row[iu + j] = p[j]
        row[iv + j] = -p[j]
    row[ib1] = -_ONE
    row[ib2] = _ONE
    row[it_] = _ONE
    rows.append((row, _ZERO))
    for j in range(d):  # u_j + v_j <= 1 caps the max-norm of the normal
        row = [_ZERO] * nvars
        row[iu + j] = _ONE
        row[iv + j] = _ONE
        rows.append((row, _ONE))
    m = len(rows)
    tableau = []
    for i, (row, b) in enumerate(rows):
        slack = [_ZERO] * m
        slack[i] = _ONE
        tableau.append(row + slack + [b])
    obj = [_ZERO] * (nvars + m + 1)
    obj[it_] = -_ONE  # minimize -t
    tableau.append(obj)
    basis = [nvars + i for i in range(m)]
    status = _run_simplex(tableau, basis)
    if status != "optimal":
        raise AssertionError("max-margin LP reported unbounded")
    values = [_ZERO] * nvars
    for i, var in enumerate(basis):
        if var < nvars:
            values[var] = tableau[i][-1]
    margin = values[it_]
    if margin <= 0:
        return None
    normal = tuple(values[iu + j] - values[iv + j] for j in range(d))
    offset = values[ib1] - values[ib2]
    return normal, offset, margin
