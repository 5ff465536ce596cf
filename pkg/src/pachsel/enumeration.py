"""Exact enumeration engine for rainbow simplices.

Counting which rainbow simplices contain a candidate point is the pipeline's
hot loop.  Rather than testing each simplex independently (d+1 orientation
determinants per simplex, n^{d+1} simplices), we cache orientation signs of
the d+1-point tuples that actually occur:

* one full-orientation sign per rainbow tuple (candidate independent), and
* one sign per (candidate, d-tuple with one color omitted) -- only n^d of
  those per omitted color.

Containment of the candidate in a given simplex is then a pure sign
combination, vectorized with numpy over the whole n^{d+1} tensor.  All signs
come from integer determinants of common-denominator-scaled coordinates, so
the counts are exact.
"""

from __future__ import annotations

from math import gcd, prod

import numpy as np

from . import lp
from .errors import PreconditionError
from .rational import common_denominator, det_int, point_to_fractions


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _sign_tensor_generic(tuples_of_colors, out, prefix_point=None):
    """Fill ``out`` with orientation signs over the product of the color lists.

    With ``prefix_point`` given, each tuple is (prefix_point, x_1, ..., x_d).
    """
    sizes = out.shape
    flat = out.reshape(-1)
    pos = 0
    for idx in np.ndindex(*sizes):
        pts = [tuples_of_colors[k][idx[k]] for k in range(len(sizes))]
        if prefix_point is not None:
            pts = [prefix_point] + pts
        base = pts[0]
        rows = [tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]
        flat[pos] = _sign(det_int(rows))
        pos += 1


def _sign_tensor_1d(colors, out, prefix_point=None):
    if prefix_point is None:
        a_list, b_list = colors
        for i, (xa,) in enumerate(a_list):
            row = out[i]
            for j, (xb,) in enumerate(b_list):
                row[j] = _sign(xb - xa)
    else:
        (xp,) = prefix_point
        (a_list,) = colors
        for i, (xa,) in enumerate(a_list):
            out[i] = _sign(xa - xp)


def _sign_tensor_2d(colors, out, prefix_point=None):
    if prefix_point is None:
        a_list, b_list, c_list = colors
        for i, (xa, ya) in enumerate(a_list):
            for j, (xb, yb) in enumerate(b_list):
                dx, dy = xb - xa, yb - ya
                row = out[i, j]
                for k, (xc, yc) in enumerate(c_list):
                    row[k] = _sign(dx * (yc - ya) - dy * (xc - xa))
    else:
        xp, yp = prefix_point
        a_list, b_list = colors
        for i, (xa, ya) in enumerate(a_list):
            dx, dy = xa - xp, ya - yp
            row = out[i]
            for j, (xb, yb) in enumerate(b_list):
                row[j] = _sign(dx * (yb - yp) - dy * (xb - xp))


def _fill_sign_tensor(colors, out, prefix_point=None):
    ambient = len(colors[0][0]) if colors else 0
    if ambient == 1 and prefix_point is None and len(colors) == 2:
        _sign_tensor_1d(colors, out)
    elif ambient == 1 and prefix_point is not None and len(colors) == 1:
        _sign_tensor_1d(colors, out, prefix_point)
    elif ambient == 2 and prefix_point is None and len(colors) == 3:
        _sign_tensor_2d(colors, out)
    elif ambient == 2 and prefix_point is not None and len(colors) == 2:
        _sign_tensor_2d(colors, out, prefix_point)
    else:
        _sign_tensor_generic(colors, out, prefix_point)


def combine_containment(full, faces):
    """Closed/open containment masks from cached orientation signs.

    ``full[idx]`` is the orientation of the rainbow tuple, ``faces[i]`` the
    orientations with the candidate replacing the color-i vertex (candidate
    written first; the slot move contributes parity (-1)^i).
    """
    closed = full != 0
    open_ = full != 0
    for i, face in enumerate(faces):
        t = np.expand_dims(face if i % 2 == 0 else -face, axis=i)
        agreement = t * full
        closed &= agreement >= 0
        open_ &= agreement == 1
    return closed, open_


class RainbowEnumerator:
    """Caches per-instance sign data for repeated containment queries."""

    def __init__(self, colors):
        if not colors or any(len(c) == 0 for c in colors):
            raise PreconditionError("every color must be nonempty")
        self.dim = len(colors) - 1
        self.colors = [tuple(point_to_fractions(p) for p in c) for c in colors]
        for c in self.colors:
            for p in c:
                if len(p) != self.dim:
                    raise PreconditionError("color points must have dimension d")
        self.sizes = tuple(len(c) for c in self.colors)
        self.total = prod(self.sizes)
        self._den = common_denominator(p for c in self.colors for p in c)
        self._base_int_colors = [
            tuple(tuple(int(x * self._den) for x in p) for p in c) for c in self.colors
        ]
        self.full_signs = np.empty(self.sizes, dtype=np.int8)
        _fill_sign_tensor(self._base_int_colors, self.full_signs)
        self._degenerate = [tuple(int(x) for x in idx) for idx in np.argwhere(self.full_signs == 0)]
        self._scaled_cache = {1: self._base_int_colors}

    @property
    def degenerate_count(self) -> int:
        return len(self._degenerate)

    def _colors_at_scale(self, mult: int):
        cached = self._scaled_cache.get(mult)
        if cached is None:
            cached = [
                tuple(tuple(x * mult for x in p) for p in c) for c in self._base_int_colors
            ]
            if len(self._scaled_cache) < 64:
                self._scaled_cache[mult] = cached
        return cached

    def containment_masks(self, point):
        """Boolean (closed, open) tensors of shape ``sizes`` for one candidate."""
        p = point_to_fractions(point)
        if len(p) != self.dim:
            raise PreconditionError("candidate dimension mismatch")
        pden = 1
        for c in p:
            pden = pden // gcd(pden, c.denominator) * c.denominator
        mult = pden // gcd(self._den, pden)
        den = self._den * mult
        int_colors = self._colors_at_scale(mult)
        int_p = tuple(int(c * den) for c in p)
        faces = []
        for i in range(self.dim + 1):
            others = [int_colors[j] for j in range(self.dim + 1) if j != i]
            shape = tuple(self.sizes[j] for j in range(self.dim + 1) if j != i)
            face = np.empty(shape, dtype=np.int8)
            _fill_sign_tensor(others, face, prefix_point=int_p)
            faces.append(face)
        closed, open_ = combine_containment(self.full_signs, faces)
        for idx in self._degenerate:
            verts = [self.colors[k][idx[k]] for k in range(self.dim + 1)]
            closed[idx] = lp.convex_combination(p, verts) is not None
        return closed, open_

    def containment_counts(self, point):
        """(closed count, open count, total) for one candidate point."""
        closed, open_ = self.containment_masks(point)
        return int(closed.sum()), int(open_.sum()), self.total


def containment_counts(point, colors):
    """One-shot exact containment counts of ``point`` over all rainbow simplices."""
    return RainbowEnumerator(colors).containment_counts(point)
