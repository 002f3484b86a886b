"""Quaternionic cross ratio of ordered point quadruples.

The cross ratio of (Q1, Q2, Q3, Q4) in R^4 = H is the quaternion

    (Q1 - Q2)(Q2 - Q3)^-1 (Q3 - Q4)(Q4 - Q1)^-1

reported as a complex number with nonnegative imaginary part: similarity
rotations move the imaginary 3-vector around but preserve (Re, |Im|), which
is the conformal invariant. Values are plain `complex` (scalars) or complex
ndarrays (batches); the imaginary part is always >= 0.
"""

import numpy as np

from . import _kernels, quat
from .errors import (
    DegenerateOrbitError,
    DegenerateQuadrupleError,
    NonRealizableDistancesError,
)

__all__ = [
    "quad_ratio", "cross_ratio", "cross_ratio_from_distances",
    "is_concircular", "identity_orbit", "permutation_value",
    "PERMUTATION_MAPS", "cr_equal",
]


def _check_factors(q1, q2, q3, q4):
    if np.any(quat.norm2(np.asarray(q2, dtype=float) - np.asarray(q3, dtype=float)) == 0.0):
        raise DegenerateQuadrupleError("Q2,Q3")
    if np.any(quat.norm2(np.asarray(q4, dtype=float) - np.asarray(q1, dtype=float)) == 0.0):
        raise DegenerateQuadrupleError("Q4,Q1")


def quad_ratio(q1, q2, q3, q4):
    """Quaternion-valued cross ratio, exact factor order as defined above.

    Only the two inverted differences (Q2-Q3 and Q4-Q1) must be nonzero.
    """
    _check_factors(q1, q2, q3, q4)
    return _kernels.quad_ratio(q1, q2, q3, q4)


def _complexify(q):
    r = quat.re(q)
    i = quat.imnorm(q)
    if np.ndim(r) == 0:
        return complex(r, i)
    return r + 1j * i


def cross_ratio(q1, q2, q3, q4):
    """Cross ratio as complex value(s) with Im >= 0."""
    return _complexify(quad_ratio(q1, q2, q3, q4))


def cross_ratio_from_distances(l, tol=1e-8):
    """Cross ratio of a quadruple given only its 6 pairwise distances.

    Parameters
    ----------
    l : (4, 4) array
        Symmetric distance matrix with zero diagonal, entries l[i, j] the
        distance between points i and j (0-based).
    tol : float
        Realizability slack for the determinant test, relative to the
        8th power of the largest entry.

    The real part is
        (l12^2 l34^2 + l14^2 l23^2 - l13^2 l24^2) / (2 l14^2 l23^2)
    and the imaginary part is sqrt(-det(l^2)) over the same denominator,
    where l^2 is the matrix of squared distances. A distance table of an
    actual point quadruple has -det(l^2) >= 0; significantly negative
    values mean no realization exists.
    """
    l = np.asarray(l, dtype=float)
    if l.shape != (4, 4):
        raise ValueError("expected a 4x4 distance matrix")
    if not np.allclose(l, l.T) or np.any(np.abs(np.diag(l)) > 0):
        raise ValueError("distance matrix must be symmetric with zero diagonal")
    l12, l13, l14 = l[0, 1], l[0, 2], l[0, 3]
    l23, l24, l34 = l[1, 2], l[1, 3], l[2, 3]
    if l14 == 0.0 or l23 == 0.0:
        raise DegenerateQuadrupleError("Q4,Q1" if l14 == 0.0 else "Q2,Q3")
    sq = l * l
    negdet = -np.linalg.det(sq)
    scale = max(l.max(), 1.0) ** 8
    if negdet < -tol * scale:
        raise NonRealizableDistancesError(negdet)
    negdet = max(negdet, 0.0)
    denom = 2.0 * l14**2 * l23**2
    re = (l12**2 * l34**2 + l14**2 * l23**2 - l13**2 * l24**2) / denom
    return complex(re, np.sqrt(negdet) / denom)


def _pairwise_max_dist2(q1, q2, q3, q4):
    pts = [np.asarray(p, dtype=float) for p in (q1, q2, q3, q4)]
    best = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            best = np.maximum(best, quat.norm2(pts[i] - pts[j]))
    return best


def is_concircular(q1, q2, q3, q4, tol=1e-8):
    """True when the four points lie on a common circle (or line).

    The imaginary part of the cross ratio vanishes exactly on circles;
    numerically it is compared against tol times the squared diameter
    of the quadruple.
    """
    v = quad_ratio(q1, q2, q3, q4)
    scale = np.maximum(_pairwise_max_dist2(q1, q2, q3, q4), 1.0)
    return bool(np.all(quat.imnorm(v) <= tol * scale))


def cr_equal(a, b, tol=1e-10):
    """Equality of cross-ratio values, tolerance scaled by magnitude."""
    a = complex(a)
    b = complex(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ------------------------------------------------------- permutation orbit

def _build_permutation_maps():
    # Each vertex permutation changes the cross ratio by a real Moebius map
    # (up to a final conjugation that the Im >= 0 normalization absorbs).
    # Two generators: a cyclic shift sends z to 1/z, swapping the middle
    # pair sends z to 1 - z. Breadth-first closure reaches all 24 orders.
    cyc = np.array([[0, 1], [1, 0]])
    swp = np.array([[-1, 1], [0, 1]])
    maps = {(0, 1, 2, 3): np.eye(2, dtype=int)}
    frontier = [(0, 1, 2, 3)]
    while frontier:
        nxt = []
        for p in frontier:
            m = maps[p]
            for gen, mat in ((lambda t: (t[3], t[0], t[1], t[2]), cyc),
                             (lambda t: (t[0], t[2], t[1], t[3]), swp)):
                p2 = gen(p)
                if p2 not in maps:
                    maps[p2] = mat @ m
                    nxt.append(p2)
        frontier = nxt
    assert len(maps) == 24
    return maps


PERMUTATION_MAPS = _build_permutation_maps()


def permutation_value(perm, dv):
    """Cross ratio of the reordered quadruple, from the original value.

    `perm` is a 0-based tuple: entry k names which original point sits in
    slot k. The result is normalized to Im >= 0.
    """
    m = PERMUTATION_MAPS[tuple(perm)]
    z = complex(dv)
    a, b = m[0]
    c, d = m[1]
    w = (a * z + b) / (c * z + d)
    return complex(w.real, abs(w.imag))


def identity_orbit(dv, tol=1e-10):
    """The values the cross ratio can take under vertex reordering.

    Returns a tuple of at most 6 normalized values (generic quadruples give
    exactly 6; special values such as -1 collapse the orbit). Sorted by
    (re, im) for reproducibility.
    """
    z = complex(dv)
    if cr_equal(z, 0.0, tol) or cr_equal(z, 1.0, tol):
        raise DegenerateOrbitError(z)
    vals = []
    for p in PERMUTATION_MAPS:
        w = permutation_value(p, z)
        if not any(cr_equal(w, v, tol) for v in vals):
            vals.append(w)
    return tuple(sorted(vals, key=lambda v: (v.real, v.imag)))
