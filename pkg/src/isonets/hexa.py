"""Constructive quadrilateral and hexahedron tools.

Centerpiece: prescribing a real cross ratio and three points determines the
fourth point uniquely, which lets one grow a second quadrilateral over a
concircular base so that all side ratios come out right and all eight
vertices share a 2-sphere.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, quat
from .crossratio import cross_ratio, is_concircular, quad_ratio
from .errors import (
    DegenerateQuadrupleError,
    NotConcircularError,
    SolveDegenerateError,
    SphereFitError,
)

__all__ = [
    "TwoSphere", "Hexahedron", "TrapezoidClass",
    "solve_fourth_point", "solve_vertex", "build_hexahedron",
    "fit_two_sphere", "trapezoid_class", "supplement_check",
]


@dataclass(frozen=True)
class TwoSphere:
    """A 2-sphere in R^4: the affine 3-flat that carries it plus an
    in-flat center and radius."""

    flat_normal: np.ndarray
    flat_offset: float
    center: np.ndarray
    radius: float

    def point_residual(self, p):
        """Combined distance of p from the sphere: out-of-flat part and
        radial deviation inside the flat, in absolute units."""
        p = np.asarray(p, dtype=float)
        flat = np.abs(p @ self.flat_normal - self.flat_offset)
        rad = np.abs(np.linalg.norm(p - self.center, axis=-1) - self.radius)
        return np.hypot(flat, rad)

    def contains(self, p, tol=1e-8):
        scale = max(self.radius, 1.0)
        return bool(np.all(self.point_residual(p) <= tol * scale))


@dataclass(frozen=True)
class Hexahedron:
    """Two quadrilaterals (x1..x4 base, z1..z4 constructed) with the side
    cross ratios prescribed by the real pair (mu, lam)."""

    x: tuple
    z: tuple
    mu: float
    lam: float
    residual_side: float = 0.0
    residual_top: float = 0.0
    sphere: TwoSphere | None = field(default=None, compare=False)
    sphere_residual: float = 0.0

    @property
    def vertices(self):
        return np.array(list(self.x) + list(self.z))

    def faces(self):
        """The six quadrilateral faces, each as a 4-tuple of points.

        Order: base, top, then the four side faces in cyclic order; faces
        2k and 2k+1... opposite pairs are (0,1), (2,4), (3,5).
        """
        x1, x2, x3, x4 = self.x
        z1, z2, z3, z4 = self.z
        return [
            (x1, x2, x3, x4),
            (z1, z2, z3, z4),
            (x1, x2, z2, z1),
            (x2, x3, z3, z2),
            (x3, x4, z4, z3),
            (x4, x1, z1, z4),
        ]


def _config_scale(*pts):
    arr = np.array([np.asarray(p, dtype=float) for p in pts])
    return max(float(np.linalg.norm(arr.max(axis=0) - arr.min(axis=0))), 1e-300)


def solve_fourth_point(ratio, q1, q2, q3, tol=1e-12):
    """The unique Q4 with cross ratio (Q1, Q2, Q3, Q4) equal to `ratio`.

    Q4 = (W + ratio)^-1 (W Q3 + ratio Q1) with W = (Q1-Q2)(Q2-Q3)^-1.
    `ratio` must be real and nonzero; real ratios keep Q4 on the circle
    through Q1, Q2, Q3. Accepts batches; `ratio` may be an array.
    """
    r = np.asarray(ratio, dtype=float)
    if np.any(r == 0.0):
        raise ValueError("ratio must be nonzero")
    q1, q2, q3 = (np.asarray(p, dtype=float) for p in (q1, q2, q3))
    for pair, name in (((q1, q2), "Q1,Q2"), ((q2, q3), "Q2,Q3"), ((q1, q3), "Q1,Q3")):
        if np.any(quat.norm2(pair[0] - pair[1]) == 0.0):
            raise DegenerateQuadrupleError(name)
    out, denom2 = _kernels.solve_fourth(r, q1, q2, q3)
    # scale-free conditioning check: the denominator W + ratio lives on the
    # scale of max(|W|, |ratio|)
    wscale = np.maximum(quat.norm(q1 - q2) / quat.norm(q2 - q3), np.abs(r))
    bad = denom2 <= (tol * wscale) ** 2
    if np.any(bad):
        raise SolveDegenerateError(float(np.sqrt(denom2.min())))
    return out


def solve_vertex(position, ratio, qa, qb, qc, tol=1e-12):
    """Fill one missing slot of a quadruple at prescribed real cross ratio.

    `position` is the 1-based slot to solve for; (qa, qb, qc) are the known
    points in slot order. Each case reduces to solve_fourth_point through
    the cyclic symmetry of the cross ratio (real values are fixed under the
    conjugations the cyclic identity introduces).
    """
    r = np.asarray(ratio, dtype=float)
    if np.any(r == 0.0):
        raise ValueError("ratio must be nonzero")
    if position == 4:
        return solve_fourth_point(r, qa, qb, qc, tol)
    if position == 3:
        # known (Q1, Q2, Q4): DV(Q4, Q1, Q2, X) = 1/ratio
        return solve_fourth_point(1.0 / r, qc, qa, qb, tol)
    if position == 2:
        # known (Q1, Q3, Q4): DV(Q3, Q4, Q1, X) = ratio
        return solve_fourth_point(r, qb, qc, qa, tol)
    if position == 1:
        # known (Q2, Q3, Q4): DV(Q2, Q3, Q4, X) = 1/ratio
        return solve_fourth_point(1.0 / r, qa, qb, qc, tol)
    raise ValueError(f"position must be 1..4, got {position!r}")


def build_hexahedron(x1, x2, x3, x4, lam, z1, tol=1e-8):
    """Grow the quadrilateral (Z1..Z4) over a concircular base (X1..X4).

    The base must be concircular with real cross ratio mu; `lam` is the
    real side parameter. Z2, Z3, Z4 are constructed so that

        DV(Z1, Z2, X2, X1) = mu*lam
        DV(Z2, Z3, X3, X2) = lam
        DV(Z3, Z4, X4, X3) = mu*lam

    and the two remaining equations, DV(Z4, Z1, X1, X4) = lam and
    DV(Z1, Z2, Z3, Z4) = mu, close automatically; their deviations are
    returned as residuals together with an eight-point sphere fit.
    """
    lam = float(lam)
    if lam == 0.0:
        raise ValueError("lam must be nonzero")
    xs = [np.asarray(p, dtype=float) for p in (x1, x2, x3, x4)]
    z1 = np.asarray(z1, dtype=float)
    for p in xs:
        if quat.norm2(p - z1) == 0.0:
            raise DegenerateQuadrupleError("Z1,X", "Z1 coincides with a base vertex")
    if not is_concircular(*xs, tol=tol):
        raise NotConcircularError(quat.imnorm(quad_ratio(*xs)))
    mu = float(quat.re(quad_ratio(*xs)))
    if mu == 0.0:
        raise ValueError("base cross ratio mu must be nonzero")

    # each new vertex sits in slot 2 of the quadruple of its side face
    z2 = solve_vertex(2, mu * lam, z1, xs[1], xs[0], tol=1e-12)
    z3 = solve_vertex(2, lam, z2, xs[2], xs[1], tol=1e-12)
    z4 = solve_vertex(2, mu * lam, z3, xs[3], xs[2], tol=1e-12)

    side = abs(cross_ratio(z4, z1, xs[0], xs[3]) - lam)
    top = abs(cross_ratio(z1, z2, z3, z4) - mu)
    sphere, sres = fit_two_sphere([*xs, z1, z2, z3, z4])
    return Hexahedron(
        x=tuple(xs), z=(z1, z2, z3, z4), mu=mu, lam=lam,
        residual_side=float(side), residual_top=float(top),
        sphere=sphere, sphere_residual=float(sres),
    )


def _orthonormal_complement(basis):
    # deterministic completion: Gram-Schmidt the standard basis against the
    # rows of `basis`, keeping the first sufficiently independent vectors
    out = []
    rows = list(basis)
    for k in range(4):
        v = np.zeros(4)
        v[k] = 1.0
        for b in rows + out:
            v = v - (v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-7:
            out.append(v / n)
    return out


def fit_two_sphere(points, tol=1e-8, rank_tol=1e-6):
    """Least-squares 2-sphere through >= 4 points of R^4.

    Fits the affine 3-flat of the point set (SVD of centered coordinates),
    rejects sets that genuinely span R^4, then solves the linear
    circumsphere system inside the flat. Point sets contained in a 2-flat
    determine only a pencil of carrier spheres; the representative whose
    3-flat contains the plane plus a deterministically chosen third
    direction is returned. When such a set is not concircular in its plane
    (a nearly flat carrier of huge radius), the fit falls back to the full
    singular basis instead of the pencil representative.

    Returns (TwoSphere, residual) with the residual the worst combined
    flat/radial deviation over the inputs, relative to the point-set
    diameter.
    """
    pts = np.asarray([np.asarray(p, dtype=float) for p in points])
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError("expected points of shape (n, 4)")
    n = pts.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 points, got {n}")
    centroid = pts.mean(axis=0)
    X = pts - centroid
    diam = 0.0
    for i in range(n):
        diam = max(diam, float(np.linalg.norm(pts - pts[i], axis=1).max()))
    if diam == 0.0:
        raise SphereFitError(0.0, "all points coincide")
    svals = np.linalg.svd(X, compute_uv=False)
    s1 = svals[0]
    _, _, vt = np.linalg.svd(X, full_matrices=True)
    if n >= 5 and len(svals) >= 4 and svals[3] > rank_tol * s1:
        raise SphereFitError(svals[3] / s1, "points are not cospherical (span R^4)")

    def _fit_in(basis):
        normal = _orthonormal_complement(list(basis))
        if len(normal) != 1:
            raise SphereFitError(0.0, "could not determine carrier flat")
        normal = normal[0]
        y = X @ basis.T
        # |y - c|^2 = r^2  <=>  2 <y, c> - gamma = |y|^2
        A = np.hstack([2.0 * y, -np.ones((n, 1))])
        b = (y * y).sum(axis=1)
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        c3, gamma = sol[:3], sol[3]
        r2 = float(c3 @ c3 - gamma)
        if r2 <= 0.0:
            raise SphereFitError(r2, "degenerate sphere fit (nonpositive radius)")
        center = centroid + basis.T @ c3
        sphere = TwoSphere(
            flat_normal=normal, flat_offset=float(normal @ center),
            center=center, radius=float(np.sqrt(r2)),
        )
        return sphere, float(sphere.point_residual(pts).max() / diam)

    if svals[2] > rank_tol * s1:
        return _fit_in(vt[:3])
    # coplanar (or collinear) input: extend the plane by the first standard
    # direction independent of it
    plane = [vt[0] / np.linalg.norm(vt[0]), vt[1] / np.linalg.norm(vt[1])]
    extra = _orthonormal_complement(plane)
    if not extra:
        raise SphereFitError(0.0, "degenerate point set")
    sphere, residual = _fit_in(np.array(plane + [extra[0]]))
    if residual <= tol:
        return sphere, residual
    # in-plane misfit: the points are not concircular, so the tiny third
    # singular direction is geometry (a huge-radius carrier), not noise
    return _fit_in(vt[:3])


class TrapezoidClass(enum.Enum):
    NOT_TRAPEZOID = "not_trapezoid"
    TRAPEZOID = "trapezoid"
    ISOSCELES_EMBEDDED = "isosceles_embedded"
    ISOSCELES_CROSSED = "isosceles_crossed"


def trapezoid_class(q1, q2, q3, q4, tol=1e-8):
    """Classify a quadrilateral whose parallel sides are Q1Q4 and Q2Q3.

    Trapezoid: (Q1 - Q4) parallel to (Q2 - Q3). Isosceles additionally
    needs legs of equal length, |Q1 - Q2| = |Q3 - Q4|, and is certified by
    the closed form of its cross ratio,

        DV = -|Q1 - Q2|^2 / (|Q1 - Q3|^2 - |Q1 - Q2|^2),

    which weeds out skew parallelograms (equal legs but no circle). The
    embedded/crossed split follows the leg-vs-diagonal comparison
    |Q1 - Q2| < |Q1 - Q3|.
    """
    q1, q2, q3, q4 = (np.asarray(p, dtype=float) for p in (q1, q2, q3, q4))
    scale = _config_scale(q1, q2, q3, q4)
    if not quat.dependent2(q1 - q4, q2 - q3, tol=tol):
        return TrapezoidClass.NOT_TRAPEZOID
    leg1 = float(quat.norm(q1 - q2))
    leg2 = float(quat.norm(q3 - q4))
    if abs(leg1 - leg2) > tol * scale:
        return TrapezoidClass.TRAPEZOID
    diag = float(quat.norm(q1 - q3))
    denom = diag**2 - leg1**2
    if abs(denom) <= (tol * scale) ** 2:
        return TrapezoidClass.TRAPEZOID
    predicted = -(leg1**2) / denom
    actual = cross_ratio(q1, q2, q3, q4)
    if abs(actual - predicted) > tol * max(1.0, abs(predicted)):
        return TrapezoidClass.TRAPEZOID
    if leg1 < diag:
        return TrapezoidClass.ISOSCELES_EMBEDDED
    return TrapezoidClass.ISOSCELES_CROSSED


def _face_isosceles(face, tol):
    # a face may be a trapezoid with respect to either pairing of opposite
    # sides; accept an isosceles classification in either orientation
    a, b, c, d = face
    for order in ((a, b, c, d), (b, c, d, a)):
        cls = trapezoid_class(*order, tol=tol)
        if cls in (TrapezoidClass.ISOSCELES_EMBEDDED, TrapezoidClass.ISOSCELES_CROSSED):
            return True
    return False


def supplement_check(h, tol=1e-8):
    """Opposite faces of a hexahedron inherit the isosceles property.

    Whenever two adjacent faces classify as isosceles trapezoids, their
    opposite faces must classify isosceles too. Returns True when that
    implication holds for every adjacent isosceles pair (vacuously True
    if no such pair exists).
    """
    faces = h.faces()
    iso = [_face_isosceles(f, tol) for f in faces]
    opposite = {0: 1, 1: 0, 2: 4, 4: 2, 3: 5, 5: 3}
    for i in range(6):
        for j in range(i + 1, 6):
            if opposite[i] == j or not (iso[i] and iso[j]):
                continue
            if not (iso[opposite[i]] and iso[opposite[j]]):
                return False
    return True
