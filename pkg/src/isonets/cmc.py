"""Constant mean curvature nets.

A cmc net is an isothermic net in R^3 (pure imaginary quaternions) whose
Christoffel transform can be scaled and positioned to lie at constant
vertex distance 1/|H|; that parallel net is then automatically a Darboux
transform with parameter lambda_p = lambda_c / H^2. Both nets of such a
pair have constant mean curvature H in the vertex-sphere sense implemented
by vertex_mean_curvature.
"""

from dataclasses import dataclass

import numpy as np

from . import quat
from .crossratio import cross_ratio
from .darboux import DarbouxParams, _derive_lambda, bianchi_fourth, darboux
from .errors import (
    CmcVerificationError,
    EmptyInitialSphereError,
    UndefinedCurvatureError,
)
from .hexa import TrapezoidClass, trapezoid_class
from .lattice import Net, gen_cylinder
from .records import TransformRecord

__all__ = [
    "CmcPair", "make_cmc_cylinder", "verify_cmc",
    "vertex_mean_curvature", "cmc_darboux", "cmc_bianchi",
]


@dataclass(frozen=True)
class CmcPair:
    """Net of constant mean curvature together with its parallel net.

    H is the curvature magnitude 1/|F - Fp|, lambda_p the Darboux
    parameter of the pair, lambda_c the Christoffel scaling; the relation
    lambda_p = lambda_c / H^2 ties the three together.
    """

    F: Net
    Fp: Net
    H: float
    lambda_p: float
    lambda_c: float


def _dir_edges(A, B, direction, wrap):
    """Per-edge corner arrays (tailA, headA, tailB, headB), flattened."""
    if direction == "m":
        pieces = [(A[:-1], A[1:], B[:-1], B[1:])]
        if wrap:
            pieces.append((A[-1:], A[:1], B[-1:], B[:1]))
    else:
        pieces = [(A[:, :-1], A[:, 1:], B[:, :-1], B[:, 1:])]
        if wrap:
            pieces.append((A[:, -1:], A[:, :1], B[:, -1:], B[:, :1]))
    out = []
    for k in range(4):
        out.append(np.concatenate([p[k].reshape(-1, 4) for p in pieces]))
    return out


def verify_cmc(F, Fp_candidate, tol=1e-8):
    """Certify a net/parallel-net pair as constant mean curvature.

    Checks, in order: matching windows, R^3-valuedness, nondegenerate
    edges, Christoffel products constant (scaling estimated from the first
    m-edge, then verified everywhere with opposite sign along n), vertex
    distances constant (defining H), and edge cross ratios constant
    (defining lambda_p, negated along n). Raises CmcVerificationError
    naming the first violated condition; returns (H, lambda_p).
    """
    H, lambda_p, _, _ = _verify_cmc_full(F, Fp_candidate, tol)
    return H, lambda_p


def _verify_cmc_full(F, Fp, tol=1e-8):
    if (F.window.M, F.window.N) != (Fp.window.M, Fp.window.N):
        raise CmcVerificationError("window", {})
    if not (F.is_imaginary() and Fp.is_imaginary()):
        raise CmcVerificationError("imaginary", {})
    wrap_m = F.window.wrap_m and Fp.window.wrap_m
    wrap_n = F.window.wrap_n and Fp.window.wrap_n

    edges = {d: _dir_edges(F.values, Fp.values, d, wrap_m if d == "m" else wrap_n)
             for d in ("m", "n")}
    for d in ("m", "n"):
        ta, ha, tb, hb = edges[d]
        if np.any(quat.norm2(ha - ta) == 0.0) or np.any(quat.norm2(hb - tb) == 0.0):
            # covers the excluded sphere case: a parallel net collapsing
            # to a point has only zero edges
            raise CmcVerificationError("degenerate", {})

    # (a) Christoffel products, scaling taken from the first m-edge
    residuals = {}
    ta, ha, tb, hb = edges["m"]
    first = quat.mul(ha[0] - ta[0], hb[0] - tb[0])
    if quat.imnorm(first) > tol * max(quat.norm(first), 1e-300) or first[0] == 0.0:
        raise CmcVerificationError("christoffel", {"first_product_im": float(quat.imnorm(first))})
    lambda_c = 1.0 / float(first[0])
    for d, sign in (("m", 1.0), ("n", -1.0)):
        ta, ha, tb, hb = edges[d]
        prod = lambda_c * quat.mul(ha - ta, hb - tb)
        prod[:, 0] -= sign
        dev = float(quat.norm(prod).max())
        residuals[f"christoffel_{d}"] = dev
        if dev > tol:
            raise CmcVerificationError("christoffel", residuals)

    # (b) constant vertex distance, defining H
    dist = quat.norm(F.values - Fp.values)
    mean = float(dist.mean())
    if mean == 0.0:
        raise CmcVerificationError("distance", {"mean": 0.0})
    spread = float(np.abs(dist - mean).max() / mean)
    residuals["distance_spread"] = spread
    if spread > tol:
        raise CmcVerificationError("distance", residuals)
    H = 1.0 / mean

    # (c) constant edge cross ratios, defining lambda_p
    ta, ha, tb, hb = edges["m"]
    z = cross_ratio(ta, tb, hb, ha)
    lambda_p = float(np.median(z.real))
    for d, sign in (("m", 1.0), ("n", -1.0)):
        ta, ha, tb, hb = edges[d]
        z = cross_ratio(ta, tb, hb, ha)
        dev = float(np.abs(z - sign * lambda_p).max() / max(1.0, abs(lambda_p)))
        residuals[f"darboux_{d}"] = dev
        if dev > tol:
            raise CmcVerificationError("darboux", residuals)

    return H, lambda_p, lambda_c, residuals


def make_cmc_cylinder(M, N, r=1.0):
    """Discrete cylinder with its antipodal parallel net, H = 1/(2r).

    The parallel net negates each radius vector and keeps the heights, so
    corresponding m-edges are antiparallel, n-edges parallel, and every
    vertex distance is the chord 2r.
    """
    F = gen_cylinder(M, N, r)
    Fp = F.with_values(F.values * np.array([1.0, -1.0, -1.0, 1.0]))
    H, lambda_p, lambda_c, residuals = _verify_cmc_full(F, Fp)
    return CmcPair(F, Fp, H, lambda_p, lambda_c)


def vertex_mean_curvature(net, m, n, tol=1e-9):
    """Mean curvature at an interior vertex from the vertex sphere.

    The sphere center C is pinned by three linear conditions: equal
    distances to the two m-neighbors, equal distances to the two
    n-neighbors, and the central distance being the half-sum of squares of
    the distances to the forward neighbors. Solved projectively: a center
    escaping to infinity (all conditions met by a plane) gives curvature
    0.0; an ambiguous system raises UndefinedCurvatureError; C coinciding
    with the vertex gives inf.
    """
    if not net.is_imaginary():
        raise ValueError("mean curvature needs an R^3-valued net")
    y0 = quat.to_vec3(net.point(m, n))
    yp = quat.to_vec3(net.point(m + 1, n)) - y0
    ym = quat.to_vec3(net.point(m - 1, n)) - y0
    yq = quat.to_vec3(net.point(m, n + 1)) - y0
    yn = quat.to_vec3(net.point(m, n - 1)) - y0

    stencil = np.stack([yp, ym, yq, yn])
    s = float(np.linalg.norm(stencil, axis=1).max())
    if s == 0.0:
        raise UndefinedCurvatureError("stencil collapsed to a point")
    yp, ym, yq, yn = yp / s, ym / s, yq / s, yn / s

    A = np.stack([yp - ym, yq - yn, yp + yq])
    b = np.array([
        (yp @ yp - ym @ ym) / 2.0,
        (yq @ yq - yn @ yn) / 2.0,
        (yp @ yp + yq @ yq) / 2.0,
    ])
    B = np.hstack([A, -b[:, None]])
    svals = np.linalg.svd(B, compute_uv=False)
    if svals[2] <= tol * svals[0]:
        raise UndefinedCurvatureError(
            "vertex sphere underdetermined (ambiguous center)"
        )
    _, _, vt = np.linalg.svd(B, full_matrices=True)
    null = vt[-1]
    c, t = null[:3], null[3]
    if abs(t) <= tol * np.linalg.norm(c):
        return 0.0
    dist = s * float(np.linalg.norm(c / t))
    if dist == 0.0:
        return float("inf")
    return 1.0 / dist


def cmc_darboux(pair, lam, seed_index=(0, 0), seed_direction=(1.0, 0.0, 0.0),
                tol=1e-8):
    """Darboux transform of a cmc pair staying at mean curvature H.

    The seed is placed on the initial sphere around the parallel net:
    seed = Fp(seed_index) + rho * direction with
    rho = (1/|H|) * sqrt(1 - lam/lambda_p). The transformed parallel net
    is the Bianchi closure of (F, Fhat, Fp) and every invariant of the
    output pair is re-verified, including the initial-sphere distance
    |Fhat - Fp| = rho at every vertex.
    """
    lam = float(lam)
    if lam == 0.0:
        raise ValueError("lam must be nonzero")
    ratio = lam / pair.lambda_p
    if ratio >= 1.0:
        raise EmptyInitialSphereError(1.0 - ratio)
    rho = np.sqrt(1.0 - ratio) / abs(pair.H)
    if rho * abs(pair.H) < tol:
        # lam -> lambda_p limit: the initial sphere shrinks onto Fp
        raise EmptyInitialSphereError(1.0 - ratio)

    direction = np.asarray(seed_direction, dtype=np.float64).reshape(3)
    dn = float(np.linalg.norm(direction))
    if dn == 0.0:
        raise ValueError("seed_direction must be a nonzero 3-vector")
    direction = direction / dn

    seed = pair.Fp.point(*seed_index) + rho * quat.from_vec3(direction)
    fhat = darboux(pair.F, DarbouxParams(lam, seed, seed_index))
    fhat_p = bianchi_fourth(pair.F, fhat, pair.Fp, lam, pair.lambda_p)

    # initial-sphere distance at every vertex, a conditioning monitor
    init = quat.norm(fhat.values - pair.Fp.values)
    init_dev = float(np.abs(init - rho).max() / rho)
    if init_dev > tol:
        raise CmcVerificationError("initial_sphere", {"initial_sphere": init_dev})

    H, lambda_p, lambda_c, residuals = _verify_cmc_full(fhat, fhat_p, tol)
    if abs(H - pair.H) > tol * abs(pair.H):
        residuals["H_deviation"] = abs(H - pair.H)
        raise CmcVerificationError("H", residuals)
    residuals["initial_sphere"] = init_dev

    record = TransformRecord(
        kind="cmc_darboux",
        parameters={
            "lambda": lam,
            "seed_index": [int(seed_index[0]), int(seed_index[1])],
            "seed_direction": [float(v) for v in direction],
            "rho": float(rho),
        },
        residuals=dict(fhat.record.residuals, **residuals),
    )
    return CmcPair(
        fhat.with_values(fhat.values, record=record),
        fhat_p, H, lambda_p, lambda_c,
    )


def _isosceles_everywhere(q1, q2, q3, q4, tol):
    """Worst-case isosceles-trapezoid certification over vertex quads."""
    bad = 0
    for k in range(q1.shape[0]):
        cls = trapezoid_class(q1[k], q2[k], q3[k], q4[k], tol)
        if cls not in (TrapezoidClass.ISOSCELES_EMBEDDED,
                       TrapezoidClass.ISOSCELES_CROSSED):
            bad += 1
    return bad


def cmc_bianchi(pair, T1, T2, tol=1e-8):
    """Common cmc Darboux transform of two cmc Darboux transforms.

    Parameters are recovered from the edge cross ratios of the inputs.
    Builds the Bianchi closure of the nets and of the parallel nets,
    certifies the connecting quadrilaterals (Fhat1, Fhat1p, Fhatp, Fhat)
    as isosceles trapezoids, and re-verifies the resulting pair.
    """
    l1 = _derive_lambda(pair.F, T1.F)
    l2 = _derive_lambda(pair.F, T2.F)
    if abs(l1 - l2) <= 1e-12 * max(1.0, abs(l1)):
        raise ValueError("transform parameters must differ")

    fhat = bianchi_fourth(pair.F, T1.F, T2.F, l1, l2, tol)
    fhat_p = bianchi_fourth(pair.Fp, T1.Fp, T2.Fp, l1, l2, tol)

    flat = lambda v: v.reshape(-1, 4)
    bad = _isosceles_everywhere(
        flat(T1.F.values), flat(T1.Fp.values), flat(fhat_p.values),
        flat(fhat.values), tol=1e-6,
    )
    bad += _isosceles_everywhere(
        flat(T2.F.values), flat(T2.Fp.values), flat(fhat_p.values),
        flat(fhat.values), tol=1e-6,
    )
    if bad:
        raise CmcVerificationError("trapezoid", {"non_isosceles_quads": float(bad)})

    H, lambda_p, lambda_c, residuals = _verify_cmc_full(fhat, fhat_p, tol)
    if abs(H - pair.H) > tol * abs(pair.H):
        residuals["H_deviation"] = abs(H - pair.H)
        raise CmcVerificationError("H", residuals)

    record = TransformRecord(
        kind="bianchi",
        parameters={"lambda1": l1, "lambda2": l2},
        residuals=dict(fhat.record.residuals, **residuals),
    )
    return CmcPair(
        fhat.with_values(fhat.values, record=record),
        fhat_p, H, lambda_p, lambda_c,
    )
