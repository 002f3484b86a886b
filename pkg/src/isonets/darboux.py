"""Darboux transforms and their permutability constructions.

A Darboux transform F^ of a net F solves the edgewise cross-ratio system

    DV(F, F^, F^+, F+) = +lam    along m-edges,
    DV(F, F^, F^+, F+) = -lam    along n-edges,

propagated from one seed value. The system is consistent around every
elementary quadrilateral precisely because the eight points of each
elementary hexahedron (F-quad below, F^-quad above) are cospherical; the
sweep makes that guarantee an explicit runtime check.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import quat
from .crossratio import cross_ratio
from .christoffel import ChristoffelParams, christoffel
from .errors import (
    DegenerateNetError,
    LatticeConsistencyError,
    NotDarbouxPairError,
    NotPeriodicError,
    SolveDegenerateError,
)
from .hexa import fit_two_sphere, solve_vertex
from .lattice import LatticeWindow
from .records import TransformRecord

__all__ = [
    "DarbouxParams", "RibaucourCongruence",
    "darboux", "darboux_residual", "ribaucour_congruence",
    "bianchi_fourth", "bianchi_cube",
    "christoffel_darboux_check", "dual_difference_residual",
]

CONSISTENCY_TOL = 1e-9
PERIODIC_RTOL = 1e-8


@dataclass(frozen=True)
class DarbouxParams:
    lam: float               # spectral parameter, nonzero real
    seed_value: object       # quaternion the transform takes at seed_index
    seed_index: tuple = (0, 0)

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lam must be nonzero")


@dataclass(frozen=True)
class RibaucourCongruence:
    """Sphere per elementary hexahedron of a Darboux pair.

    residuals holds the relative sphere-fit defect per dual index;
    vertex_residual is the worst four-sphere incidence defect over the
    interior point pairs.
    """

    spheres: dict
    residuals: dict
    vertex_residual: float


def _step(F, fh, i, j, di, dj, lam):
    """Propagate the transform value fh at site (i, j) across one edge."""
    if di == 1:
        return solve_vertex(3, lam, F[i, j], fh, F[i + 1, j])
    if di == -1:
        return solve_vertex(2, lam, F[i - 1, j], fh, F[i, j])
    if dj == 1:
        return solve_vertex(3, -lam, F[i, j], fh, F[i, j + 1])
    return solve_vertex(2, -lam, F[i, j - 1], fh, F[i, j])


def darboux(net, params, consistency_tol=CONSISTENCY_TOL,
            periodic_rtol=PERIODIC_RTOL, require_periodic=False):
    """Darboux transform of an isothermic net.

    Sweeps outward from the seed in breadth-first (diamond) order; every
    edge revisiting an assigned vertex contributes a consistency residual,
    all of which must stay below consistency_tol (relative). Wrapped
    directions are transformed on the open cover; the seam mismatch is
    recorded as monodromy and the wrap flag kept only when it vanishes.
    """
    lam = float(params.lam)
    F = net.values
    M, N = net.window.M, net.window.N
    i0, j0 = net.window.index(*params.seed_index)
    seed = np.asarray(params.seed_value, dtype=np.float64).reshape(4)
    if np.all(seed == F[i0, j0]):
        raise DegenerateNetError(
            tuple(params.seed_index), "seed_value coincides with the net"
        )

    scale = max(net.diameter(), float(quat.norm(seed - F[i0, j0])))
    fhat = np.zeros((M, N, 4))
    fhat[i0, j0] = seed
    assigned = np.zeros((M, N), dtype=bool)
    assigned[i0, j0] = True
    cons = np.zeros((M, N))
    queue = deque([(i0, j0)])
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if not (0 <= ii < M and 0 <= jj < N):
                continue
            try:
                cand = _step(F, fhat[i, j], i, j, di, dj, lam)
            except SolveDegenerateError as e:
                raise DegenerateNetError(
                    (net.window.m0 + ii, net.window.n0 + jj),
                    f"Darboux propagation degenerate: {e}",
                ) from e
            if assigned[ii, jj]:
                dev = float(quat.norm(cand - fhat[ii, jj])) / scale
                cons[ii, jj] = max(cons[ii, jj], dev)
                if dev > consistency_tol:
                    raise LatticeConsistencyError(
                        (net.window.m0 + ii, net.window.n0 + jj), dev
                    )
            else:
                fhat[ii, jj] = cand
                assigned[ii, jj] = True
                queue.append((ii, jj))

    residuals = {
        "consistency_max": float(cons.max()),
        "consistency_per_vertex": cons.tolist(),
    }

    # seam closure: re-propagate across the wrapped edge and compare
    hat_extent = max(
        float(np.linalg.norm(
            fhat.reshape(-1, 4).max(axis=0) - fhat.reshape(-1, 4).min(axis=0)
        )),
        1e-300,
    )
    wrap_m, wrap_n = net.window.wrap_m, net.window.wrap_n
    if wrap_m:
        back = np.stack([
            solve_vertex(3, lam, F[M - 1, j], fhat[M - 1, j], F[0, j])
            for j in range(N)
        ])
        mono = float(quat.norm(back - fhat[0, :]).max()) / hat_extent
        residuals["monodromy_m"] = mono
        wrap_m = mono <= periodic_rtol
        if require_periodic and not wrap_m:
            raise NotPeriodicError(mono)
    if wrap_n:
        back = np.stack([
            solve_vertex(3, -lam, F[i, N - 1], fhat[i, N - 1], F[i, 0])
            for i in range(M)
        ])
        mono = float(quat.norm(back - fhat[:, 0]).max()) / hat_extent
        residuals["monodromy_n"] = mono
        wrap_n = mono <= periodic_rtol
        if require_periodic and not wrap_n:
            raise NotPeriodicError(mono)

    record = TransformRecord(
        kind="darboux",
        parameters={
            "lambda": lam,
            "seed_index": [int(params.seed_index[0]), int(params.seed_index[1])],
            "seed_value": [float(v) for v in seed],
        },
        residuals=residuals,
    )
    return net.with_values(fhat, wrap_m=wrap_m, wrap_n=wrap_n, record=record)


def _pair_deviation(Fv, Hv, lam, direction):
    """Max |DV - target| over the open-cover edges of one direction."""
    if direction == "m":
        z = cross_ratio(Fv[:-1, :], Hv[:-1, :], Hv[1:, :], Fv[1:, :])
        target = lam
    else:
        z = cross_ratio(Fv[:, :-1], Hv[:, :-1], Hv[:, 1:], Fv[:, 1:])
        target = -lam
    return float(np.abs(z - target).max())


def darboux_residual(F, Fhat, lam):
    """Worst deviation of the pair's edge cross ratios from (+lam, -lam).

    Seam edges enter when both nets keep the wrap flag of a direction.
    """
    Fv, Hv = F.values, Fhat.values
    devs = [_pair_deviation(Fv, Hv, lam, "m"), _pair_deviation(Fv, Hv, lam, "n")]
    if F.window.wrap_m and Fhat.window.wrap_m:
        z = cross_ratio(Fv[-1:, :], Hv[-1:, :], Hv[:1, :], Fv[:1, :])
        devs.append(float(np.abs(z - lam).max()))
    if F.window.wrap_n and Fhat.window.wrap_n:
        z = cross_ratio(Fv[:, -1:], Hv[:, -1:], Hv[:, :1], Fv[:, :1])
        devs.append(float(np.abs(z + lam).max()))
    return max(devs)


def _derive_lambda(F, Fhat):
    """Median m-edge cross ratio of a candidate pair."""
    z = cross_ratio(F.values[:-1, :], Fhat.values[:-1, :],
                    Fhat.values[1:, :], F.values[1:, :])
    return float(np.median(z.real))


def ribaucour_congruence(F, Fhat, tol=1e-6):
    """Spheres through the elementary hexahedra of a Darboux pair.

    Fits one 2-sphere per dual index of the pair's common window (wrap
    taken as the AND of both nets' flags) and verifies that every interior
    point pair (F, F^) lies on its four surrounding spheres.
    """
    if (F.window.M, F.window.N) != (Fhat.window.M, Fhat.window.N):
        raise ValueError("nets live on different windows")
    lam = _derive_lambda(F, Fhat)
    resid = darboux_residual(F, Fhat, lam)
    if resid > tol * max(1.0, abs(lam)):
        raise NotDarbouxPairError(resid, "edge cross ratios not (+lam, -lam)")

    w = F.window
    wrap_m = w.wrap_m and Fhat.window.wrap_m
    wrap_n = w.wrap_n and Fhat.window.wrap_n
    mm = w.M if wrap_m else w.M - 1
    nn = w.N if wrap_n else w.N - 1

    spheres, residuals = {}, {}
    for i in range(mm):
        for j in range(nn):
            i1, j1 = (i + 1) % w.M, (j + 1) % w.N
            pts = np.stack([
                F.values[i, j], F.values[i1, j], F.values[i1, j1], F.values[i, j1],
                Fhat.values[i, j], Fhat.values[i1, j], Fhat.values[i1, j1], Fhat.values[i, j1],
            ])
            key = (w.m0 + i, w.n0 + j)
            sphere, fit_res = fit_two_sphere(pts)
            spheres[key] = sphere
            residuals[key] = fit_res

    # four-sphere property: each interior point pair sits on the spheres of
    # the four quadrilaterals meeting at the vertex
    vertex_res = 0.0
    eff = LatticeWindow(w.m0, w.n0, w.M, w.N, wrap_m, wrap_n)
    for m, n in eff.interior_sites():
        p, ph = F.point(m, n), Fhat.point(m, n)
        for key in ((m, n), (m - 1, n), (m - 1, n - 1), (m, n - 1)):
            i = (key[0] - w.m0) % w.M if wrap_m else key[0] - w.m0
            j = (key[1] - w.n0) % w.N if wrap_n else key[1] - w.n0
            s = spheres[(w.m0 + i, w.n0 + j)]
            d = max(s.point_residual(p), s.point_residual(ph))
            vertex_res = max(vertex_res, d / max(2.0 * s.radius, 1e-300))
    return RibaucourCongruence(spheres, residuals, vertex_res)


def bianchi_fourth(F, F1hat, F2hat, lambda1, lambda2, tol=1e-8):
    """Common Darboux transform closing a Bianchi quadrilateral.

    Given transforms F1hat (parameter lambda1) and F2hat (lambda2) of F,
    returns the unique net X with DV(F, F2hat, X, F1hat) = lambda2/lambda1
    at every vertex; X is verified to be a lambda2-transform of F1hat and
    a lambda1-transform of F2hat.
    """
    l1, l2 = float(lambda1), float(lambda2)
    if l1 == l2:
        raise ValueError("lambda1 and lambda2 must differ")
    for H, lv, name in ((F1hat, l1, "F1hat"), (F2hat, l2, "F2hat")):
        r = darboux_residual(F, H, lv)
        if r > tol * max(1.0, abs(lv)):
            raise NotDarbouxPairError(r, f"{name} is not a Darboux transform of F")

    X = solve_vertex(3, l2 / l1, F.values, F2hat.values, F1hat.values)

    z = cross_ratio(F.values, F2hat.values, X, F1hat.values)
    spread = float(np.abs(z - l2 / l1).max())

    wrap_m = F.window.wrap_m and F1hat.window.wrap_m and F2hat.window.wrap_m
    wrap_n = F.window.wrap_n and F1hat.window.wrap_n and F2hat.window.wrap_n
    out = F.with_values(X, wrap_m=wrap_m, wrap_n=wrap_n)

    r1 = darboux_residual(F1hat, out, l2)
    r2 = darboux_residual(F2hat, out, l1)
    worst = max(r1 / max(1.0, abs(l2)), r2 / max(1.0, abs(l1)))
    if worst > tol:
        raise NotDarbouxPairError(worst, "closed quadrilateral fails the edge equations")

    record = TransformRecord(
        kind="bianchi",
        parameters={"lambda1": l1, "lambda2": l2},
        residuals={"vertex_spread": spread, "edge_residual_1": r1, "edge_residual_2": r2},
    )
    return out.with_values(X, record=record)


def bianchi_cube(F, F1hat, F2hat, F3hat, lambda1, lambda2, lambda3, tol=1e-8):
    """Eight-net permutability cube over three Darboux transforms of F.

    Returns (F12, F23, F31, F123). The eighth net is built as the Bianchi
    closure over F3hat and verified to be simultaneously a lambda1-transform
    of F23, lambda2 of F31, and lambda3 of F12; the three diagonal cross
    ratios of the top cell are pointwise constant.
    """
    l1, l2, l3 = float(lambda1), float(lambda2), float(lambda3)
    if len({l1, l2, l3}) < 3:
        raise ValueError("parameters must be pairwise distinct")

    F12 = bianchi_fourth(F, F1hat, F2hat, l1, l2, tol)
    F23 = bianchi_fourth(F, F2hat, F3hat, l2, l3, tol)
    F31 = bianchi_fourth(F, F3hat, F1hat, l3, l1, tol)
    F123 = bianchi_fourth(F3hat, F31, F23, l1, l2, tol)

    r12 = darboux_residual(F12, F123, l3)
    if r12 > tol * max(1.0, abs(l3)):
        raise NotDarbouxPairError(r12, "eighth net fails the lambda3 relations")

    # the three diagonal cross ratios of the top cell, each constant
    diag = {}
    for name, (a, b, c, d), val in (
        ("dv3", (F3hat, F23, F123, F31), l2 / l1),
        ("dv1", (F1hat, F31, F123, F12), l3 / l2),
        ("dv2", (F2hat, F12, F123, F23), l1 / l3),
    ):
        z = cross_ratio(a.values, b.values, c.values, d.values)
        diag[name] = float(np.abs(z - val).max())
        if diag[name] > tol * max(1.0, abs(val)):
            raise NotDarbouxPairError(diag[name], f"top-cell ratio {name} not constant")

    residuals = dict(F123.record.residuals)
    residuals.update({"edge_residual_12": r12, **diag})
    record = TransformRecord(
        kind="bianchi",
        parameters={"lambda1": l1, "lambda2": l2, "lambda3": l3},
        residuals=residuals,
    )
    return F12, F23, F31, F123.with_values(F123.values, record=record)


# --------------------------------------------- Christoffel permutability

def _edge_inv(values, direction):
    d = values[1:, :] - values[:-1, :] if direction == "m" else values[:, 1:] - values[:, :-1]
    n2 = quat.norm2(d)
    if np.any(n2 == 0.0):
        raise DegenerateNetError(
            tuple(int(v) for v in np.argwhere(n2 == 0.0)[0]), "zero edge"
        )
    return quat.inv(d)


def dual_difference_residual(F, Fhat, lam):
    """Defect of the difference equation linking a pair to its duals.

    For every edge, lam * (G+^-1 - G^-1) with G = F^ - F equals the
    difference of the inverted edge vectors of F^ and F (sign flipped on
    n-edges). Equivalently: the duals of F and F^, both scaled by lam,
    differ by G^-1 up to one global translation.
    """
    lam = float(lam)
    G = Fhat.values - F.values
    n2 = quat.norm2(G)
    if np.any(n2 == 0.0):
        raise DegenerateNetError(
            tuple(int(v) for v in np.argwhere(n2 == 0.0)[0]),
            "transform touches the net",
        )
    Gi = quat.inv(G)
    worst = 0.0
    for direction, sign in (("m", 1.0), ("n", -1.0)):
        fi = _edge_inv(F.values, direction)
        hi = _edge_inv(Fhat.values, direction)
        dGi = Gi[1:, :] - Gi[:-1, :] if direction == "m" else Gi[:, 1:] - Gi[:, :-1]
        r = sign * lam * dGi - (hi - fi)
        scale = np.maximum(
            quat.norm(hi) + quat.norm(fi) + abs(lam) * quat.norm(dGi), 1e-300
        )
        worst = max(worst, float((quat.norm(r) / scale).max()))
    return worst


def christoffel_darboux_check(F, Fhat, lam, lambda_c=None):
    """Deviation of the dual pair from the Darboux relations.

    Builds F^c with scaling lambda_c (defaults to lam, the value the
    permutability theorem requires), positions the candidate dual of the
    transform as F^c + (F^ - F)^-1, and returns the worst of
      (i)  the Christoffel products of (F^, F^c + G^-1) against 1/lambda_c,
      (ii) the pair (F^c, F^c + G^-1) against the (+lam, -lam) cross ratios.
    A wrong lambda_c makes both deviations order one.
    """
    lam = float(lam)
    lc = lam if lambda_c is None else float(lambda_c)
    G = Fhat.values - F.values
    n2 = quat.norm2(G)
    if np.any(n2 == 0.0):
        raise DegenerateNetError(
            tuple(int(v) for v in np.argwhere(n2 == 0.0)[0]),
            "transform touches the net",
        )
    Fc = christoffel(F, ChristoffelParams(lc))
    Hc = Fc.values + quat.inv(G)

    worst = 0.0
    for direction, sign in (("m", 1.0), ("n", -1.0)):
        if direction == "m":
            dH = Fhat.values[1:, :] - Fhat.values[:-1, :]
            dHc = Hc[1:, :] - Hc[:-1, :]
        else:
            dH = Fhat.values[:, 1:] - Fhat.values[:, :-1]
            dHc = Hc[:, 1:] - Hc[:, :-1]
        prod = lc * quat.mul(dH, dHc)
        prod[..., 0] -= sign
        worst = max(worst, float(quat.norm(prod).max()))

    pair = max(
        _pair_deviation(Fc.values, Hc, lam, "m"),
        _pair_deviation(Fc.values, Hc, lam, "n"),
    ) / max(1.0, abs(lam))
    return max(worst, pair)
