"""Nets over rectangular windows of Z^2.

A Net stores one quaternion per lattice site of a window [m0, m0+M) x
[n0, n0+N). Wrap flags mark periodic directions; the seam is represented by
the flag, not by duplicated columns, so transforms and predicates see the
seam quadrilaterals exactly once.

Elementary quadrilateral vertex order is fixed everywhere to

    (F_{m,n}, F_{m+1,n}, F_{m+1,n+1}, F_{m,n+1})

and every downstream cross-ratio formula relies on it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quat
from .crossratio import _complexify
from ._kernels import quad_ratio as _qr
from .errors import DegenerateNetError, PoleError
from .records import TransformRecord

__all__ = [
    "LatticeWindow", "Net",
    "elementary_cross_ratios", "is_curvature_line_net", "is_isothermic",
    "gen_planar_grid", "gen_cylinder", "gen_clifford_torus",
]


@dataclass(frozen=True)
class LatticeWindow:
    m0: int
    n0: int
    M: int
    N: int
    wrap_m: bool = False
    wrap_n: bool = False

    def __post_init__(self):
        if self.M < 2 or self.N < 2:
            raise ValueError("window must be at least 2x2")

    def contains(self, m, n):
        return (self.m0 <= m < self.m0 + self.M) and (self.n0 <= n < self.n0 + self.N)

    def index(self, m, n):
        """Array indices of lattice site (m, n), wrap-aware."""
        i, j = m - self.m0, n - self.n0
        if self.wrap_m:
            i %= self.M
        if self.wrap_n:
            j %= self.N
        if not (0 <= i < self.M and 0 <= j < self.N):
            raise IndexError(f"site ({m}, {n}) outside window")
        return i, j

    def sites(self):
        for i in range(self.M):
            for j in range(self.N):
                yield self.m0 + i, self.n0 + j

    def dual_indices(self):
        """Lattice labels (m, n) of the elementary quadrilaterals.

        The quadrilateral at (m, n) has corners (m,n), (m+1,n), (m+1,n+1),
        (m,n+1). Wrapped directions contribute their seam quadrilaterals.
        """
        mm = self.M if self.wrap_m else self.M - 1
        nn = self.N if self.wrap_n else self.N - 1
        for i in range(mm):
            for j in range(nn):
                yield self.m0 + i, self.n0 + j

    def interior_sites(self):
        """Sites whose full 4-neighbor stencil stays in the window."""
        ms = range(self.m0, self.m0 + self.M) if self.wrap_m else range(self.m0 + 1, self.m0 + self.M - 1)
        ns = range(self.n0, self.n0 + self.N) if self.wrap_n else range(self.n0 + 1, self.n0 + self.N - 1)
        for m in ms:
            for n in ns:
                yield m, n


@dataclass
class Net:
    """Immutable map from a lattice window to quaternions.

    values has shape (M, N, 4), row index along m.
    """

    window: LatticeWindow
    values: np.ndarray
    record: TransformRecord | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != (self.window.M, self.window.N, 4):
            raise ValueError(
                f"values shape {v.shape} does not match window "
                f"{(self.window.M, self.window.N, 4)}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def point(self, m, n):
        i, j = self.window.index(m, n)
        return self.values[i, j]

    def with_values(self, values, wrap_m=None, wrap_n=None, record=None):
        w = self.window
        return Net(
            LatticeWindow(
                w.m0, w.n0, w.M, w.N,
                w.wrap_m if wrap_m is None else wrap_m,
                w.wrap_n if wrap_n is None else wrap_n,
            ),
            values,
            record=record,
        )

    def diameter(self):
        """Bounding-box diagonal, the length scale for relative tolerances."""
        flat = self.values.reshape(-1, 4)
        return float(np.linalg.norm(flat.max(axis=0) - flat.min(axis=0)))

    def is_imaginary(self, tol=1e-9):
        return bool(np.all(np.abs(self.values[..., 0]) <= tol * max(self.diameter(), 1.0)))

    # ---------------------------------------------------------- bulk access

    def quad_corner_values(self):
        """Corner arrays (p1, p2, p3, p4), each (K, 4), over dual_indices()."""
        idx = list(self.window.dual_indices())
        p = np.empty((4, len(idx), 4))
        for k, (m, n) in enumerate(idx):
            p[0, k] = self.point(m, n)
            p[1, k] = self.point(m + 1, n)
            p[2, k] = self.point(m + 1, n + 1)
            p[3, k] = self.point(m, n + 1)
        return idx, p

    def edges(self, direction):
        """Index pairs ((m, n), (m', n')) of all lattice edges along
        direction 'm' or 'n', seam edges included when wrapped."""
        w = self.window
        out = []
        if direction == "m":
            mm = w.M if w.wrap_m else w.M - 1
            for i in range(mm):
                for j in range(w.N):
                    out.append(((w.m0 + i, w.n0 + j), (w.m0 + i + 1, w.n0 + j)))
        elif direction == "n":
            nn = w.N if w.wrap_n else w.N - 1
            for i in range(w.M):
                for j in range(nn):
                    out.append(((w.m0 + i, w.n0 + j), (w.m0 + i, w.n0 + j + 1)))
        else:
            raise ValueError("direction must be 'm' or 'n'")
        return out

    def edge_vectors(self, direction):
        """(tails, heads) stacked as (K, 4) arrays along a direction."""
        pairs = self.edges(direction)
        a = np.array([self.point(*p) for p, _ in pairs])
        b = np.array([self.point(*q) for _, q in pairs])
        return pairs, a, b


def _quad_ratio_batch(net):
    idx, p = net.quad_corner_values()
    d1 = quat.norm2(p[1] - p[2])
    d2 = quat.norm2(p[3] - p[0])
    bad = np.where((d1 == 0.0) | (d2 == 0.0))[0]
    if bad.size:
        raise DegenerateNetError(idx[bad[0]])
    return idx, _qr(p[0], p[1], p[2], p[3]), p


def elementary_cross_ratios(net):
    """Cross ratio of every elementary quadrilateral, keyed by DualIndex."""
    idx, q, _ = _quad_ratio_batch(net)
    re = q[:, 0]
    im = np.sqrt((q[:, 1:] ** 2).sum(axis=1))
    return {k: complex(r, i) for k, (r, i) in zip(idx, zip(re, im))}


def _quad_scale2(p):
    # per-quad squared diameter
    best = np.zeros(p.shape[1])
    for i in range(4):
        for j in range(i + 1, 4):
            best = np.maximum(best, quat.norm2(p[i] - p[j]))
    return np.maximum(best, 1.0)


def is_curvature_line_net(net, tol=1e-8):
    """All elementary quadrilaterals concircular with negative cross ratio."""
    _, q, p = _quad_ratio_batch(net)
    im = np.sqrt((q[:, 1:] ** 2).sum(axis=1))
    return bool(np.all(im <= tol * _quad_scale2(p)) and np.all(q[:, 0] < 0.0))


def is_isothermic(net, tol=1e-8):
    """All elementary cross ratios equal to -1."""
    _, q, p = _quad_ratio_batch(net)
    im = np.sqrt((q[:, 1:] ** 2).sum(axis=1))
    if not np.all(im <= tol * _quad_scale2(p)):
        return False
    return bool(np.all(np.abs(q[:, 0] + 1.0) <= tol))


# ------------------------------------------------------------- seed nets

def gen_planar_grid(M, N):
    """Unit grid in the (1, i) plane: F = m + n i. Isothermic."""
    vals = np.zeros((M, N, 4))
    m = np.arange(M)[:, None]
    n = np.arange(N)[None, :]
    vals[..., 0] = m
    vals[..., 1] = n
    return Net(LatticeWindow(0, 0, M, N), vals)


def gen_cylinder(M, N, r=1.0):
    """Discrete round cylinder in R^3, wrapped in m.

    Ring step and height step are matched (h = 2 r sin(pi/M)) so every
    elementary quadrilateral is a square in its plane, hence cross
    ratio -1.
    """
    if M < 3:
        raise ValueError("cylinder needs M >= 3")
    if r <= 0:
        raise ValueError("radius must be positive")
    h = 2.0 * r * np.sin(np.pi / M)
    t = 2.0 * np.pi * np.arange(M) / M
    vals = np.zeros((M, N, 4))
    vals[..., 1] = (r * np.cos(t))[:, None]
    vals[..., 2] = (r * np.sin(t))[:, None]
    vals[..., 3] = h * np.arange(N)[None, :]
    return Net(LatticeWindow(0, 0, M, N, wrap_m=True), vals)


def gen_clifford_torus(M, N):
    """Stereographic image in R^3 of the square torus in the unit 3-sphere.

    Sample points (cos a, sin a, cos b, sin b)/sqrt(2) at half-step angular
    offsets, then project from (0, 0, 0, 1). The projection is conformal,
    so cross ratios survive: constant -sin^2(pi/M)/sin^2(pi/N), equal to -1
    exactly when M = N. Wrapped in both directions.
    """
    if M < 3 or N < 3:
        raise ValueError("torus needs M, N >= 3")
    a = 2.0 * np.pi * np.arange(M) / M + np.pi / M
    b = 2.0 * np.pi * np.arange(N) / N + np.pi / N
    u1 = np.cos(a)[:, None] / np.sqrt(2.0) * np.ones(N)[None, :]
    u2 = np.sin(a)[:, None] / np.sqrt(2.0) * np.ones(N)[None, :]
    u3 = np.ones(M)[:, None] * np.cos(b)[None, :] / np.sqrt(2.0)
    u4 = np.ones(M)[:, None] * np.sin(b)[None, :] / np.sqrt(2.0)
    denom = 1.0 - u4
    if np.any(np.abs(denom) < 1e-12):
        raise PoleError("projection pole hit")
    vals = np.zeros((M, N, 4))
    vals[..., 1] = u1 / denom
    vals[..., 2] = u2 / denom
    vals[..., 3] = u3 / denom
    return Net(LatticeWindow(0, 0, M, N, wrap_m=True, wrap_n=True), vals)
