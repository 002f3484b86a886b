"""Batched quaternion kernels.

Two interchangeable backends: numba-jitted loops (default when numba imports)
and pure numpy ufunc chains. Set ISONETS_NO_NUMBA=1 before import to force
the numpy path; `backend()` reports which one is live.

All kernels take float64 arrays of shape (n, 4) with components ordered
(w, x, y, z) and do no validation; the public wrappers in `quat` and
`crossratio` own the error checking.
"""

import os

import numpy as np

try:
    import numba as nb

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    nb = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("ISONETS_NO_NUMBA", "") not in ("1", "true", "yes")


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path

def _mul_np(a, b):
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def _inv_np(q):
    n2 = (q * q).sum(axis=-1, keepdims=True)
    return q * np.array([1.0, -1.0, -1.0, -1.0]) / n2


def _quad_ratio_np(p1, p2, p3, p4):
    return _mul_np(_mul_np(_mul_np(p1 - p2, _inv_np(p2 - p3)), p3 - p4), _inv_np(p4 - p1))


def _solve_fourth_np(ratio, q1, q2, q3):
    w = _mul_np(q1 - q2, _inv_np(q2 - q3))
    a = w.copy()
    a[..., 0] += ratio
    denom2 = (a * a).sum(axis=-1)
    rhs = _mul_np(w, q3) + ratio[..., None] * q1
    # an exactly singular denominator (solution at infinity) is reported
    # through denom2 = 0, not by dividing
    safe = np.where(denom2 > 0.0, denom2, 1.0)[..., None]
    ainv = a * np.array([1.0, -1.0, -1.0, -1.0]) / safe
    return _mul_np(ainv, rhs), denom2


# ---------------------------------------------------------------- numba path

if USE_NUMBA:

    @nb.njit(cache=True, inline="always")
    def _mul1(aw, ax, ay, az, bw, bx, by, bz):
        return (
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        )

    @nb.njit(cache=True, inline="always")
    def _inv1(w, x, y, z):
        n2 = w * w + x * x + y * y + z * z
        return (w / n2, -x / n2, -y / n2, -z / n2)

    @nb.njit(cache=True)
    def _mul_nb(a, b):
        out = np.empty_like(a)
        for i in range(a.shape[0]):
            w, x, y, z = _mul1(
                a[i, 0], a[i, 1], a[i, 2], a[i, 3], b[i, 0], b[i, 1], b[i, 2], b[i, 3]
            )
            out[i, 0] = w
            out[i, 1] = x
            out[i, 2] = y
            out[i, 3] = z
        return out

    @nb.njit(cache=True)
    def _inv_nb(q):
        out = np.empty_like(q)
        for i in range(q.shape[0]):
            w, x, y, z = _inv1(q[i, 0], q[i, 1], q[i, 2], q[i, 3])
            out[i, 0] = w
            out[i, 1] = x
            out[i, 2] = y
            out[i, 3] = z
        return out

    @nb.njit(cache=True)
    def _quad_ratio_nb(p1, p2, p3, p4):
        out = np.empty_like(p1)
        for i in range(p1.shape[0]):
            aw, ax, ay, az = (
                p1[i, 0] - p2[i, 0],
                p1[i, 1] - p2[i, 1],
                p1[i, 2] - p2[i, 2],
                p1[i, 3] - p2[i, 3],
            )
            bw, bx, by, bz = _inv1(
                p2[i, 0] - p3[i, 0],
                p2[i, 1] - p3[i, 1],
                p2[i, 2] - p3[i, 2],
                p2[i, 3] - p3[i, 3],
            )
            w, x, y, z = _mul1(aw, ax, ay, az, bw, bx, by, bz)
            w, x, y, z = _mul1(
                w, x, y, z,
                p3[i, 0] - p4[i, 0],
                p3[i, 1] - p4[i, 1],
                p3[i, 2] - p4[i, 2],
                p3[i, 3] - p4[i, 3],
            )
            bw, bx, by, bz = _inv1(
                p4[i, 0] - p1[i, 0],
                p4[i, 1] - p1[i, 1],
                p4[i, 2] - p1[i, 2],
                p4[i, 3] - p1[i, 3],
            )
            w, x, y, z = _mul1(w, x, y, z, bw, bx, by, bz)
            out[i, 0] = w
            out[i, 1] = x
            out[i, 2] = y
            out[i, 3] = z
        return out

    @nb.njit(cache=True)
    def _solve_fourth_nb(ratio, q1, q2, q3):
        out = np.empty_like(q1)
        denom2 = np.empty(q1.shape[0])
        for i in range(q1.shape[0]):
            bw, bx, by, bz = _inv1(
                q2[i, 0] - q3[i, 0],
                q2[i, 1] - q3[i, 1],
                q2[i, 2] - q3[i, 2],
                q2[i, 3] - q3[i, 3],
            )
            ww, wx, wy, wz = _mul1(
                q1[i, 0] - q2[i, 0],
                q1[i, 1] - q2[i, 1],
                q1[i, 2] - q2[i, 2],
                q1[i, 3] - q2[i, 3],
                bw, bx, by, bz,
            )
            r = ratio[i]
            aw = ww + r
            denom2[i] = aw * aw + wx * wx + wy * wy + wz * wz
            if denom2[i] > 0.0:
                iw, ix, iy, iz = _inv1(aw, wx, wy, wz)
            else:
                iw = ix = iy = iz = 0.0
            rw, rx, ry, rz = _mul1(ww, wx, wy, wz, q3[i, 0], q3[i, 1], q3[i, 2], q3[i, 3])
            rw += r * q1[i, 0]
            rx += r * q1[i, 1]
            ry += r * q1[i, 2]
            rz += r * q1[i, 3]
            w, x, y, z = _mul1(iw, ix, iy, iz, rw, rx, ry, rz)
            out[i, 0] = w
            out[i, 1] = x
            out[i, 2] = y
            out[i, 3] = z
        return out, denom2


# ------------------------------------------------------------------ dispatch

def _flat(*arrays):
    # broadcast to a common (..., 4) shape, then flatten to (n, 4) C-order
    bc = np.broadcast_arrays(*arrays)
    shape = bc[0].shape
    return [np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 4) for a in bc], shape


def mul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if USE_NUMBA:
        (fa, fb), shape = _flat(a, b)
        return _mul_nb(fa, fb).reshape(shape)
    return _mul_np(a, b)


def inv(q):
    q = np.asarray(q, dtype=np.float64)
    if USE_NUMBA:
        (fq,), shape = _flat(q)
        return _inv_nb(fq).reshape(shape)
    return _inv_np(q)


def quad_ratio(p1, p2, p3, p4):
    p1, p2, p3, p4 = (np.asarray(p, dtype=np.float64) for p in (p1, p2, p3, p4))
    if USE_NUMBA:
        (f1, f2, f3, f4), shape = _flat(p1, p2, p3, p4)
        return _quad_ratio_nb(f1, f2, f3, f4).reshape(shape)
    return _quad_ratio_np(p1, p2, p3, p4)


def solve_fourth(ratio, q1, q2, q3):
    """Solve for the fourth point of a quadruple at a prescribed real ratio.

    Returns (q4, denom2) where denom2 is the squared norm of the solve
    denominator, useful for conditioning checks. No singularity handling
    here; wrappers decide what "too small" means.
    """
    q1, q2, q3 = (np.asarray(p, dtype=np.float64) for p in (q1, q2, q3))
    shape = np.broadcast_shapes(q1.shape, q2.shape, q3.shape)
    ratio = np.broadcast_to(np.asarray(ratio, dtype=np.float64), shape[:-1])
    if USE_NUMBA:
        (f1, f2, f3), _ = _flat(
            np.broadcast_to(q1, shape), np.broadcast_to(q2, shape), np.broadcast_to(q3, shape)
        )
        fr = np.ascontiguousarray(ratio, dtype=np.float64).reshape(-1)
        out, denom2 = _solve_fourth_nb(fr, f1, f2, f3)
        return out.reshape(shape), denom2.reshape(shape[:-1])
    out, denom2 = _solve_fourth_np(
        np.asarray(ratio, dtype=np.float64),
        np.broadcast_to(q1, shape),
        np.broadcast_to(q2, shape),
        np.broadcast_to(q3, shape),
    )
    return out, denom2


def warmup():
    """Trigger jit compilation of every kernel on tiny inputs."""
    a = np.array([[1.0, 0.1, 0.2, 0.3]])
    b = np.array([[0.5, -0.2, 0.1, 0.4]])
    c = np.array([[0.1, 0.7, -0.3, 0.2]])
    d = np.array([[-0.4, 0.2, 0.5, -0.1]])
    mul(a, b)
    inv(a)
    quad_ratio(a, b, c, d)
    solve_fourth(np.array([0.5]), a, b, c)
