"""Quaternion arithmetic on float64 arrays of shape (..., 4).

Component order is (w, x, y, z): scalar part first, imaginary part
(x, y, z) identified with R^3. Everything broadcasts.
"""

import numpy as np

from . import _kernels
from .errors import ZeroQuaternionError

__all__ = [
    "quat", "from_vec3", "to_vec3", "ONE", "I", "J", "K",
    "mul", "conj", "inv", "norm", "norm2", "re", "im", "imnorm",
    "is_real", "is_imaginary", "dependent2", "dependent3", "dependent4",
]

_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def quat(w=0.0, x=0.0, y=0.0, z=0.0):
    return np.array([w, x, y, z], dtype=np.float64)


def from_vec3(v):
    """Embed a 3-vector (or batch) as a pure imaginary quaternion."""
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros(v.shape[:-1] + (4,))
    out[..., 1:] = v
    return out


def to_vec3(q):
    return np.asarray(q, dtype=np.float64)[..., 1:]


ONE = quat(1.0)
I = quat(0.0, 1.0)
J = quat(0.0, 0.0, 1.0)
K = quat(0.0, 0.0, 0.0, 1.0)
for _c in (ONE, I, J, K):
    _c.flags.writeable = False


def mul(p, q):
    return _kernels.mul(p, q)


def conj(q):
    return np.asarray(q, dtype=np.float64) * _CONJ_SIGNS


def norm2(q):
    q = np.asarray(q, dtype=np.float64)
    return (q * q).sum(axis=-1)


def norm(q):
    return np.sqrt(norm2(q))


def inv(q):
    """Multiplicative inverse, conj(q)/|q|^2. Raises on any zero entry."""
    n2 = norm2(q)
    if np.any(n2 == 0.0):
        raise ZeroQuaternionError(0.0)
    return _kernels.inv(q)


def re(q):
    return np.asarray(q, dtype=np.float64)[..., 0]


def im(q):
    return np.asarray(q, dtype=np.float64)[..., 1:]


def imnorm(q):
    return np.sqrt((im(q) ** 2).sum(axis=-1))


def is_real(q, tol=1e-12):
    q = np.asarray(q, dtype=np.float64)
    scale = np.maximum(norm(q), 1.0)
    return imnorm(q) <= tol * scale


def is_imaginary(q, tol=1e-12):
    q = np.asarray(q, dtype=np.float64)
    scale = np.maximum(norm(q), 1.0)
    return np.abs(re(q)) <= tol * scale


def _dep_scale(*qs):
    # products of norms, promoting zeros to 1 so all-zero input counts as
    # dependent rather than tripping on a 0 threshold
    s = np.ones(np.broadcast_shapes(*(norm2(q).shape for q in qs)))
    for q in qs:
        n = norm(q)
        s = s * np.where(n == 0.0, 1.0, n)
    return s


def dependent2(a, b, tol=1e-9):
    """True where a and b are real linearly dependent.

    Uses the reality of a*conj(b): two quaternions are parallel over R
    exactly when a conj(b) equals its own conjugate b conj(a).
    """
    r = mul(a, conj(b)) - mul(b, conj(a))
    return norm(r) <= tol * _dep_scale(a, b)


def dependent3(a, b, c, tol=1e-9):
    """True where a, b, c span at most a 2-plane through the origin.

    Characterized by a conj(b) c being symmetric under reversal:
    a conj(b) c = c conj(b) a.
    """
    r = mul(mul(a, conj(b)), c) - mul(mul(c, conj(b)), a)
    return norm(r) <= tol * _dep_scale(a, b, c)


def dependent4(a, b, c, d, tol=1e-9):
    """True where a, b, c, d fail to span R^4.

    The bracket a conj(b) c conj(d) - conj(d) c conj(b) a has real part
    equal to twice the determinant of the 4x4 component matrix, so the
    quadruple is dependent exactly when that real part vanishes.
    """
    p = mul(mul(mul(a, conj(b)), c), conj(d)) - mul(mul(mul(conj(d), c), conj(b)), a)
    return np.abs(re(p)) <= tol * _dep_scale(a, b, c, d)
