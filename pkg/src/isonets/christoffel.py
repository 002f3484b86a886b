"""Christoffel duality for quaternionic nets.

The dual net integrates the edgewise increments

    dF^c = +(1/lambda_c) (dF)^-1    along m-edges,
    dF^c = -(1/lambda_c) (dF)^-1    along n-edges,

which close around every elementary quadrilateral exactly when the net is
isothermic. Integration runs on the open cover of one period; wrap flags
survive only when the dual increments themselves close up around the period,
otherwise the flag is dropped and the seam defect reported as monodromy.
"""

from dataclasses import dataclass

import numpy as np

from . import quat
from .errors import DegenerateNetError, NotIntegrableError
from .records import TransformRecord

__all__ = [
    "ChristoffelParams", "christoffel",
    "closing_residual", "dual_involution_check",
]

# closing residuals are gated against this multiple of the mean reciprocal
# edge length; monodromy against this multiple of the dual extent
NOT_INTEGRABLE_SCALE = 1e-6
PERIODIC_RTOL = 1e-8


@dataclass(frozen=True)
class ChristoffelParams:
    lambda_c: float
    base_index: tuple = (0, 0)
    base_value: object = None  # quaternion the dual takes at base_index

    def __post_init__(self):
        if self.lambda_c == 0:
            raise ValueError("lambda_c must be nonzero")


def _edge_inverses(edges, direction):
    """Invert edge vectors, flagging exactly degenerate edges."""
    n2 = quat.norm2(edges)
    if np.any(n2 == 0.0):
        where = np.argwhere(n2 == 0.0)[0]
        raise DegenerateNetError(
            tuple(int(v) for v in where),
            f"zero {direction}-edge, dual increment undefined",
        )
    return quat.inv(edges)


def _open_cover_increments(values):
    """Inverted edge vectors on the open cover: (em_inv, en_inv)."""
    em = values[1:, :] - values[:-1, :]
    en = values[:, 1:] - values[:, :-1]
    return _edge_inverses(em, "m"), _edge_inverses(en, "n"), em, en


def _closing(em_inv, en_inv):
    # a^-1 - b^-1 + c^-1 - d^-1 around (m,n): a, b, c, d run counterclockwise
    # from the m-edge at (m,n); c and d enter with reversed orientation.
    return em_inv[:, :-1] - en_inv[1:, :] - em_inv[:, 1:] + en_inv[:-1, :]


def closing_residual(net):
    """Map from open-cover quadrilateral label (m, n) to the norm of the
    dual closing defect. All zero iff the dual increments integrate."""
    em_inv, en_inv, _, _ = _open_cover_increments(net.values)
    res = quat.norm(_closing(em_inv, en_inv))
    w = net.window
    return {
        (w.m0 + i, w.n0 + j): float(res[i, j])
        for i in range(w.M - 1)
        for j in range(w.N - 1)
    }


def christoffel(net, params, not_integrable_scale=NOT_INTEGRABLE_SCALE,
                periodic_rtol=PERIODIC_RTOL):
    """Christoffel transform of an isothermic net.

    Returns a Net carrying a TransformRecord with the closing and path
    independence residuals, plus seam monodromy for wrapped inputs.
    """
    lam = float(params.lambda_c)
    F = net.values
    M, N = net.window.M, net.window.N
    em_inv, en_inv, em, en = _open_cover_increments(F)

    closing = quat.norm(_closing(em_inv, en_inv))
    inv_lengths = np.concatenate(
        [1.0 / quat.norm(em).ravel(), 1.0 / quat.norm(en).ravel()]
    )
    gate = not_integrable_scale * float(inv_lengths.mean())
    closing_max = float(closing.max()) if closing.size else 0.0
    if closing_max > gate:
        i, j = np.unravel_index(int(np.argmax(closing)), closing.shape)
        raise NotIntegrableError(
            closing_max, (net.window.m0 + int(i), net.window.n0 + int(j))
        )

    dm = em_inv / lam
    dn = -en_inv / lam

    # row-first integration is the result; column-first only feeds the record
    Fc = np.zeros((M, N, 4))
    Fc[1:, 0] = np.cumsum(dm[:, 0], axis=0)
    Fc[:, 1:] = Fc[:, :1] + np.cumsum(dn, axis=1)

    alt = np.zeros((M, N, 4))
    alt[0, 1:] = np.cumsum(dn[0], axis=0)
    alt[1:, :] = alt[:1, :] + np.cumsum(dm, axis=0)

    flat = Fc.reshape(-1, 4)
    extent = float(np.linalg.norm(flat.max(axis=0) - flat.min(axis=0)))
    denom = extent if extent > 0 else 1.0
    residuals = {
        "closing_max": closing_max,
        "path_independence": float(quat.norm(Fc - alt).max() / denom),
    }

    wrap_m, wrap_n = net.window.wrap_m, net.window.wrap_n
    if wrap_m:
        seam_inv = _edge_inverses(F[0, :] - F[-1, :], "m")
        loop = dm.sum(axis=0) + seam_inv / lam
        mono = float(quat.norm(loop).max())
        residuals["monodromy_m"] = mono
        wrap_m = mono <= periodic_rtol * denom
    if wrap_n:
        seam_inv = _edge_inverses(F[:, 0] - F[:, -1], "n")
        loop = dn.sum(axis=1) - seam_inv / lam
        mono = float(quat.norm(loop).max())
        residuals["monodromy_n"] = mono
        wrap_n = mono <= periodic_rtol * denom

    if params.base_value is None:
        base = np.zeros(4)
    else:
        base = np.asarray(params.base_value, dtype=np.float64).reshape(4)
    i, j = net.window.index(*params.base_index)
    Fc = Fc + (base - Fc[i, j])

    record = TransformRecord(
        kind="christoffel",
        parameters={
            "lambda_c": lam,
            "base_index": [int(params.base_index[0]), int(params.base_index[1])],
            "base_value": [float(v) for v in base],
        },
        residuals=residuals,
    )
    return net.with_values(Fc, wrap_m=wrap_m, wrap_n=wrap_n, record=record)


def dual_involution_check(net, lambda_c):
    """Max relative deviation of the twice-dualized net from the original.

    The double dual agrees with the input up to translation; the mean
    difference absorbs the translational freedom.
    """
    params = ChristoffelParams(lambda_c)
    twice = christoffel(christoffel(net, params), params)
    d = twice.values - net.values
    d = d - d.reshape(-1, 4).mean(axis=0)
    denom = net.diameter()
    return float(quat.norm(d).max() / (denom if denom > 0 else 1.0))
