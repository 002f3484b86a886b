"""Exception hierarchy for geometric failure modes.

Every error that reports a numeric residual carries it as an attribute so
callers can log or compare without parsing messages.
"""


class GeometryError(ValueError):
    """Base class for all geometric and numeric failures in this package."""


class ZeroQuaternionError(GeometryError):
    """Inversion of a quaternion with vanishing norm."""

    def __init__(self, norm=0.0):
        self.norm = float(norm)
        super().__init__(f"cannot invert quaternion of norm {self.norm!r}")


class DegenerateQuadrupleError(GeometryError):
    """Two points of a quadruple that must stay distinct coincide."""

    def __init__(self, which, msg=None):
        self.which = which
        super().__init__(msg or f"coincident points in quadruple: {which}")


class DegenerateOrbitError(GeometryError):
    """Cross ratio sits on a pole of the permutation-orbit maps."""

    def __init__(self, value):
        self.value = value
        super().__init__(f"orbit undefined at cross ratio {value!r}")


class NonRealizableDistancesError(GeometryError):
    """A distance table admits no point configuration (negated Gram
    determinant significantly below zero)."""

    def __init__(self, value):
        self.value = float(value)
        super().__init__(f"distance table not realizable, -det = {self.value!r}")


class SolveDegenerateError(GeometryError):
    """The linear solve for a missing quadruple vertex is singular."""

    def __init__(self, denom=0.0):
        self.denom = float(denom)
        super().__init__(f"vertex solve is singular (|denominator| = {self.denom:.3e})")


class NotConcircularError(GeometryError):
    """Four points required to lie on a common circle do not."""

    def __init__(self, imag):
        self.imag = float(imag)
        super().__init__(f"points are not concircular (|Im| = {self.imag:.3e})")


class SphereFitError(GeometryError):
    """Point set admits no 2-sphere within tolerance."""

    def __init__(self, residual, msg="points are not cospherical"):
        self.residual = float(residual)
        super().__init__(f"{msg} (residual = {self.residual:.3e})")


class DegenerateNetError(GeometryError):
    """A net has a collapsed edge or quadrilateral at some index."""

    def __init__(self, index, msg="degenerate quadrilateral or edge"):
        self.index = index
        super().__init__(f"{msg} at {index}")


class NotIntegrableError(GeometryError):
    """Edge-wise dual increments do not close around faces, so no dual
    net exists (path-dependent integration)."""

    def __init__(self, residual, index=None):
        self.residual = float(residual)
        self.index = index
        where = f" at {index}" if index is not None else ""
        super().__init__(f"dual increments do not close{where} (residual = {self.residual:.3e})")


class LatticeConsistencyError(GeometryError):
    """Propagation from different parents disagreed beyond tolerance,
    which indicates a broken precondition on the input net."""

    def __init__(self, index, deviation):
        self.index = index
        self.deviation = float(deviation)
        super().__init__(
            f"inconsistent propagation at {index} (deviation = {self.deviation:.3e})"
        )


class NotDarbouxPairError(GeometryError):
    """Two nets fail the edge cross-ratio relations of a Darboux pair."""

    def __init__(self, residual, msg="nets are not a Darboux pair"):
        self.residual = float(residual)
        super().__init__(f"{msg} (residual = {self.residual:.3e})")


class NotPeriodicError(GeometryError):
    """A transform of a wrapped net fails to close around the seam."""

    def __init__(self, monodromy):
        self.monodromy = float(monodromy)
        super().__init__(f"transform does not close around the seam (monodromy = {self.monodromy:.3e})")


class NetFormatError(ValueError):
    """Raised when a net document cannot be parsed or has a wrong version."""


class PoleError(GeometryError):
    """Stereographic projection hit the projection pole."""


class UndefinedCurvatureError(GeometryError):
    """The vertex center system has no unique solution, finite or infinite."""


class EmptyInitialSphereError(GeometryError):
    """Requested spectral parameter leaves no admissible seed sphere."""


class CmcVerificationError(GeometryError):
    """A constructed pair fails constant mean curvature verification."""

    def __init__(self, failure, residuals=None):
        self.failure = failure
        self.residuals = dict(residuals or {})
        super().__init__(f"cmc verification failed: {failure} {self.residuals!r}")
