"""Exception types shared across the package."""


class QuatwaveError(Exception):
    """Base class for all library-specific errors."""


class SingularQuaternion(QuatwaveError):
    """Raised when inverting (or decomposing) a quaternion with vanishing norm."""


class EmptyRegion(QuatwaveError):
    """Raised when a truncation region yields no quadrature nodes."""


class LatticeMismatch(QuatwaveError):
    """Raised when two sampled fields do not share the same lattice."""


class DomainMismatch(QuatwaveError):
    """Raised when an operation receives a field in the wrong domain
    (position vs frequency)."""


class InadmissibleWavelet(QuatwaveError):
    """Raised when a transform is attempted with a wavelet that fails the
    admissibility test."""


class QuadratureMismatch(QuatwaveError):
    """Raised when a coefficient table and a quadrature disagree."""


class NotOrthonormal(QuatwaveError):
    """Raised when a basis handed to the quaternionic lift is not orthonormal
    on its lattice."""


class StructureViolation(QuatwaveError):
    """Raised when a 2x2 complex matrix expected to be a quaternion breaks the
    [[a, -conj(b)], [b, conj(a)]] entry structure."""
