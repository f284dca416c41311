"""Exception types shared across the package."""


class FieldcommError(Exception):
    """Base class for all package errors."""


class ProfileError(FieldcommError):
    """Malformed piecewise-linear profile."""


class QuadratureError(FieldcommError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class CavityTruncationError(FieldcommError):
    """Estimated cavity mode tail exceeds the requested tolerance."""


class KernelMismatchError(FieldcommError):
    """Inner product requested between incompatible field kernels."""


class DegenerateGeometryError(FieldcommError):
    """Profile pair cannot sense: the coupling integral vanishes."""


class GeometryError(FieldcommError):
    """Protocol geometry violates a precondition (timing, alignment, walls)."""


class UnitarityError(FieldcommError):
    """Gate application changed the state norm beyond tolerance."""


class PSDViolationError(FieldcommError):
    """Reduced density matrix has an eigenvalue below -1e-10."""


class BoundViolationError(FieldcommError):
    """An exact fidelity fell below the guaranteed lower bound."""


class AuditError(FieldcommError):
    """An audit inequality failed; message identifies which and by how much."""
