"""Exception types raised by minkval."""


class GeometryError(Exception):
    """Base class for all minkval errors."""


class EmptyInputError(GeometryError, ValueError):
    pass


class EmptyBodyError(GeometryError, ValueError):
    pass


class InvalidParamsError(GeometryError, ValueError):
    pass


class SingularMatrixError(GeometryError, ValueError):
    pass


class OriginNotInteriorError(GeometryError, ValueError):
    """The origin is not an interior point, so the polar body is unbounded."""


class DegenerateRadialError(GeometryError, ValueError):
    pass


class InvalidDimensionError(GeometryError, ValueError):
    pass


class WrongStratumError(GeometryError, ValueError):
    """A dimension-stratified law was applied to a body outside its stratum."""


class DegenerateBodyError(GeometryError, ValueError):
    """An operation that needs a full-dimensional body got a flat one."""


class PolytopeFormatError(GeometryError, ValueError):
    pass


class CrossCheckError(GeometryError, AssertionError):
    """Two independent evaluation routes disagreed."""
