"""Exception and warning types shared across the toolkit."""


class SoftarmError(Exception):
    """Base class for all toolkit errors."""


class DegenerateData(SoftarmError):
    """Input data carries no usable signal (e.g. all-zero deflections)."""


class InvalidStretch(SoftarmError):
    """Uniaxial stretch ratio must be strictly positive."""


class RankDeficient(SoftarmError):
    """Least-squares design matrix is numerically rank deficient."""


class NoConvergence(SoftarmError):
    """Iterative solver failed to converge within its iteration budget."""


class NonPhysicalMaterial(SoftarmError):
    """Effective elastic modulus is zero or negative."""


class EmptyTable(SoftarmError):
    """Lookup table has no rows."""


class CalibrationFailure(SoftarmError):
    """Surrogate model calibration constraints cannot be satisfied."""


class ChordTooLong(SoftarmError):
    """A fold chord is longer than the pipe diameter it must span."""


class ZeroArea(SoftarmError):
    """Contact patch area is zero or negative."""


class EmptyRange(SoftarmError):
    """No infill rate satisfies all feasibility constraints."""


class ParseError(SoftarmError):
    """Input file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line is not None:
            prefix += f"{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class NonPhysicalWarning(UserWarning):
    """Result is retained but is outside the physically meaningful range."""


class OutOfEnvelopeWarning(UserWarning):
    """Inputs are outside the validated operating envelope of a model."""


class LargeDeflectionWarning(UserWarning):
    """Linear beam theory applied outside its small-deflection range."""
