"""Exception hierarchy shared by all ddchirp modules."""


class DDChirpError(Exception):
    """Base class for all ddchirp errors."""


class InvalidGrid(DDChirpError):
    """Grid parameters violate a validity rule (coprimality, crystallization)."""


class NotInvertible(DDChirpError):
    """Requested a modular inverse of a non-coprime element."""


class TooManyRoots(DDChirpError):
    """Asked for more roots than exist for the grid."""


class OutOfRange(DDChirpError):
    """Integer argument outside its contractual range."""


class InvalidRoot(DDChirpError):
    """Root index not coprime to the sequence length."""


class InvalidShift(DDChirpError):
    """Shift not coprime to both grid dimensions."""


class LengthMismatch(DDChirpError):
    """Time-domain signal length is not M*N."""


class ShapeMismatch(DDChirpError):
    """Arrays come from incompatible grids."""


class NoIntersection(DDChirpError):
    """Single-user line intersection is not a valid root."""


class EmptyCandidateSet(DDChirpError):
    """Multi-user candidate pruning left no roots."""


class UnknownRoot(DDChirpError):
    """Requested a root absent from a sensing matrix."""


class KTooLarge(DDChirpError):
    """More detections requested than root blocks available."""


class InvalidRollOff(DDChirpError):
    """RRC roll-off outside [0, 1]."""


class ConfigError(DDChirpError):
    """Experiment configuration violates the schema; message names the field path."""


class MatrixTooLarge(DDChirpError):
    """Sensing matrix would exceed the configured entry cap."""
