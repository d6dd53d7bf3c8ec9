"""
Exception hierarchy for the photonics library.

All errors derive from ValueError so callers that only care about
"bad input" can keep catching that.
"""


class PhotonicsError(ValueError):
    """Base class for invalid states, configurations and bases."""


class InvalidStateError(PhotonicsError):
    """M&M ordering violated or negative photon numbers."""


class ConfigurationError(PhotonicsError):
    """Transmittance outside [0, 1] or malformed interferometer description."""


class BasisError(PhotonicsError):
    """State outside the basis truncation, or mismatched bases."""


class IndexRangeError(PhotonicsError):
    """Loss index k, l or l' outside its allowed range."""


class NonUnitaryError(PhotonicsError):
    """Beam-splitter coefficients with |t|^2 + |r|^2 != 1."""


class UnknownModeError(PhotonicsError):
    """Mode identifier not one of a, b, va, vb."""


class OracleGuardError(PhotonicsError):
    """Photon number too large for the dense four-mode simulation."""


class OracleConsistencyError(PhotonicsError):
    """Phase-then-loss and loss-then-phase orderings disagree."""


class DensityMatrixError(PhotonicsError):
    """Trace, Hermiticity or positivity invariant violated."""


class SweepSpecError(PhotonicsError):
    """Invalid sweep range, grid or loss value."""
