"""Exception types shared across the toolkit."""


class CalibrationError(Exception):
    """Base class for all domain errors raised by this package."""


class DepthZero(CalibrationError):
    """A 3D point lies on a camera's principal plane (projective depth ~ 0)."""


class SingularIntrinsics(CalibrationError):
    """Intrinsic parameters are invalid (non-positive focal length or non-finite entry)."""


class ZeroTensor(CalibrationError):
    """A trifocal tensor with all 27 entries zero cannot be normalized or transformed."""


class NotNormalized(CalibrationError):
    """Constraint evaluation requires a unit-Frobenius-norm tensor."""


class DegenerateCloud(CalibrationError):
    """All points in a view coincide; similarity normalization is undefined."""


class TooFewTriples(CalibrationError):
    """Fewer correspondences than the linear estimator's minimum (7 triples)."""


class TooFewPairs(CalibrationError):
    """Fewer correspondences than the eight-point algorithm's minimum."""


class IllConditioned(CalibrationError):
    """Design-matrix conditioning indicates near-degenerate geometry."""


class TransferSingular(CalibrationError):
    """Point transfer is rank-deficient (point at an epipole or zero system)."""


class EmptyResiduals(CalibrationError):
    """A robust score was requested for an empty residual list."""


class AllCandidatesFailed(CalibrationError):
    """Every per-tensor calibration candidate raised; no model to select."""


class DegenerateEssential(CalibrationError):
    """Essential matrix has a vanishing second singular value."""


class NoConvergence(CalibrationError):
    """Solver hit the iteration cap (reported via flags, raised only on request)."""


class SamplingExhausted(CalibrationError):
    """Scene generation rejected too many samples; configuration is infeasible."""


class SchemaError(CalibrationError):
    """A correspondence file violates the schema; message carries the field path."""
