"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end.
"""

__all__ = [
    "PotapovError",
    "DimensionMismatch",
    "NotPSD",
    "InvalidSignature",
    "NotPotapov",
    "NotContractive",
    "NotStrict",
    "SingularPG",
    "DegreeExceeded",
    "InvalidFactorData",
    "InvalidParam",
    "SingularAtOrigin",
    "SingularDenominator",
    "OutsideCommonDomain",
    "SingularRadius",
    "SingularTransfer",
    "AllSamplesSingular",
]


class PotapovError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DimensionMismatch(PotapovError, ValueError):
    exit_code = 20


class NotPSD(PotapovError, ValueError):
    """A Hermitian matrix has an eigenvalue below ``-psd_eig``."""

    exit_code = 20


class InvalidSignature(PotapovError, ValueError):
    exit_code = 20


class NotPotapov(PotapovError, ValueError):
    """The sequence is not J-Potapov (block Toeplitz matrix not J-contractive)."""

    exit_code = 20


class NotContractive(PotapovError, ValueError):
    exit_code = 20


class NotStrict(PotapovError, ValueError):
    """An operation requires a strict (nondegenerate) sequence."""

    exit_code = 40


class SingularPG(PotapovError, ValueError):
    exit_code = 20


class DegreeExceeded(PotapovError, ValueError):
    exit_code = 20


class InvalidFactorData(PotapovError, ValueError):
    exit_code = 20


class InvalidParam(PotapovError, ValueError):
    exit_code = 20


class SingularAtOrigin(PotapovError, ValueError):
    exit_code = 20


class SingularDenominator(PotapovError, ValueError):
    exit_code = 30


class OutsideCommonDomain(PotapovError, ValueError):
    """The point lies outside the common holomorphy set of all solutions."""

    exit_code = 30


class SingularRadius(PotapovError, ValueError):
    exit_code = 30


class SingularTransfer(PotapovError, ValueError):
    exit_code = 30


class AllSamplesSingular(PotapovError, ValueError):
    exit_code = 30
