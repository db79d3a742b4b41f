"""Exception and warning types shared across the package.

Exit-code mapping used by the CLI:
  2 usage (argparse), 3 config validation, 4 numeric domain, 5 I/O.
"""


class PoemrxError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(PoemrxError):
    """Configuration file cannot be parsed or fails validation."""

    exit_code = 3


class ParseError(ConfigError):
    """Config file is not syntactically valid key-value text."""


class ValidationError(ConfigError):
    """A config value violates a documented invariant."""


class DomainError(PoemrxError):
    """A computation was requested outside its numeric domain."""

    exit_code = 4


class NonPhysicalCoupling(DomainError):
    """Electromechanical coupling coefficient outside its physical range."""


class TangentPole(DomainError):
    """Drive frequency sits on a tangent pole of the film response."""


class ResonanceSingularity(DomainError):
    """Undamped film model diverges; the damped model must be used."""


class DegenerateCavity(DomainError):
    """Two-mirror cavity denominator vanished (exactly resonant, lossless)."""


class DomainMismatch(DomainError):
    """Arithmetic attempted between noise PSDs of different domains."""


class ZeroNoise(DomainError):
    """SNR requested with zero total noise and nonzero signal."""


class ZeroTransfer(DomainError):
    """Minimum detectable signal requested with a zero transfer function."""


class IoError(PoemrxError):
    """Output path could not be written."""

    exit_code = 5


class ApproximationDomain(UserWarning):
    """A closed-form approximation is being used outside its safe window."""


class ThinFilmWarning(UserWarning):
    """Film geometry is too thick for the one-dimensional model."""


class SidebandLinearization(UserWarning):
    """Mirror modulation depth too large for first-order sidebands."""


class InsufficientBits(UserWarning):
    """Too few bit errors observed for a trustworthy BER estimate."""


class BandwidthRange(UserWarning):
    """Sweep bandwidth outside the validated 1 kHz .. 10 MHz range."""
