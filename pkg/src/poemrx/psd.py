"""Noise power spectral densities tagged with their physical domain.

A PSD only means something together with its unit (V^2/Hz, m^2/Hz,
rad^2/Hz or A^2/Hz).  Carrying the domain with the value makes
cross-domain addition a hard error instead of a silent unit bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import DomainMismatch

ArrayLike = Union[float, np.ndarray]


class PsdDomain(Enum):
    VOLTAGE = "V^2/Hz"
    DISPLACEMENT = "m^2/Hz"
    PHASE = "rad^2/Hz"
    CURRENT = "A^2/Hz"


@dataclass(frozen=True)
class NoisePsd:
    """A nonnegative one-sided PSD value bound to its domain."""

    value: ArrayLike
    domain: PsdDomain

    def __post_init__(self):
        if not isinstance(self.domain, PsdDomain):
            raise DomainMismatch(f"not a PSD domain: {self.domain!r}")
        if np.any(np.asarray(self.value) < 0):
            raise ValueError("PSD values must be nonnegative")

    def _check(self, other: "NoisePsd") -> None:
        if not isinstance(other, NoisePsd):
            raise DomainMismatch(f"cannot combine NoisePsd with {type(other).__name__}")
        if other.domain is not self.domain:
            raise DomainMismatch(
                f"PSD domains differ: {self.domain.value} vs {other.domain.value}"
            )

    def __add__(self, other: "NoisePsd") -> "NoisePsd":
        self._check(other)
        return NoisePsd(self.value + other.value, self.domain)

    def scaled(self, factor: ArrayLike) -> "NoisePsd":
        """Multiply by a nonnegative dimensionless factor."""
        if np.any(np.asarray(factor) < 0):
            raise ValueError("PSD scale factor must be nonnegative")
        return NoisePsd(self.value * factor, self.domain)

    def require(self, domain: PsdDomain) -> ArrayLike:
        """Return the bare value after asserting the expected domain."""
        if self.domain is not domain:
            raise DomainMismatch(
                f"expected a {domain.value} PSD, got {self.domain.value}"
            )
        return self.value


def voltage_psd(value: ArrayLike) -> NoisePsd:
    return NoisePsd(value, PsdDomain.VOLTAGE)


def displacement_psd(value: ArrayLike) -> NoisePsd:
    return NoisePsd(value, PsdDomain.DISPLACEMENT)


def phase_psd(value: ArrayLike) -> NoisePsd:
    return NoisePsd(value, PsdDomain.PHASE)
