"""
Closed-form reduced density matrix of an M&M (or N00N) state after a phase
shift on arm b and beam-splitter loss in both arms.

Coherence placement (checked against the four-mode oracle): the family
carrying e^{-i(m-m')(phi + phi_b - phi_a)} sits at ket |m-l, m'-l'>,
bra |m'-l, m-l'>, where l photons were lost from arm a and l' from arm b.
Its Hermitian conjugate carries the opposite phase.
"""

import cmath
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .exceptions import ConfigurationError, IndexRangeError, InvalidStateError
from .fock import BasisState, DensityMatrix, FockBasis, gamma_coefficient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArmLoss:
    """
    Fictitious loss beam splitter in one arm.

    Attributes:
        transmittance: Power transmittance T in [0, 1]; the loss is R = 1 - T
        transmission_phase: Phase of t = sqrt(T) exp(i phi_u), radians
        reflection_phase: Phase of r = sqrt(R) exp(i psi_u), radians
    """

    transmittance: float = 1.0
    transmission_phase: float = 0.0
    reflection_phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0 or math.isnan(self.transmittance):
            raise ConfigurationError(f"Transmittance must lie in [0, 1], got {self.transmittance}")

    @classmethod
    def from_loss(cls, loss: float, **phases) -> "ArmLoss":
        if not 0.0 <= loss <= 1.0:
            raise ConfigurationError(f"Loss must lie in [0, 1], got {loss}")
        return cls(transmittance=1.0 - loss, **phases)

    @property
    def reflectance(self) -> float:
        return 1.0 - self.transmittance

    @property
    def loss(self) -> float:
        return self.reflectance

    @property
    def t(self) -> complex:
        return math.sqrt(self.transmittance) * cmath.exp(1j * self.transmission_phase)

    @property
    def r(self) -> complex:
        return math.sqrt(self.reflectance) * cmath.exp(1j * self.reflection_phase)

    def to_dict(self) -> Dict:
        return {
            "transmittance": self.transmittance,
            "loss": self.loss,
            "transmission_phase": self.transmission_phase,
            "reflection_phase": self.reflection_phase,
        }


@dataclass(frozen=True)
class LossyInterferometer:
    """
    Full experiment description: |m::m'> input, arm losses, unknown phase on arm b.

    Attributes:
        m: Larger photon number of the M&M state
        m_prime: Smaller photon number (0 for a N00N state)
        loss_a: Delay-arm loss beam splitter
        loss_b: Long-arm loss beam splitter
        phi: Unknown phase accumulated on arm b, radians
    """

    m: int
    m_prime: int
    loss_a: ArmLoss = field(default_factory=ArmLoss)
    loss_b: ArmLoss = field(default_factory=ArmLoss)
    phi: float = 0.0

    def __post_init__(self):
        if self.m_prime < 0 or self.m <= self.m_prime:
            raise InvalidStateError(
                f"Interferometer needs m > m' >= 0, got m={self.m}, m'={self.m_prime}"
            )

    @classmethod
    def noon(
        cls,
        n: int,
        loss_a: Optional[ArmLoss] = None,
        loss_b: Optional[ArmLoss] = None,
        phi: float = 0.0,
    ) -> "LossyInterferometer":
        if n < 1:
            raise InvalidStateError(f"N00N state needs N >= 1, got {n}")
        return cls(n, 0, loss_a or ArmLoss(), loss_b or ArmLoss(), phi)

    @property
    def frequency(self) -> int:
        """Fringe frequency m - m' of the surviving coherences."""
        return self.m - self.m_prime

    @property
    def total_photons(self) -> int:
        return self.m + self.m_prime

    @property
    def phase_offset(self) -> float:
        """phi_b - phi_a, the transmission phases that add to phi."""
        return self.loss_b.transmission_phase - self.loss_a.transmission_phase

    @property
    def basis(self) -> FockBasis:
        return FockBasis(self.m)

    def with_phase(self, phi: float) -> "LossyInterferometer":
        return dataclasses.replace(self, phi=phi)

    def with_losses(self, loss_a: ArmLoss, loss_b: ArmLoss) -> "LossyInterferometer":
        return dataclasses.replace(self, loss_a=loss_a, loss_b=loss_b)

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "m_prime": self.m_prime,
            "loss_a": self.loss_a.to_dict(),
            "loss_b": self.loss_b.to_dict(),
            "phi": self.phi,
        }


@dataclass(frozen=True)
class Coefficients:
    """|a_{k,l}|^2, |b_{k,l}|^2 and a*_{l,l'} b_{l',l} for one index triple."""

    a_sq: float
    b_sq: float
    cross: complex


def _a_sq(config: LossyInterferometer, k: int, l: int) -> float:
    # Python defines 0.0 ** 0 == 1.0, which is the T = 0 / R = 0 convention needed here.
    m, mp = config.m, config.m_prime
    ta, tb = config.loss_a.transmittance, config.loss_b.transmittance
    return (
        gamma_coefficient(m, mp, k, l) ** 2
        * ta ** (m - k)
        * (1.0 - ta) ** k
        * tb ** (mp - l)
        * (1.0 - tb) ** l
    )


def _b_sq(config: LossyInterferometer, k: int, l: int) -> float:
    m, mp = config.m, config.m_prime
    ta, tb = config.loss_a.transmittance, config.loss_b.transmittance
    return (
        gamma_coefficient(m, mp, k, l) ** 2
        * ta ** (mp - l)
        * (1.0 - ta) ** l
        * tb ** (m - k)
        * (1.0 - tb) ** k
    )


def _cross_magnitude(config: LossyInterferometer, l: int, l_prime: int) -> float:
    m, mp = config.m, config.m_prime
    ta, tb = config.loss_a.transmittance, config.loss_b.transmittance
    return (
        gamma_coefficient(m, mp, l, l_prime)
        * gamma_coefficient(m, mp, l_prime, l)
        * ta ** ((m + mp - 2 * l) / 2)
        * (1.0 - ta) ** l
        * tb ** ((m + mp - 2 * l_prime) / 2)
        * (1.0 - tb) ** l_prime
    )


def _coherence_phase(config: LossyInterferometer, phi: float) -> complex:
    return cmath.exp(-1j * config.frequency * (phi + config.phase_offset))


def coefficients(config: LossyInterferometer, k: int, l: int, l_prime: int) -> Coefficients:
    """
    Loss coefficients for index k (arm-a loss of the m branch) and l, l'.

    Raises:
        IndexRangeError: k outside [0, m] or l, l' outside [0, m']
    """
    if not 0 <= k <= config.m:
        raise IndexRangeError(f"k={k} outside [0, {config.m}]")
    for name, value in (("l", l), ("l'", l_prime)):
        if not 0 <= value <= config.m_prime:
            raise IndexRangeError(f"{name}={value} outside [0, {config.m_prime}]")

    return Coefficients(
        a_sq=_a_sq(config, k, l),
        b_sq=_b_sq(config, k, l),
        cross=_cross_magnitude(config, l, l_prime) * _coherence_phase(config, config.phi),
    )


@dataclass(frozen=True, eq=False)
class DensityComponents:
    """
    rho(phi) = diagonal + e^{-i f phi} coherence + h.c., with f = m - m'.

    ``coherence`` is evaluated at phi = 0 and already carries the
    transmission-phase factor e^{-i f (phi_b - phi_a)}.
    """

    basis: FockBasis
    diagonal: np.ndarray
    coherence: np.ndarray
    frequency: int

    def at(self, phi: float) -> DensityMatrix:
        lower = cmath.exp(-1j * self.frequency * phi) * self.coherence
        return DensityMatrix(self.basis, self.diagonal + lower + lower.conj().T)


def density_components(config: LossyInterferometer) -> DensityComponents:
    """Assemble the diagonal families first, then the coherence family."""
    m, mp = config.m, config.m_prime
    basis = config.basis
    diagonal = np.zeros((basis.dim, basis.dim), dtype=complex)
    coherence = np.zeros((basis.dim, basis.dim), dtype=complex)

    for k in range(m + 1):
        for l in range(mp + 1):
            # Cells of the two families can coincide; they add.
            i = basis.index(BasisState(m - k, mp - l))
            diagonal[i, i] += _a_sq(config, k, l)
            j = basis.index(BasisState(mp - l, m - k))
            diagonal[j, j] += _b_sq(config, k, l)

    offset = _coherence_phase(config, 0.0)
    for l in range(mp + 1):
        for l_prime in range(mp + 1):
            ket = basis.index(BasisState(m - l, mp - l_prime))
            bra = basis.index(BasisState(mp - l, m - l_prime))
            coherence[ket, bra] += _cross_magnitude(config, l, l_prime) * offset

    return DensityComponents(basis, diagonal, coherence, config.frequency)


def reduced_density_matrix(config: LossyInterferometer) -> DensityMatrix:
    """Reduced density matrix of the signal modes after loss."""
    return density_components(config).at(config.phi)


def noon_density_matrix(
    n: int, loss_a: ArmLoss, loss_b: ArmLoss, phi: float = 0.0
) -> DensityMatrix:
    """Reduced density matrix of |N::0> (m = N, m' = 0)."""
    return reduced_density_matrix(LossyInterferometer.noon(n, loss_a, loss_b, phi))


def photon_statistics(config: LossyInterferometer) -> Dict[BasisState, float]:
    """Photon-number distribution at the detectors (the populations of rho)."""
    components = density_components(config)
    diagonal = components.diagonal.diagonal().real
    return {
        components.basis.state(int(i)): float(diagonal[i]) for i in np.flatnonzero(diagonal > 0)
    }


def arrival_probability(config: LossyInterferometer) -> float:
    """Probability that no photon is lost, i.e. the population of |m,m'> and |m',m>."""
    return _a_sq(config, 0, 0) + _b_sq(config, 0, 0)
