"""
Brute-force four-mode simulation: signal modes a, b and environment modes
va, vb, stored as a dense amplitude tensor indexed (n_a, n_b, n_va, n_vb).

Beam-splitter convention, fixed here and locked by a regression test:

    a^dagger  -> t a^dagger + r va^dagger
    va^dagger -> -r* a^dagger + t* va^dagger

acting on creation operators of the input state. With this choice the
surviving coherence of the traced-out state carries
e^{-i(m-m')(phi + phi_b - phi_a)}, matching the closed form, and the
reflection phases cancel in the partial trace.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Set, Union

import numpy as np

from .conf import get_setting
from .exceptions import (
    BasisError,
    NonUnitaryError,
    OracleConsistencyError,
    OracleGuardError,
    UnknownModeError,
)
from .fock import (
    NORM_TOL,
    DensityMatrix,
    FockBasis,
    PureState,
    log_binomial,
    log_factorial,
    make_mm_state,
)
from .loss_channel import LossyInterferometer

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-12
ORDERING_TOL = 1e-12


class Mode(str, Enum):
    """Mode identifiers, in tensor-axis order"""

    A = "a"
    B = "b"
    VA = "va"
    VB = "vb"


MODE_AXES = {Mode.A: 0, Mode.B: 1, Mode.VA: 2, Mode.VB: 3}


def _axis(mode: Union[Mode, str]) -> int:
    try:
        return MODE_AXES[Mode(mode)]
    except ValueError:
        raise UnknownModeError(f"Unknown mode {mode!r}; expected one of a, b, va, vb") from None


@dataclass(frozen=True, eq=False)
class FourModeState:
    """
    Normalized pure state of the two signal and two environment modes.

    Attributes:
        n_max: Occupation truncation per mode
        amplitudes: Complex tensor of shape (n_max + 1,) * 4
    """

    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex, copy=True)
        shape = (self.n_max + 1,) * 4
        if amplitudes.shape != shape:
            raise BasisError(f"Amplitude tensor of shape {amplitudes.shape}, expected {shape}")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise BasisError(f"Four-mode state is not normalized (norm^2 = {norm!r})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_signal(cls, signal: PureState) -> "FourModeState":
        """Embed a two-mode state with both environment modes in vacuum."""
        d = signal.basis.n_max + 1
        amplitudes = np.zeros((d, d, d, d), dtype=complex)
        amplitudes[:, :, 0, 0] = signal.amplitudes.reshape(d, d)
        return cls(signal.basis.n_max, amplitudes)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def photon_numbers(self, tol: float = 1e-14) -> Set[int]:
        """Total photon numbers present in the support."""
        occupied = np.argwhere(np.abs(self.amplitudes) > tol)
        return {int(total) for total in occupied.sum(axis=1)}


def apply_phase(state: FourModeState, mode: Union[Mode, str], phi: float) -> FourModeState:
    """Multiply each amplitude by e^{i n_mode phi}."""
    axis = _axis(mode)
    phases = np.exp(1j * phi * np.arange(state.n_max + 1))
    shape = [1, 1, 1, 1]
    shape[axis] = state.n_max + 1
    return FourModeState(state.n_max, state.amplitudes * phases.reshape(shape))


@lru_cache(maxsize=256)
def _splitter_tensor(n_max: int, t: complex, r: complex) -> np.ndarray:
    """
    U[p, q, n, j] = <p, q| U_BS |n, j> for the (signal, env) pair.

    Expands (t a+ + r v+)^n (-r* a+ + t* v+)^j |0,0> / sqrt(n! j!).
    """
    d = n_max + 1
    tensor = np.zeros((d, d, d, d), dtype=complex)
    for n in range(d):
        for j in range(d - n):
            total = n + j
            for p in range(n + 1):
                for q in range(j + 1):
                    s = p + q
                    magnitude = math.exp(
                        log_binomial(n, p)
                        + log_binomial(j, q)
                        + 0.5
                        * (
                            log_factorial(s)
                            + log_factorial(total - s)
                            - log_factorial(n)
                            - log_factorial(j)
                        )
                    )
                    phase = t**p * r ** (n - p) * (-r.conjugate()) ** q * t.conjugate() ** (j - q)
                    tensor[s, total - s, n, j] += magnitude * phase
    return tensor


def apply_beam_splitter(
    state: FourModeState,
    signal_mode: Union[Mode, str],
    env_mode: Union[Mode, str],
    t: complex,
    r: complex,
) -> FourModeState:
    """
    Mix a signal mode with an environment mode.

    Raises:
        NonUnitaryError: |t|^2 + |r|^2 differs from 1 by more than 1e-12
        BasisError: a populated (n, j) pair would leave the truncation
    """
    t, r = complex(t), complex(r)
    if abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) > UNITARITY_TOL:
        raise NonUnitaryError(f"|t|^2 + |r|^2 = {abs(t) ** 2 + abs(r) ** 2!r}, expected 1")
    signal_axis, env_axis = _axis(signal_mode), _axis(env_mode)
    if signal_axis == env_axis:
        raise UnknownModeError("Beam splitter needs two distinct modes")

    d = state.n_max + 1
    moved = np.moveaxis(state.amplitudes, (signal_axis, env_axis), (0, 1))
    pair_totals = np.add.outer(np.arange(d), np.arange(d))
    overflow = np.abs(moved[pair_totals > state.n_max]) > 0
    if np.any(overflow):
        raise BasisError(
            f"Photons in modes ({signal_mode}, {env_mode}) exceed n_max={state.n_max} per mode"
        )

    tensor = _splitter_tensor(state.n_max, t, r)
    mixed = np.einsum("pqnj,nj...->pq...", tensor, moved)
    return FourModeState(state.n_max, np.moveaxis(mixed, (0, 1), (signal_axis, env_axis)))


def trace_out_environment(state: FourModeState) -> DensityMatrix:
    """rho(i, j) = sum over env of psi(i, env) conj(psi(j, env))."""
    d = state.n_max + 1
    psi = state.amplitudes.reshape(d * d, d * d)
    return DensityMatrix(FockBasis(state.n_max), psi @ psi.conj().T)


def _apply_losses(state: FourModeState, config: LossyInterferometer) -> FourModeState:
    state = apply_beam_splitter(state, Mode.A, Mode.VA, config.loss_a.t, config.loss_a.r)
    return apply_beam_splitter(state, Mode.B, Mode.VB, config.loss_b.t, config.loss_b.r)


def oracle_reduced_density_matrix(
    config: LossyInterferometer, max_m: Optional[int] = None
) -> DensityMatrix:
    """
    Reduced signal density matrix by explicit simulation.

    Runs both orderings (phase then loss, loss then phase) and checks that
    the reduced density matrices agree element-wise. The joint amplitudes
    differ by a phase on vb, which the partial trace removes.

    Raises:
        OracleGuardError: m above the oracle bound
        OracleConsistencyError: the two orderings disagree
    """
    max_m = max_m if max_m is not None else get_setting("ORACLE_MAX_M")
    if config.m > max_m:
        raise OracleGuardError(f"Oracle supports m <= {max_m}, got m={config.m}")

    initial = FourModeState.from_signal(make_mm_state(config.m, config.m_prime))
    phase_first = trace_out_environment(
        _apply_losses(apply_phase(initial, Mode.B, config.phi), config)
    )
    loss_first = trace_out_environment(
        apply_phase(_apply_losses(initial, config), Mode.B, config.phi)
    )

    deviation = float(np.max(np.abs(phase_first.matrix - loss_first.matrix)))
    if deviation > ORDERING_TOL:
        raise OracleConsistencyError(
            f"Phase and loss orderings disagree by {deviation:.3e} for {config}"
        )
    logger.debug(
        f"Oracle run m={config.m}, m'={config.m_prime}: ordering deviation {deviation:.1e}"
    )
    return phase_first
