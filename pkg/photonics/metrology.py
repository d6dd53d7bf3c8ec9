"""
Detection operators, fringe visibilities and phase sensitivity.

Every observable used here is evaluated through a PhaseResponse: since
rho(phi) = D + e^{-i f phi} C + h.c., any expectation value is
constant + cosine * cos(f phi) + sine * sin(f phi) with f = m - m'.
The three numbers are computed once per (configuration, operator) and the
phase grid is then evaluated in closed form.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .conf import get_setting
from .exceptions import BasisError, ConfigurationError, IndexRangeError, InvalidStateError
from .fock import BasisState, FockBasis, FockOperator, dyad_sum
from .loss_channel import ArmLoss, LossyInterferometer, coefficients, density_components

logger = logging.getLogger(__name__)

PhaseArg = Union[float, np.ndarray]

FINITE_DIFFERENCE_STEP = 1e-6
# |d<O>/dphi| at or below this (times f) counts as a fringe extremum
DERIVATIVE_ZERO_TOL = 1e-12
NO_SIGNAL_TOL = 1e-15
MIN_COARSE_GRID = 512

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def detection_label(m: int, m_prime: int) -> str:
    return f"A[{m},{m_prime}]"


def _check_pair(m: int, m_prime: int) -> None:
    if m_prime < 0 or m <= m_prime:
        raise InvalidStateError(f"Detection needs m > m' >= 0, got m={m}, m'={m_prime}")


def _detection_terms(m: int, m_prime: int) -> List[Tuple[int, int]]:
    return [(r, s) for r in range(m_prime + 1) for s in range(m_prime + 1)]


def _dyads(m: int, m_prime: int, pairs: List[Tuple[int, int]]):
    for r, s in pairs:
        yield BasisState(m_prime - r, m - s), BasisState(m - r, m_prime - s), 1.0
        yield BasisState(m - r, m_prime - s), BasisState(m_prime - r, m - s), 1.0


def detection_operator(m: int, m_prime: int, basis: Optional[FockBasis] = None) -> FockOperator:
    """
    Parity-like detection operator for |m::m'>.

    A = sum_{r,s=0}^{m'} |m'-r, m-s><m-r, m'-s| + |m-r, m'-s><m'-r, m-s|

    Coincident cells are summed. For m' = 0 this is
    |0,N><N,0| + |N,0><0,N|.

    Raises:
        InvalidStateError: m <= m' or m' < 0
        BasisError: basis cannot hold m photons in one mode
    """
    _check_pair(m, m_prime)
    basis = basis or FockBasis(m)
    if basis.n_max < m:
        raise BasisError(f"Detection operator for m={m} needs n_max >= {m}, got {basis.n_max}")
    terms = _dyads(m, m_prime, _detection_terms(m, m_prime))
    return dyad_sum(terms, basis, hermitian=True, label=detection_label(m, m_prime))


def noon_detection_operator(n: int, basis: Optional[FockBasis] = None) -> FockOperator:
    """A_N = |0,N><N,0| + |N,0><0,N| on the given basis."""
    if n < 1:
        raise InvalidStateError(f"N00N detector needs N >= 1, got {n}")
    basis = basis or FockBasis(n)
    terms = [
        (BasisState(0, n), BasisState(n, 0), 1.0),
        (BasisState(n, 0), BasisState(0, n), 1.0),
    ]
    return dyad_sum(terms, basis, hermitian=True, label=f"A_N[{n}]")


def truncated_detection_operator(
    m: int, m_prime: int, max_terms: int, basis: Optional[FockBasis] = None
) -> FockOperator:
    """
    Partial sum of the detection dyads: the first ``max_terms`` (r, s)
    pairs in row-major order, each together with its conjugate.
    """
    _check_pair(m, m_prime)
    pairs = _detection_terms(m, m_prime)
    if not 1 <= max_terms <= len(pairs):
        raise IndexRangeError(f"max_terms={max_terms} outside [1, {len(pairs)}]")
    basis = basis or FockBasis(m)
    terms = _dyads(m, m_prime, pairs[:max_terms])
    label = f"{detection_label(m, m_prime)}:{max_terms}"
    return dyad_sum(terms, basis, hermitian=True, label=label)


@dataclass(frozen=True)
class MetrologyLimits:
    """Benchmarks for |m::m'>: Heisenberg, shot noise, and the lossless optimum."""

    heisenberg: float
    shot_noise: float
    lossless_best: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "heisenberg": self.heisenberg,
            "shot_noise": self.shot_noise,
            "lossless_best": self.lossless_best,
        }


def limits(m: int, m_prime: int) -> MetrologyLimits:
    """HL = 1/(m+m'), SNL = 1/sqrt(m+m'), lossless best = 1/(m-m')."""
    _check_pair(m, m_prime)
    total = m + m_prime
    return MetrologyLimits(
        heisenberg=1.0 / total,
        shot_noise=1.0 / math.sqrt(total),
        lossless_best=1.0 / (m - m_prime),
    )


def loss_from_db(db: float, exact_half: bool = False) -> float:
    """
    Power attenuation in dB to loss fraction, L = 1 - 10^(-dB/10).

    Args:
        db: Attenuation, non-negative
        exact_half: Map 3 dB to exactly 0.5 instead of 0.49881...
    """
    if db < 0 or math.isnan(db):
        raise ConfigurationError(f"Attenuation must be non-negative, got {db} dB")
    if exact_half and math.isclose(db, 3.0):
        return 0.5
    return 1.0 - 10.0 ** (-db / 10.0)


def db_from_loss(loss: float, exact_half: bool = False) -> float:
    """Inverse of loss_from_db; total loss is infinite attenuation."""
    if not 0.0 <= loss <= 1.0:
        raise ConfigurationError(f"Loss must lie in [0, 1], got {loss}")
    if exact_half and loss == 0.5:
        return 3.0
    if loss == 1.0:
        return math.inf
    return -10.0 * math.log10(1.0 - loss)


@dataclass(frozen=True)
class PhaseResponse:
    """
    <O>(phi) = constant + cosine * cos(f phi) + sine * sin(f phi).

    Real part of Tr[O rho(phi)], i.e. the expectation of the Hermitian
    part of O.
    """

    frequency: int
    constant: float
    cosine: float
    sine: float

    @property
    def amplitude(self) -> float:
        return math.hypot(self.cosine, self.sine)

    def value(self, phi: PhaseArg) -> PhaseArg:
        x = self.frequency * np.asarray(phi, dtype=float)
        result = self.constant + self.cosine * np.cos(x) + self.sine * np.sin(x)
        return float(result) if np.ndim(result) == 0 else result

    def derivative(self, phi: PhaseArg) -> PhaseArg:
        x = self.frequency * np.asarray(phi, dtype=float)
        result = self.frequency * (self.sine * np.cos(x) - self.cosine * np.sin(x))
        return float(result) if np.ndim(result) == 0 else result


def _trace_product(op: FockOperator, matrix: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", op.matrix, matrix))


def phase_response(config: LossyInterferometer, op: FockOperator) -> PhaseResponse:
    """
    Decompose <op>(phi) for the given losses.

    Raises:
        BasisError: the operator is not expressed in the configuration's basis
    """
    components = density_components(config)
    if op.basis != components.basis:
        raise BasisError(
            f"Basis mismatch: operator {op.basis} vs configuration {components.basis}"
        )
    d0 = _trace_product(op, components.diagonal)
    c0 = _trace_product(op, components.coherence)
    c1 = _trace_product(op, components.coherence.conj().T)
    return PhaseResponse(
        frequency=components.frequency,
        constant=d0.real,
        cosine=(c0 + c1).real,
        sine=(c0 - c1).imag,
    )


def expectation_vs_phase(
    config: LossyInterferometer, op: FockOperator, phi_grid: np.ndarray
) -> np.ndarray:
    """Tr[op rho(phi)] (real part) for every phase in the grid."""
    return np.atleast_1d(phase_response(config, op).value(np.asarray(phi_grid, dtype=float)))


def fundamental_visibility(config: LossyInterferometer) -> float:
    """V_f = 2 sum_{l,l'} |a*_{l,l'} b_{l',l}|, independent of phi."""
    return _fundamental_visibility(config.with_phase(0.0))


@lru_cache(maxsize=1024)
def _fundamental_visibility(config: LossyInterferometer) -> float:
    total = 0.0
    for l in range(config.m_prime + 1):
        for l_prime in range(config.m_prime + 1):
            total += abs(coefficients(config, 0, l, l_prime).cross)
    return 2.0 * total


def detection_visibility(config: LossyInterferometer, op: FockOperator) -> float:
    """V_det = <op> at phi = 0."""
    return float(phase_response(config, op).value(0.0))


@dataclass(frozen=True, eq=False)
class SensitivityCurve:
    """delta-phi over a phase grid; +inf where the fringe slope vanishes."""

    phi: np.ndarray
    delta_phi: np.ndarray
    config: LossyInterferometer
    operator_label: str = ""

    def minimum(self) -> Tuple[float, float]:
        i = int(np.argmin(self.delta_phi))
        return float(self.phi[i]), float(self.delta_phi[i])


@dataclass(frozen=True)
class MinimumSensitivity:
    """
    Result of the delta-phi minimisation over one half fringe period.

    ``no_signal`` is set when the fringe amplitude vanishes; phi is then NaN
    and delta_phi infinite.
    """

    phi: float
    delta_phi: float
    no_signal: bool = False
    evaluations: int = 0

    def __iter__(self):
        return iter((self.phi, self.delta_phi))

    def to_dict(self) -> Dict:
        return {
            "phi": self.phi,
            "delta_phi": self.delta_phi,
            "no_signal": self.no_signal,
        }


def golden_section_search(func, lower: float, upper: float, tol: float) -> Tuple[float, float]:
    """
    Golden-section search.

    Given a function with a single local minimum in [lower, upper], returns
    a sub-interval of width <= tol that contains it. Only interior points
    are evaluated.
    """
    a, b = min(lower, upper), max(lower, upper)
    h = b - a
    if h <= tol:
        return a, b

    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = func(c)
    yd = func(d)

    for _ in range(steps - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)

    if yc < yd:
        return a, d
    return c, b


class PhaseEstimator:
    """
    Linear error propagation for one detection operator:

        delta_phi = sqrt(<O^2> - <O>^2) / |d<O>/dphi|

    <O^2> is taken from the explicit matrix square, formed once here and
    reused for every configuration the estimator is asked about.
    """

    def __init__(self, op: FockOperator, finite_difference_step: float = FINITE_DIFFERENCE_STEP):
        self.op = op
        self.op_squared = op.squared()
        self.finite_difference_step = finite_difference_step

    def responses(self, config: LossyInterferometer) -> Tuple[PhaseResponse, PhaseResponse]:
        return phase_response(config, self.op), phase_response(config, self.op_squared)

    def is_analytic(self, config: LossyInterferometer) -> bool:
        """The matched detection operator has the closed-form slope."""
        return self.op.label == detection_label(config.m, config.m_prime)

    def derivative(
        self,
        config: LossyInterferometer,
        phi: PhaseArg,
        response: Optional[PhaseResponse] = None,
    ) -> PhaseArg:
        """
        d<O>/dphi. Closed form -V_f f sin(f (phi + phi_b - phi_a)) for the
        matched detection operator, central finite difference otherwise.
        """
        phi = np.asarray(phi, dtype=float)
        if self.is_analytic(config):
            f = config.frequency
            result = (
                -fundamental_visibility(config) * f * np.sin(f * (phi + config.phase_offset))
            )
        else:
            response = response or phase_response(config, self.op)
            h = self.finite_difference_step
            result = (np.asarray(response.value(phi + h)) - np.asarray(response.value(phi - h))) / (
                2 * h
            )
        return float(result) if np.ndim(result) == 0 else result

    def sensitivity(self, config: LossyInterferometer, phi: PhaseArg) -> PhaseArg:
        first, second = self.responses(config)
        return self._sensitivity(config, phi, first, second)

    def _sensitivity(
        self,
        config: LossyInterferometer,
        phi: PhaseArg,
        first: PhaseResponse,
        second: PhaseResponse,
    ) -> PhaseArg:
        phi = np.asarray(phi, dtype=float)
        mean = np.asarray(first.value(phi))
        variance = np.clip(np.asarray(second.value(phi)) - mean**2, 0.0, None)
        slope = np.abs(np.asarray(self.derivative(config, phi, first)))
        flat = slope <= DERIVATIVE_ZERO_TOL * config.frequency
        with np.errstate(divide="ignore", invalid="ignore"):
            result = np.where(flat, np.inf, np.sqrt(variance) / np.where(flat, 1.0, slope))
        return float(result) if np.ndim(result) == 0 else result

    def curve(self, config: LossyInterferometer, phi_grid: np.ndarray) -> SensitivityCurve:
        phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
        values = np.atleast_1d(self.sensitivity(config, phi_grid))
        return SensitivityCurve(phi_grid, values, config, self.op.label)

    def minimum(
        self,
        config: LossyInterferometer,
        coarse_grid: Optional[int] = None,
        tol: Optional[float] = None,
    ) -> MinimumSensitivity:
        """
        Global minimum of delta-phi over the open interval (0, pi/f).

        A coarse grid locates the best cell, golden-section search refines
        it inside the neighbouring bracket.
        """
        coarse_grid = coarse_grid or get_setting("COARSE_GRID")
        tol = tol or get_setting("GOLDEN_TOL")
        if coarse_grid < MIN_COARSE_GRID:
            raise ConfigurationError(
                f"Coarse grid needs at least {MIN_COARSE_GRID} points, got {coarse_grid}"
            )

        first, second = self.responses(config)
        if first.amplitude <= NO_SIGNAL_TOL:
            logger.warning(f"No fringe signal for {detection_label(config.m, config.m_prime)}")
            return MinimumSensitivity(math.nan, math.inf, no_signal=True)

        period = math.pi / config.frequency
        grid = np.linspace(0.0, period, coarse_grid + 2)[1:-1]
        values = np.asarray(self._sensitivity(config, grid, first, second))
        i = int(np.argmin(values))
        best_phi, best_value = float(grid[i]), float(values[i])

        lower = float(grid[i - 1]) if i > 0 else 0.0
        upper = float(grid[i + 1]) if i < len(grid) - 1 else period
        evaluations = [len(grid)]

        def objective(phi: float) -> float:
            evaluations[0] += 1
            return float(self._sensitivity(config, phi, first, second))

        a, b = golden_section_search(objective, lower, upper, tol)
        refined_phi = (a + b) / 2
        refined_value = objective(refined_phi)
        logger.debug(
            f"Golden section on [{lower:.6g}, {upper:.6g}]: "
            f"phi*={refined_phi:.10g}, delta_phi={refined_value:.10g}"
        )
        if refined_value <= best_value:
            best_phi, best_value = refined_phi, refined_value
        return MinimumSensitivity(best_phi, best_value, evaluations=evaluations[0])


def phase_sensitivity(config: LossyInterferometer, op: FockOperator, phi: PhaseArg) -> PhaseArg:
    """delta_phi at the given phase(s); +inf at fringe extrema."""
    return PhaseEstimator(op).sensitivity(config, phi)


def min_phase_sensitivity(
    config: LossyInterferometer,
    op: FockOperator,
    coarse_grid: Optional[int] = None,
    tol: Optional[float] = None,
) -> MinimumSensitivity:
    """Best (phi*, delta_phi) over one half fringe period."""
    return PhaseEstimator(op).minimum(config, coarse_grid, tol)


def sensitivity_curve(
    config: LossyInterferometer, op: FockOperator, phi_grid: np.ndarray
) -> SensitivityCurve:
    return PhaseEstimator(op).curve(config, phi_grid)


@dataclass(frozen=True)
class ThresholdResult:
    """
    Long-arm loss at which delta_phi_min rises to the shot-noise limit.

    ``loss`` is None when no crossing exists in [0, 1] (``reached`` False).
    """

    m: int
    m_prime: int
    fixed_arm_loss: float
    shot_noise: float
    loss: Optional[float]
    reached: bool
    sign_changes: int
    monotone: bool
    bracket: Tuple[float, float] = field(default=(math.nan, math.nan))

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "m_prime": self.m_prime,
            "fixed_arm_loss": self.fixed_arm_loss,
            "shot_noise": self.shot_noise,
            "loss": self.loss,
            "reached": self.reached,
            "sign_changes": self.sign_changes,
            "monotone": self.monotone,
        }


def loss_threshold_to_snl(
    m: int,
    m_prime: int,
    fixed_arm_loss: float = 0.0,
    tol: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> ThresholdResult:
    """
    Bisect on the long-arm loss L_b for delta_phi_min(L_b) = SNL(m, m').

    A bracket grid over [0, 1] is scanned first; sign changes of
    delta_phi_min - SNL are counted there and monotonicity of delta_phi_min
    is recorded. The first crossing from below to above is refined.

    Args:
        m: Larger photon number
        m_prime: Smaller photon number
        fixed_arm_loss: Delay-arm loss L_a, held fixed
        tol: Bisection tolerance in L_b
        grid_points: Size of the bracket grid

    Returns:
        ThresholdResult; ``reached`` is False when delta_phi_min never
        crosses the shot-noise limit.
    """
    tol = tol or get_setting("THRESHOLD_TOL")
    grid_points = grid_points or get_setting("THRESHOLD_GRID")
    shot_noise = limits(m, m_prime).shot_noise
    estimator = PhaseEstimator(detection_operator(m, m_prime))
    delay = ArmLoss.from_loss(fixed_arm_loss)

    def excess(loss_b: float) -> float:
        config = LossyInterferometer(m, m_prime, delay, ArmLoss.from_loss(loss_b))
        return estimator.minimum(config).delta_phi - shot_noise

    grid = np.linspace(0.0, 1.0, grid_points)
    excesses = np.array([excess(float(loss)) for loss in grid])
    below = excesses < 0
    sign_changes = int(np.count_nonzero(below[1:] != below[:-1]))
    monotone = bool(np.all(excesses[1:] >= excesses[:-1] - 1e-12))
    if not monotone:
        logger.warning(f"delta_phi_min is not monotone in L_b for |{m}::{m_prime}>")
    if sign_changes > 1:
        logger.warning(
            f"{sign_changes} sign changes against the SNL for |{m}::{m_prime}>; "
            "using the first crossing"
        )

    crossings = np.flatnonzero(below[:-1] & ~below[1:])
    if len(crossings) == 0:
        logger.info(f"|{m}::{m_prime}> never reaches its shot-noise limit {shot_noise:.6g}")
        return ThresholdResult(
            m, m_prime, fixed_arm_loss, shot_noise, None, False, sign_changes, monotone
        )

    lo, hi = float(grid[crossings[0]]), float(grid[crossings[0] + 1])
    bracket = (lo, hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
        logger.debug(f"Threshold bisection |{m}::{m_prime}>: [{lo:.6f}, {hi:.6f}]")

    loss = (lo + hi) / 2
    logger.info(f"|{m}::{m_prime}> reaches its shot-noise limit at L_b = {loss:.4f}")
    return ThresholdResult(
        m, m_prime, fixed_arm_loss, shot_noise, loss, True, sign_changes, monotone, bracket
    )
