"""
Sweep engine: evaluates the photonics library over states, losses and
phase grids and gathers the results into pandas tables.

Grid cells are independent. With more than one worker they are evaluated on
a thread pool; results are always gathered in input order.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
import pandas as pd

from photonics.conf import get_setting
from photonics.exceptions import OracleGuardError, PhotonicsError, SweepSpecError
from photonics.fock import FockOperator
from photonics.loss_channel import (
    ArmLoss,
    LossyInterferometer,
    arrival_probability,
    photon_statistics,
    reduced_density_matrix,
)
from photonics.metrology import (
    PhaseEstimator,
    detection_operator,
    detection_visibility,
    expectation_vs_phase,
    fundamental_visibility,
    limits,
    loss_from_db,
    loss_threshold_to_snl,
    noon_detection_operator,
)
from photonics.oracle import oracle_reduced_density_matrix

from .entities import PhiGrid, StatePair, SweepResult, TableRecord, check_state

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Fixed resolving power m - m' = 10, adding photons to both arms
TABLE_ROWS: List[StatePair] = [(10, 0), (11, 1), (12, 2), (14, 4), (16, 6), (18, 8), (20, 10)]


def resolution_rows(n: int, max_mprime: int) -> List[StatePair]:
    """(N + m', m') for m' = 0..max_mprime: same fringe frequency N, more photons."""
    if n < 1 or max_mprime < 0:
        raise SweepSpecError(f"Need N >= 1 and max m' >= 0, got N={n}, max m'={max_mprime}")
    return [(n + k, k) for k in range(max_mprime + 1)]


def _loss_label(value: float) -> str:
    return f"{value:.12g}"


@dataclass
class VerifyReport:
    """Outcome of the closed-form vs oracle cross-check."""

    max_m: int
    samples: int
    seed: int
    tolerance: float
    max_difference: float = 0.0
    worst_case: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.tolerance

    def to_dict(self) -> Dict:
        return {
            "max_m": self.max_m,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_difference": self.max_difference,
            "passed": self.passed,
            "worst_case": self.worst_case,
        }

    def to_result(self) -> SweepResult:
        row = {key: value for key, value in self.to_dict().items() if key != "worst_case"}
        config = {"max_m": self.max_m, "samples": self.samples, "seed": self.seed}
        return SweepResult("verify", config, pd.DataFrame([row]), {"worst_case": self.worst_case})


class SweepEngine:
    """
    Runs the sweeps behind the CLI commands.

    Args:
        workers: Thread count for independent cells; defaults to SWEEPS["WORKERS"]
    """

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or get_setting("WORKERS", "SWEEPS")

    def _map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.workers <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            # executor.map yields in submission order
            return list(executor.map(func, items))

    # Table

    def table_record(self, m: int, m_prime: int, loss_a: float, loss_b: float) -> TableRecord:
        """Visibility and minimum detectable phase for one state; errors land in the record."""
        try:
            check_state(m, m_prime)
            config = LossyInterferometer(
                m, m_prime, ArmLoss.from_loss(loss_a), ArmLoss.from_loss(loss_b)
            )
            bounds = limits(m, m_prime)
            best = PhaseEstimator(detection_operator(m, m_prime)).minimum(config)
            record = TableRecord(
                m=m,
                m_prime=m_prime,
                visibility=fundamental_visibility(config),
                delta_phi_min=best.delta_phi,
                heisenberg=bounds.heisenberg,
                shot_noise=bounds.shot_noise,
                phi_opt=best.phi,
            )
        except PhotonicsError as exc:
            logger.warning(f"Row ({m}, {m_prime}) failed: {exc}")
            return TableRecord(m=m, m_prime=m_prime, error=str(exc))
        logger.debug(
            f"Row ({m}, {m_prime}): V={record.visibility:.6f}, "
            f"delta_phi_min={record.delta_phi_min:.6f}"
        )
        return record

    def run_table_at_loss(
        self,
        loss_long: float,
        loss_delay: float = 0.0,
        rows: Optional[Sequence[StatePair]] = None,
    ) -> List[TableRecord]:
        rows = list(rows or TABLE_ROWS)
        started = time.perf_counter()
        records = self._map(
            lambda pair: self.table_record(pair[0], pair[1], loss_delay, loss_long), rows
        )
        failed = sum(1 for record in records if record.error)
        logger.info(
            f"Table of {len(rows)} rows at L_b={loss_long:.6g}, L_a={loss_delay:.6g} "
            f"in {time.perf_counter() - started:.2f}s ({failed} failed)"
        )
        return records

    def run_table(
        self,
        loss_long_db: float,
        loss_delay: float = 0.0,
        rows: Optional[Sequence[StatePair]] = None,
        exact_half: Optional[bool] = None,
    ) -> List[TableRecord]:
        """
        One record per row, long-arm loss given in dB.

        Args:
            loss_long_db: Long-arm attenuation in dB
            loss_delay: Delay-arm loss fraction
            rows: (m, m') pairs; defaults to TABLE_ROWS
            exact_half: Treat 3 dB as exactly 50% loss
        """
        if exact_half is None:
            exact_half = get_setting("EXACT_HALF_DEFAULT", "SWEEPS")
        return self.run_table_at_loss(loss_from_db(loss_long_db, exact_half), loss_delay, rows)

    @staticmethod
    def table_result(records: List[TableRecord], config: Dict) -> SweepResult:
        frame = pd.DataFrame([record.to_dict() for record in records])
        return SweepResult("table", config, frame)

    # Curves

    def sensitivity_curve(
        self,
        config: LossyInterferometer,
        phi: Optional[PhiGrid] = None,
        noon_n: Optional[int] = None,
        detector: Optional[FockOperator] = None,
    ) -> SweepResult:
        """
        delta-phi of |m::m'> and of the N00N state with the same fringe
        frequency (or N = noon_n), under the same losses.

        Args:
            config: M&M configuration; its losses are reused for the N00N state
            phi: Phase grid, one fringe period by default
            noon_n: N00N photon number, m - m' by default
            detector: Detection operator for the M&M series; the matched one by default
        """
        noon_n = noon_n or config.frequency
        phi = phi or PhiGrid.one_period(config.frequency)
        grid = phi.values()
        noon = LossyInterferometer.noon(noon_n, config.loss_a, config.loss_b)

        detector = detector or detection_operator(config.m, config.m_prime)
        mm_estimator = PhaseEstimator(detector)
        noon_estimator = PhaseEstimator(noon_detection_operator(noon_n))
        mm_limits = limits(config.m, config.m_prime)
        noon_limits = limits(noon_n, 0)

        frame = pd.DataFrame(
            {
                "phi": grid,
                "delta_phi_mm": np.atleast_1d(mm_estimator.sensitivity(config, grid)),
                "delta_phi_noon": np.atleast_1d(noon_estimator.sensitivity(noon, grid)),
                "hl_mm": mm_limits.heisenberg,
                "snl_mm": mm_limits.shot_noise,
                "snl_noon": noon_limits.shot_noise,
                "lossless_limit": mm_limits.lossless_best,
            }
        )
        mm_best = mm_estimator.minimum(config)
        noon_best = noon_estimator.minimum(noon)
        summary = {
            "detector": detector.label,
            "mm_minimum": mm_best.to_dict(),
            "noon_minimum": noon_best.to_dict(),
            "mm_beats_snl": mm_best.delta_phi < mm_limits.shot_noise,
            "noon_beats_snl": noon_best.delta_phi < noon_limits.shot_noise,
        }
        return SweepResult(
            "sensitivity",
            {**config.to_dict(), "noon_n": noon_n, "phi_grid": phi.to_dict()},
            frame,
            summary,
        )

    def resolution_curve(
        self,
        config: LossyInterferometer,
        phi: Optional[PhiGrid] = None,
        noon_n: Optional[int] = None,
        detector: Optional[FockOperator] = None,
    ) -> SweepResult:
        """<A> for |m::m'> and for the N00N state of equal fringe frequency."""
        detector = detector or detection_operator(config.m, config.m_prime)
        noon_n = noon_n or config.frequency
        phi = phi or PhiGrid.one_period(config.frequency)
        grid = phi.values()
        noon = LossyInterferometer.noon(noon_n, config.loss_a, config.loss_b)
        frame = pd.DataFrame(
            {
                "phi": grid,
                "expectation_mm": expectation_vs_phase(config, detector, grid),
                "expectation_noon": expectation_vs_phase(
                    noon, noon_detection_operator(noon_n), grid
                ),
            }
        )
        summary = {
            "detector": detector.label,
            "amplitude_mm": fundamental_visibility(config),
            "detection_visibility_mm": detection_visibility(config, detector),
            "amplitude_noon": fundamental_visibility(noon),
            "arrival_probability_mm": arrival_probability(config),
            "arrival_probability_noon": arrival_probability(noon),
        }
        return SweepResult(
            "resolution",
            {**config.to_dict(), "noon_n": noon_n, "phi_grid": phi.to_dict()},
            frame,
            summary,
        )

    # Grids

    def visibility_grid(
        self,
        m: int,
        m_prime: int,
        loss_a_values: Sequence[float],
        loss_b_values: Sequence[float],
    ) -> SweepResult:
        """V_f over (L_a rows) x (L_b columns)."""
        check_state(m, m_prime)
        loss_b_values = list(loss_b_values)

        def row(loss_a: float) -> List[float]:
            arm_a = ArmLoss.from_loss(loss_a)
            return [
                fundamental_visibility(
                    LossyInterferometer(m, m_prime, arm_a, ArmLoss.from_loss(loss_b))
                )
                for loss_b in loss_b_values
            ]

        started = time.perf_counter()
        values = self._map(row, list(loss_a_values))
        frame = pd.DataFrame(
            values,
            index=pd.Index([float(x) for x in loss_a_values], name="loss_a"),
            columns=[_loss_label(x) for x in loss_b_values],
        )
        logger.info(
            f"Visibility grid |{m}::{m_prime}> {frame.shape[0]}x{frame.shape[1]} "
            f"in {time.perf_counter() - started:.2f}s"
        )
        config = {
            "m": m,
            "m_prime": m_prime,
            "loss_a": [float(x) for x in loss_a_values],
            "loss_b": [float(x) for x in loss_b_values],
        }
        return SweepResult("visgrid", config, frame)

    def visibility_ratio_grid(self, grid: SweepResult, reference: SweepResult) -> SweepResult:
        """Element-wise V_f(state) / V_f(reference); NaN where the reference vanishes."""
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = grid.frame.to_numpy() / reference.frame.to_numpy()
        ratio[~np.isfinite(ratio)] = np.nan
        frame = pd.DataFrame(ratio, index=grid.frame.index, columns=grid.frame.columns)
        config = {
            **grid.config,
            "reference": {"m": reference.config["m"], "m_prime": reference.config["m_prime"]},
        }
        return SweepResult("visgrid_ratio", config, frame)

    # Single configurations

    def density_matrix(self, config: LossyInterferometer, tol: float = 0.0) -> SweepResult:
        """
        Nonzero elements of the reduced density matrix, after invariant checks.

        The summary carries the detector photon-number distribution and the
        probability that every photon arrives.
        """
        rho = reduced_density_matrix(config).validate()
        records = rho.to_records(tol)
        frame = pd.DataFrame(
            {
                "row": [r["row"] for r in records],
                "col": [r["col"] for r in records],
                "ket_a": [r["ket"][0] for r in records],
                "ket_b": [r["ket"][1] for r in records],
                "bra_a": [r["bra"][0] for r in records],
                "bra_b": [r["bra"][1] for r in records],
                "re": [r["re"] for r in records],
                "im": [r["im"] for r in records],
            }
        )
        summary = {
            "trace": rho.trace.real,
            "rank": rho.rank,
            "min_eigenvalue": rho.min_eigenvalue,
            "hermiticity_error": rho.hermiticity_error,
            "arrival_probability": arrival_probability(config),
            "photon_statistics": [
                {"n_a": state.n_a, "n_b": state.n_b, "probability": probability}
                for state, probability in sorted(
                    photon_statistics(config).items(), key=lambda item: (item[0].n_a, item[0].n_b)
                )
            ],
        }
        return SweepResult("density_matrix", config.to_dict(), frame, summary)

    def thresholds(self, states: Sequence[StatePair], fixed_arm_loss: float = 0.0) -> SweepResult:
        """Long-arm loss at which each state's delta_phi_min reaches its SNL."""
        for m, m_prime in states:
            check_state(m, m_prime)
        results = self._map(
            lambda pair: loss_threshold_to_snl(pair[0], pair[1], fixed_arm_loss), list(states)
        )
        frame = pd.DataFrame([result.to_dict() for result in results])
        config = {"states": [list(pair) for pair in states], "fixed_arm_loss": fixed_arm_loss}
        return SweepResult("threshold", config, frame)

    # Oracle cross-check

    def verify_oracle(
        self,
        max_m: int,
        samples: int,
        seed: int = 0,
        tolerance: Optional[float] = None,
    ) -> VerifyReport:
        """
        Compare the closed form with the four-mode oracle on random draws.

        Each draw picks m in [1, max_m], m' in [0, m), both transmittances,
        all four beam-splitter phases and the unknown phase.

        Raises:
            OracleGuardError: max_m above the oracle bound
        """
        bound = get_setting("ORACLE_MAX_M")
        if max_m > bound:
            raise OracleGuardError(f"verify supports max_m <= {bound}, got {max_m}")
        if max_m < 1 or samples < 1:
            raise SweepSpecError(f"Need max_m >= 1 and samples >= 1, got {max_m}, {samples}")

        if tolerance is None:
            tolerance = get_setting("VERIFY_TOLERANCE", "SWEEPS")
        report = VerifyReport(max_m, samples, seed, tolerance)
        rng = np.random.default_rng(seed)
        started = time.perf_counter()
        for _ in range(samples):
            m = int(rng.integers(1, max_m + 1))
            m_prime = int(rng.integers(0, m))
            config = LossyInterferometer(
                m,
                m_prime,
                ArmLoss(rng.uniform(), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
                ArmLoss(rng.uniform(), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
                rng.uniform(0, 2 * math.pi),
            )
            closed = reduced_density_matrix(config)
            brute = oracle_reduced_density_matrix(config, max_m=bound)
            difference = float(np.max(np.abs(closed.matrix - brute.matrix)))
            if difference >= report.max_difference:
                report.max_difference = difference
                report.worst_case = config.to_dict()

        logger.info(
            f"Oracle check: {samples} draws up to m={max_m}, "
            f"max difference {report.max_difference:.3e} "
            f"in {time.perf_counter() - started:.2f}s"
        )
        return report
