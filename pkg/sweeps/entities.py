"""
Sweep descriptions and result records.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from photonics.conf import get_setting
from photonics.exceptions import SweepSpecError
from photonics.metrology import loss_from_db

StatePair = Tuple[int, int]


class OutputFormat(str, Enum):
    """File formats a sweep can be written in"""

    CSV = "csv"
    JSON = "json"


def check_state(m: int, m_prime: int) -> None:
    """Reject pairs the closed form does not cover."""
    max_m = get_setting("CLOSED_FORM_MAX_M")
    if m_prime < 0 or m <= m_prime:
        raise SweepSpecError(f"States need m > m' >= 0, got ({m}, {m_prime})")
    if m > max_m:
        raise SweepSpecError(f"m={m} above the closed-form limit {max_m}")


def parse_state(text: str) -> StatePair:
    """Parse ``"20:10"`` into (20, 10)."""
    try:
        m, m_prime = (int(part) for part in text.split(":"))
    except ValueError:
        raise SweepSpecError(f"State must look like M:MPRIME, got {text!r}") from None
    check_state(m, m_prime)
    return m, m_prime


@dataclass(frozen=True)
class LossRange:
    """
    Loss values for one arm, either a start/stop/step range or explicit values.

    Attributes:
        start: First loss fraction
        stop: Last loss fraction (included when it falls on the step grid)
        step: Spacing, must be positive
        explicit: Explicit loss fractions; overrides the range when given
    """

    start: float = 0.0
    stop: float = 1.0
    step: float = 0.05
    explicit: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.explicit is not None:
            if len(self.explicit) == 0:
                raise SweepSpecError("Explicit loss list is empty")
            values = self.explicit
        else:
            if not all(math.isfinite(v) for v in (self.start, self.stop, self.step)):
                raise SweepSpecError(
                    f"Loss range needs finite bounds, got {self.start}:{self.stop}:{self.step}"
                )
            if self.step <= 0:
                raise SweepSpecError(f"Loss step must be positive, got {self.step}")
            if self.stop < self.start:
                raise SweepSpecError(f"Loss range is empty: [{self.start}, {self.stop}]")
            values = (self.start, self.stop)
        for value in values:
            if not 0.0 <= value <= 1.0:
                raise SweepSpecError(f"Loss {value} outside [0, 1]")

    @classmethod
    def single(cls, loss: float) -> "LossRange":
        return cls(explicit=(loss,))

    @classmethod
    def from_db(cls, db_values: Sequence[float], exact_half: bool = False) -> "LossRange":
        return cls(explicit=tuple(loss_from_db(db, exact_half) for db in db_values))

    @classmethod
    def parse_db(cls, text: str, exact_half: bool = False) -> "LossRange":
        """``"0,3,6"``: attenuations in dB, read through loss_from_db."""
        try:
            db_values = [float(part) for part in text.split(",")]
        except ValueError:
            raise SweepSpecError(f"Cannot parse dB list {text!r}") from None
        return cls.from_db(db_values, exact_half)

    @classmethod
    def parse(cls, text: str) -> "LossRange":
        """``"0:1:0.05"`` for a range, ``"0,0.25,0.5"`` for explicit values."""
        try:
            if ":" in text:
                start, stop, step = (float(part) for part in text.split(":"))
                return cls(start, stop, step)
            return cls(explicit=tuple(float(part) for part in text.split(",")))
        except ValueError:
            raise SweepSpecError(f"Cannot parse loss range {text!r}") from None

    def values(self) -> np.ndarray:
        if self.explicit is not None:
            return np.array(self.explicit, dtype=float)
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.clip(self.start + self.step * np.arange(count), 0.0, 1.0)


@dataclass(frozen=True)
class PhiGrid:
    """Evenly spaced phase grid, endpoints included."""

    phi_min: float
    phi_max: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise SweepSpecError(f"Phase grid needs at least one point, got {self.steps}")
        if not (math.isfinite(self.phi_min) and math.isfinite(self.phi_max)):
            raise SweepSpecError(
                f"Phase range must be finite, got [{self.phi_min}, {self.phi_max}]"
            )
        if self.steps > 1 and not self.phi_max > self.phi_min:
            raise SweepSpecError(f"Empty phase range [{self.phi_min}, {self.phi_max}]")

    @classmethod
    def one_period(cls, frequency: int, steps: Optional[int] = None) -> "PhiGrid":
        """One fringe period, 2 pi / (m - m')."""
        if steps is None:
            steps = get_setting("PHI_STEPS")
        return cls(0.0, 2 * math.pi / frequency, steps)

    def values(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.steps)

    def to_dict(self) -> Dict:
        return {"phi_min": self.phi_min, "phi_max": self.phi_max, "steps": self.steps}


@dataclass
class SweepSpec:
    """
    Everything one sweep command needs.

    Attributes:
        states: (m, m') pairs to evaluate
        loss_a: Delay-arm losses
        loss_b: Long-arm losses
        phi: Phase grid; None for sweeps that do not scan the phase
        output: Destination file; None writes to stdout
        output_format: csv or json
    """

    states: List[StatePair]
    loss_a: LossRange = field(default_factory=lambda: LossRange.single(0.0))
    loss_b: LossRange = field(default_factory=lambda: LossRange.single(0.5))
    phi: Optional[PhiGrid] = None
    output: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV

    def __post_init__(self):
        if not self.states:
            raise SweepSpecError("A sweep needs at least one state")
        for m, m_prime in self.states:
            check_state(m, m_prime)
        self.output_format = OutputFormat(self.output_format)


@dataclass
class TableRecord:
    """
    One row of the visibility / minimum detectable phase comparison.

    Attributes:
        m: Larger photon number
        m_prime: Smaller photon number
        visibility: Fundamental visibility as a fraction
        delta_phi_min: Minimum detectable phase over one fringe
        heisenberg: 1/(m+m')
        shot_noise: 1/sqrt(m+m')
        phi_opt: Phase at which delta_phi_min is reached
        error: Message when the row could not be evaluated
    """

    m: int
    m_prime: int
    visibility: float = math.nan
    delta_phi_min: float = math.nan
    heisenberg: float = math.nan
    shot_noise: float = math.nan
    phi_opt: float = math.nan
    error: Optional[str] = None

    def __post_init__(self):
        if self.error is not None:
            return
        if not -1e-12 <= self.visibility <= 1 + 1e-12:
            raise ValueError(f"Visibility must be between 0 and 1, got {self.visibility}")
        if self.heisenberg > self.shot_noise:
            raise ValueError(
                f"Heisenberg limit {self.heisenberg} above shot-noise limit {self.shot_noise}"
            )

    @property
    def beats_snl(self) -> bool:
        return self.error is None and self.delta_phi_min < self.shot_noise

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "m_prime": self.m_prime,
            "visibility": self.visibility,
            "delta_phi_min": self.delta_phi_min,
            "heisenberg": self.heisenberg,
            "shot_noise": self.shot_noise,
            "phi_opt": self.phi_opt,
            "beats_snl": self.beats_snl,
            "error": self.error,
        }


@dataclass
class SweepResult:
    """
    A named table of results plus the configuration that produced it.

    Grids carry a named index (rows) and are written with it; flat tables
    are written without one.
    """

    name: str
    config: Dict
    frame: pd.DataFrame
    summary: Dict = field(default_factory=dict)

    @property
    def is_grid(self) -> bool:
        return self.frame.index.name is not None
