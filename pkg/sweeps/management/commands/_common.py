"""
Flags and output handling shared by the sweep commands.
"""

import argparse
import logging
from pathlib import Path
from typing import Optional, Tuple

from django.core.management.base import BaseCommand, CommandError

from photonics.conf import get_setting
from photonics.exceptions import PhotonicsError
from photonics.fock import FockOperator
from photonics.loss_channel import ArmLoss, LossyInterferometer
from photonics.metrology import detection_operator, loss_from_db, truncated_detection_operator
from sweeps.engine import SweepEngine
from sweeps.entities import LossRange, OutputFormat, PhiGrid, SweepResult, SweepSpec
from sweeps.writers import render, write_result

logger = logging.getLogger(__name__)


class SweepCommand(BaseCommand):
    """
    Base class: common flags, PhotonicsError -> CommandError, result output.

    Subclasses set the per-command defaults and implement ``run``.
    """

    requires_system_checks: list = []

    default_m: Optional[int] = 20
    default_mprime: Optional[int] = 10
    default_loss_b = 0.5
    phase_grid = True
    # Arms whose single loss value the command reads; "b" also brings --loss-b-db
    loss_arms: Tuple[str, ...] = ("a", "b")

    def add_arguments(self, parser):
        parser.add_argument("--m", type=int, default=self.default_m, help="Larger photon number")
        parser.add_argument(
            "--mprime", type=int, default=self.default_mprime, help="Smaller photon number"
        )
        if "a" in self.loss_arms:
            parser.add_argument(
                "--loss-a", type=float, default=0.0, help="Delay-arm loss fraction (default 0)"
            )
        if "b" in self.loss_arms:
            losses = parser.add_mutually_exclusive_group()
            losses.add_argument(
                "--loss-b",
                type=float,
                default=None,
                help=f"Long-arm loss fraction (default {self.default_loss_b})",
            )
            losses.add_argument(
                "--loss-b-db", type=float, default=None, help="Long-arm attenuation in dB"
            )
            self.add_exact_half_argument(parser)
        if self.phase_grid:
            parser.add_argument("--phi-min", type=float, default=None, help="Phase grid start")
            parser.add_argument("--phi-max", type=float, default=None, help="Phase grid end")
            parser.add_argument("--phi-steps", type=int, default=None, help="Phase grid size")
        parser.add_argument("--out", type=str, default=None, help="Output file (default stdout)")
        parser.add_argument(
            "--format",
            choices=[choice.value for choice in OutputFormat],
            default=OutputFormat.CSV.value,
            help="Output format",
        )
        parser.add_argument("--seed", type=int, default=0, help="Seed for random sampling")
        parser.add_argument(
            "--workers", type=int, default=None, help="Threads for independent sweep cells"
        )

    def add_exact_half_argument(self, parser):
        parser.add_argument(
            "--exact-half",
            action=argparse.BooleanOptionalAction,
            default=get_setting("EXACT_HALF_DEFAULT", "SWEEPS"),
            help="Read 3 dB as exactly 50%% loss",
        )

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except PhotonicsError as exc:
            raise CommandError(str(exc)) from exc

    def run(self, **options):
        raise NotImplementedError

    # Helpers

    def engine(self, options) -> SweepEngine:
        return SweepEngine(workers=options.get("workers"))

    def long_arm_loss(self, options) -> float:
        if options.get("loss_b_db") is not None:
            return loss_from_db(options["loss_b_db"], options["exact_half"])
        if options.get("loss_b") is not None:
            return options["loss_b"]
        return self.default_loss_b

    def arm_losses(self, options):
        return ArmLoss.from_loss(options["loss_a"]), ArmLoss.from_loss(self.long_arm_loss(options))

    def interferometer(self, options, phi: float = 0.0) -> LossyInterferometer:
        if options["m"] is None or options["mprime"] is None:
            raise CommandError("--m and --mprime are required")
        loss_a, loss_b = self.arm_losses(options)
        return LossyInterferometer(options["m"], options["mprime"], loss_a, loss_b, phi)

    def curve_sweep(self, options) -> Tuple[LossyInterferometer, SweepSpec]:
        """Configuration and sweep description for the phase-scanning commands."""
        config = self.interferometer(options)
        sweep = SweepSpec(
            states=[(config.m, config.m_prime)],
            loss_a=LossRange.single(options["loss_a"]),
            loss_b=LossRange.single(self.long_arm_loss(options)),
            phi=self.phi_grid(options, config.frequency),
            output=Path(options["out"]) if options.get("out") else None,
            output_format=options["format"],
        )
        return config, sweep

    def phi_grid(self, options, frequency: int) -> PhiGrid:
        default = PhiGrid.one_period(frequency, options.get("phi_steps"))
        phi_min = options.get("phi_min")
        phi_max = options.get("phi_max")
        return PhiGrid(
            default.phi_min if phi_min is None else phi_min,
            default.phi_max if phi_max is None else phi_max,
            default.steps,
        )

    def add_detector_arguments(self, parser):
        parser.add_argument(
            "--detector",
            choices=["matched", "truncated"],
            default="matched",
            help="Detection operator for the M&M series",
        )
        parser.add_argument(
            "--terms", type=int, default=1, help="Dyad pairs kept by the truncated detector"
        )

    def detector(self, options) -> FockOperator:
        if options.get("detector") == "truncated":
            return truncated_detection_operator(options["m"], options["mprime"], options["terms"])
        return detection_operator(options["m"], options["mprime"])

    def emit(self, result: SweepResult, options) -> None:
        """Write to --out, or print the rendered file to stdout."""
        if options.get("out"):
            path = write_result(result, options["out"], options["format"])
            self.stdout.write(self.style.SUCCESS(f"Wrote {result.name} to {path}"))
        else:
            self.stdout.write(render(result, options["format"]), ending="")
