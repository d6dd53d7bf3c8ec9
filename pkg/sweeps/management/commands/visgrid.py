"""
Django management command for the fundamental visibility over both arm losses
"""

from pathlib import Path

from django.core.management.base import CommandError

from sweeps.entities import LossRange, SweepSpec, check_state
from sweeps.writers import write_result

from ._common import SweepCommand

DEFAULT_GRID = "0:1:0.05"


def ratio_path(path: Path) -> Path:
    """grid.csv -> grid_ratio.csv"""
    return path.with_name(f"{path.stem}_ratio{path.suffix}")


class Command(SweepCommand):
    help = "Fundamental visibility V_f on a grid of delay-arm (rows) and long-arm (columns) losses"

    phase_grid = False
    loss_arms = ()

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--loss-a-grid",
            type=str,
            default=DEFAULT_GRID,
            help="Delay-arm losses as START:STOP:STEP or a comma list",
        )
        long_arm = parser.add_mutually_exclusive_group()
        long_arm.add_argument(
            "--loss-b-grid",
            type=str,
            default=None,
            help=f"Long-arm losses as START:STOP:STEP or a comma list (default {DEFAULT_GRID})",
        )
        long_arm.add_argument(
            "--loss-b-db-grid",
            type=str,
            default=None,
            help="Long-arm attenuations in dB as a comma list",
        )
        self.add_exact_half_argument(parser)
        parser.add_argument(
            "--compare-m", type=int, default=None, help="Reference state m for a ratio grid"
        )
        parser.add_argument(
            "--compare-mprime", type=int, default=None, help="Reference state mprime"
        )

    def long_arm_range(self, options) -> LossRange:
        if options.get("loss_b_db_grid") is not None:
            return LossRange.parse_db(options["loss_b_db_grid"], options["exact_half"])
        return LossRange.parse(options.get("loss_b_grid") or DEFAULT_GRID)

    def run(self, **options):
        sweep = SweepSpec(
            states=[(options["m"], options["mprime"])],
            loss_a=LossRange.parse(options["loss_a_grid"]),
            loss_b=self.long_arm_range(options),
            output=Path(options["out"]) if options.get("out") else None,
            output_format=options["format"],
        )
        compare = (options.get("compare_m"), options.get("compare_mprime"))
        if compare != (None, None):
            if None in compare:
                raise CommandError("--compare-m and --compare-mprime must be given together")
            if sweep.output is None:
                raise CommandError("A ratio grid needs --out")
            check_state(*compare)

        loss_a, loss_b = sweep.loss_a.values(), sweep.loss_b.values()
        engine = self.engine(options)
        m, m_prime = sweep.states[0]
        grid = engine.visibility_grid(m, m_prime, loss_a, loss_b)
        if compare == (None, None):
            self.emit(grid, options)
            return

        reference = engine.visibility_grid(compare[0], compare[1], loss_a, loss_b)
        ratio = engine.visibility_ratio_grid(grid, reference)
        self.emit(grid, options)
        path = write_result(ratio, ratio_path(sweep.output), sweep.output_format)
        self.stdout.write(self.style.SUCCESS(f"Wrote {ratio.name} to {path}"))
