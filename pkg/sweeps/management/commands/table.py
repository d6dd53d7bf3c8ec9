"""
Django management command for the visibility / minimum detectable phase table
"""

from django.core.management.base import CommandError

from sweeps.engine import TABLE_ROWS, resolution_rows
from sweeps.entities import OutputFormat, check_state, parse_state

from ._common import SweepCommand


class Command(SweepCommand):
    help = "Visibility and minimum detectable phase for a list of M&M states"

    default_m = None
    default_mprime = None
    phase_grid = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--state",
            action="append",
            type=str,
            default=None,
            help="Row as M:MPRIME; repeat for several rows",
        )
        parser.add_argument(
            "--resolution",
            type=int,
            default=None,
            help="Rows (N+k, k) with fixed fringe frequency N",
        )
        parser.add_argument(
            "--max-mprime", type=int, default=10, help="Largest k used with --resolution"
        )

    def rows(self, options):
        if options.get("state"):
            return [parse_state(text) for text in options["state"]]
        if options.get("resolution") is not None:
            return resolution_rows(options["resolution"], options["max_mprime"])
        if options.get("m") is not None or options.get("mprime") is not None:
            if options.get("m") is None or options.get("mprime") is None:
                raise CommandError("--m and --mprime must be given together")
            check_state(options["m"], options["mprime"])
            return [(options["m"], options["mprime"])]
        return list(TABLE_ROWS)

    def run(self, **options):
        rows = self.rows(options)
        loss_long = self.long_arm_loss(options)
        engine = self.engine(options)
        if options.get("loss_b_db") is not None:
            records = engine.run_table(
                options["loss_b_db"], options["loss_a"], rows, options["exact_half"]
            )
        else:
            records = engine.run_table_at_loss(loss_long, options["loss_a"], rows)
        config = {
            "loss_a": options["loss_a"],
            "loss_b": loss_long,
            "loss_b_db": options.get("loss_b_db"),
            "rows": [list(row) for row in rows],
        }
        result = engine.table_result(records, config)

        if options.get("out"):
            self.emit(result, options)
            self.write_table(records, loss_long, options["loss_a"])
        elif options["format"] == OutputFormat.JSON.value:
            self.emit(result, options)
        else:
            self.write_table(records, loss_long, options["loss_a"])

    def write_table(self, records, loss_long: float, loss_delay: float) -> None:
        """Human-readable view, visibilities in percent."""
        self.stdout.write(f"Long-arm loss {loss_long:.6g}, delay-arm loss {loss_delay:.6g}")
        self.stdout.write("=" * 58)
        self.stdout.write(
            f"{'m':>3} {'m_prime':>7} {'V (%)':>9} {'dphi_min':>9} {'HL':>7} {'SNL':>7}  < SNL"
        )
        self.stdout.write("-" * 58)
        for record in records:
            if record.error:
                self.stdout.write(
                    self.style.ERROR(f"{record.m:>3} {record.m_prime:>7}  {record.error}")
                )
                continue
            line = (
                f"{record.m:>3} {record.m_prime:>7} {100 * record.visibility:>9.4f} "
                f"{record.delta_phi_min:>9.4f} {record.heisenberg:>7.4f} "
                f"{record.shot_noise:>7.4f}  {'yes' if record.beats_snl else 'no'}"
            )
            self.stdout.write(self.style.SUCCESS(line) if record.beats_snl else line)
