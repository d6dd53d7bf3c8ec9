"""
Django management command cross-checking the closed-form density matrix against
the four-mode beam-splitter simulation
"""

from django.core.management.base import CommandError

from photonics.exceptions import OracleGuardError

from ._common import SweepCommand


class Command(SweepCommand):
    help = "Compare closed-form and brute-force reduced density matrices on seeded random draws"

    default_m = None
    default_mprime = None
    phase_grid = False
    loss_arms = ()

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--max-m", type=int, default=4, help="Largest m drawn (at most 8)")
        parser.add_argument("--samples", type=int, default=100, help="Number of random draws")
        parser.add_argument(
            "--tolerance", type=float, default=None, help="Largest accepted element difference"
        )

    def run(self, **options):
        try:
            report = self.engine(options).verify_oracle(
                options["max_m"], options["samples"], options["seed"], options.get("tolerance")
            )
        except OracleGuardError as exc:
            raise CommandError(f"Oracle guard: {exc}") from exc

        if options.get("out"):
            self.emit(report.to_result(), options)

        self.stdout.write("=" * 50)
        self.stdout.write(
            f"{report.samples} draws, m <= {report.max_m}, seed {report.seed}: "
            f"max |difference| = {report.max_difference:.3e}"
        )
        if not report.passed:
            self.stdout.write(self.style.ERROR(f"Worst case: {report.worst_case}"))
            raise CommandError(
                f"Closed form and oracle differ by {report.max_difference:.3e} "
                f"(tolerance {report.tolerance:.1e})"
            )
        self.stdout.write(self.style.SUCCESS(f"Passed (tolerance {report.tolerance:.1e})"))
