"""
Django management command dumping the reduced density matrix of one configuration
"""

from ._common import SweepCommand


class Command(SweepCommand):
    help = "Nonzero elements of the reduced density matrix after both arm losses"

    default_m = 2
    default_mprime = 1
    phase_grid = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--phi", type=float, default=0.0, help="Unknown phase")
        parser.add_argument(
            "--tol", type=float, default=0.0, help="Drop elements with magnitude at or below this"
        )

    def run(self, **options):
        config = self.interferometer(options, phi=options["phi"])
        result = self.engine(options).density_matrix(config, options["tol"])
        self.emit(result, options)
        if options.get("out"):
            summary = result.summary
            self.stdout.write(
                f"{len(result.frame)} elements, trace {summary['trace']:.12g}, "
                f"rank {summary['rank']}, min eigenvalue {summary['min_eigenvalue']:.3e}"
            )
            self.stdout.write(
                f"All {config.total_photons} photons arrive with probability "
                f"{summary['arrival_probability']:.6g}"
            )
