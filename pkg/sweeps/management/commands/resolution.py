"""
Django management command for the interference fringes <A>(phi)
"""

from ._common import SweepCommand


class Command(SweepCommand):
    help = "<A> over one fringe period for |m::m'> and the N00N state of equal frequency"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--noon-n", type=int, default=None, help="N00N photon number (default m - mprime)"
        )
        self.add_detector_arguments(parser)

    def run(self, **options):
        config, sweep = self.curve_sweep(options)
        result = self.engine(options).resolution_curve(
            config,
            sweep.phi,
            noon_n=options.get("noon_n"),
            detector=self.detector(options),
        )
        self.emit(result, options)
        if options.get("out"):
            summary = result.summary
            self.stdout.write(
                f"Fringe amplitude {summary['amplitude_mm']:.4f} for |{config.m}::{config.m_prime}>"
                f", {summary['amplitude_noon']:.5f} for the N00N state"
            )
            self.stdout.write(
                f"No-loss arrival probability {summary['arrival_probability_mm']:.4f} "
                f"for |{config.m}::{config.m_prime}>, "
                f"{summary['arrival_probability_noon']:.5f} for the N00N state"
            )
