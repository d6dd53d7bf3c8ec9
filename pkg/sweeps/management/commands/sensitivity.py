"""
Django management command for phase-sensitivity curves, M&M against N00N
"""

from ._common import SweepCommand


class Command(SweepCommand):
    help = "delta-phi over one fringe period for |m::m'> and the N00N state of equal frequency"

    default_loss_b = 0.4

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--noon-n", type=int, default=None, help="N00N photon number (default m - mprime)"
        )
        self.add_detector_arguments(parser)

    def run(self, **options):
        config, sweep = self.curve_sweep(options)
        result = self.engine(options).sensitivity_curve(
            config,
            sweep.phi,
            noon_n=options.get("noon_n"),
            detector=self.detector(options),
        )
        self.emit(result, options)
        if options.get("out"):
            self.write_summary(result.summary, result.frame.iloc[0])

    def write_summary(self, summary, limits) -> None:
        mm, noon = summary["mm_minimum"], summary["noon_minimum"]
        self.stdout.write(
            f"M&M  minimum {mm['delta_phi']:.4f} at phi={mm['phi']:.4f} "
            f"(SNL {limits['snl_mm']:.4f}, HL {limits['hl_mm']:.4f})"
        )
        self.stdout.write(
            f"N00N minimum {noon['delta_phi']:.4f} at phi={noon['phi']:.4f} "
            f"(SNL {limits['snl_noon']:.4f})"
        )
        for key, name in (("mm_beats_snl", "M&M"), ("noon_beats_snl", "N00N")):
            if summary[key]:
                self.stdout.write(self.style.SUCCESS(f"{name} state is below its shot-noise limit"))
            else:
                self.stdout.write(self.style.WARNING(f"{name} state is above its shot-noise limit"))
