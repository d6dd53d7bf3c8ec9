"""
Django management command locating the long-arm loss where a state stops beating its SNL
"""

from sweeps.entities import parse_state

from ._common import SweepCommand

DEFAULT_STATES = [(10, 0), (20, 10)]


class Command(SweepCommand):
    help = "Long-arm loss at which delta_phi_min reaches the shot-noise limit (delay loss fixed)"

    default_m = None
    default_mprime = None
    phase_grid = False
    loss_arms = ("a",)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--state",
            action="append",
            type=str,
            default=None,
            help="State as M:MPRIME; repeat for several (default 10:0 and 20:10)",
        )

    def states(self, options):
        if options.get("state"):
            return [parse_state(text) for text in options["state"]]
        if options.get("m") is not None and options.get("mprime") is not None:
            return [(options["m"], options["mprime"])]
        return list(DEFAULT_STATES)

    def run(self, **options):
        result = self.engine(options).thresholds(self.states(options), options["loss_a"])
        self.emit(result, options)
        if not options.get("out"):
            return
        for row in result.frame.itertuples(index=False):
            if row.reached:
                message = (
                    f"|{row.m}::{row.m_prime}> reaches SNL {row.shot_noise:.4f} "
                    f"at L_b={row.loss:.4f}"
                )
                self.stdout.write(
                    self.style.SUCCESS(message) if row.monotone else self.style.WARNING(message)
                )
            else:
                self.stdout.write(
                    self.style.WARNING(f"|{row.m}::{row.m_prime}> has no SNL crossing")
                )
