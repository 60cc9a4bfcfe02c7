from core import profiles
from core.coefficients import MatrixCoefficient, admissibility_constant, calderon_energy_check, write_coefficient_csv
from core.numerics import SampledFunction
from core.reports import CheckList, Provenance
from core.representations import RepresentationKind, RepresentationTag

from ._reporting import ReportCommand

AFFINE_KINDS = [RepresentationKind.AFFINE.value, RepresentationKind.AFFINE_PLUS.value]


class Command(ReportCommand):
    help = "Compute the Calderon admissibility constant of a profile, optionally with the energy identity."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--profile", default="odd-gaussian", help="Profile such as odd-gaussian or bump.")
        parser.add_argument("--representation", choices=AFFINE_KINDS, default=RepresentationKind.AFFINE.value)
        parser.add_argument("--energy", action="store_true", help="Also compare both sides of the energy identity.")
        parser.add_argument("--csv", help="Write |F(a, b)| = |<u, pi(a, b) u>| on the transfer box to this file.")

    def build_report(self, config, **options):
        rep = RepresentationTag.named(options["representation"])
        grid = config.half_line_grid() if rep.kind is RepresentationKind.AFFINE_PLUS else config.line_grid()
        u = SampledFunction.from_profile(grid, profiles.parse_profile(options["profile"]))
        label = f"{options['profile']} under {rep.name}"
        anchor = "Calderon admissibility constant"

        checks = CheckList("admissibility")
        report = admissibility_constant(rep, u, **config.admissibility_options())
        checks.add(
            "constant",
            passed=report.constant > 0,
            observed=report.constant,
            expected="> 0 and settled at both ends",
            anchor=anchor,
            provenance=Provenance.DERIVED,
            details=report.as_record(),
            inconclusive=not report.convergent,
        )

        if options.get("energy"):
            if rep.kind is not RepresentationKind.AFFINE:
                self.stderr.write("The energy identity is checked for pi-affine only; skipping.")
            elif report.convergent:
                lhs, rhs = calderon_energy_check(rep, u, u, box=config.energy_box(), admissibility=report)
                checks.close_to(
                    "energy-ratio",
                    lhs / rhs,
                    1.0,
                    0.02,
                    anchor="Calderon energy identity",
                    provenance=Provenance.DERIVED,
                    details={"lhs": lhs, "rhs": rhs, "box": config.energy_box().describe()},
                )

        if options.get("csv"):
            coefficient = MatrixCoefficient(rep, u, u, config.transfer_box())
            with open(options["csv"], "w", newline="", encoding="utf-8") as stream:
                write_coefficient_csv(coefficient, stream)
        return checks.report("admissibility", label)
