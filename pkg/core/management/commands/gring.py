from pathlib import Path

from django.core.management.base import CommandError

from core.documents import load_formal_sum, load_lattice
from core.groupring import (
    FormalSum,
    convolve,
    heisenberg_lattice_basis,
    heisenberg_lattice_check,
    torsion_element,
    zero_divisor_probe,
    zn_fourier_criterion,
)
from core.groups import CyclicElement
from core.reports import CheckList, Provenance

from ._reporting import USAGE_ERROR, ReportCommand

KERNEL = "kernel"
NO_KERNEL = "none"


class Command(ReportCommand):
    help = "Group-ring checks: torsion zero divisors, kernel probes, Z^n symbols and rational Heisenberg lattices."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        actions = parser.add_subparsers(dest="action", required=True)

        torsion = actions.add_parser("torsion", help="1 + g + ... + g^(m-1) in the group ring of Z/m.")
        torsion.add_argument("--m", type=int, required=True)

        probe = actions.add_parser("probe", help="Search a support ball for finitely supported kernel vectors.")
        probe.add_argument("file", help="Formal-sum file.")
        probe.add_argument("--radius", type=int, required=True)
        probe.add_argument("--expect", choices=[KERNEL, NO_KERNEL])

        symbol = actions.add_parser("symbol", help="Extrema of the Fourier symbol of a sum over Z^n.")
        symbol.add_argument("file", help="Formal-sum file.")
        symbol.add_argument("--resolution", type=int, default=256)

        lattice = actions.add_parser("lattice", help="Check r (a_h . b_k) in Z for rational lattice points.")
        lattice.add_argument("file", help="Lattice file.")
        lattice.add_argument("--r", type=int, help="Overrides r from the file.")

    def build_report(self, config, **options):
        action = options["action"]
        checks = CheckList(f"gring-{action}")
        label = getattr(self, f"_{action}")(checks, config, options)
        return checks.report("gring", label)

    def _torsion(self, checks, config, options):
        m = options["m"]
        if m < 2:
            raise CommandError(f"--m must be at least 2, got {m}.", returncode=USAGE_ERROR)
        anchor = "torsion zero divisor in the cyclic group ring"
        alpha = torsion_element(m)
        difference = FormalSum([(1, CyclicElement(0, m)), (-1, CyclicElement(1, m))])
        checks.holds("zero-divisor", not convolve(alpha, difference), anchor=anchor, provenance=Provenance.PUBLISHED)

        report = zero_divisor_probe(alpha, m)
        witness = report.witness
        if witness is not None:
            self.stdout.write("kernel witness: " + " + ".join(witness.lines()))
        checks.holds(
            "kernel-witness",
            witness is not None and not convolve(alpha, witness),
            anchor=anchor,
            provenance=Provenance.PUBLISHED,
            details=report.as_record(),
        )
        return f"torsion m={m}"

    def _probe(self, checks, config, options):
        alpha = load_formal_sum(options["file"])
        report = zero_divisor_probe(alpha, options["radius"])
        if report.witness is not None:
            self.stdout.write("kernel witness: " + " + ".join(report.witness.lines()))
            found = KERNEL
        elif report.min_singular_value > config.tol_inconclusive:
            found = NO_KERNEL
        else:
            found = None
        expected = options.get("expect")
        checks.add(
            "kernel",
            passed=expected is None or found == expected,
            observed=found or "undecided",
            expected=expected or "kernel or none",
            anchor=f"formal sum {Path(options['file']).name}",
            provenance=Provenance.DERIVED,
            tolerance=config.tol_inconclusive,
            details=report.as_record(),
            inconclusive=found is None,
        )
        return options["file"]

    def _symbol(self, checks, config, options):
        alpha = load_formal_sum(options["file"])
        minimum, maximum = zn_fourier_criterion(alpha, options["resolution"])
        checks.add(
            "symbol-minimum",
            passed=minimum > config.tol_inconclusive,
            observed=minimum,
            expected=f"> {config.tol_inconclusive:.3g}",
            anchor="Fourier symbol of a sum over Z^n",
            provenance=Provenance.DERIVED,
            tolerance=config.tol_inconclusive,
            details={"minimum": minimum, "maximum": maximum, "resolution": options["resolution"]},
            inconclusive=minimum <= config.tol_inconclusive,
        )
        return options["file"]

    def _lattice(self, checks, config, options):
        points, r = load_lattice(options["file"])
        r = options.get("r") or r
        if r is None:
            raise CommandError("No r given: pass --r or set r in [lattice].", returncode=USAGE_ERROR)
        basis = heisenberg_lattice_basis(points)
        checks.holds(
            "lattice-condition",
            heisenberg_lattice_check(points, r),
            anchor="Gabor system on a rational lattice",
            provenance=Provenance.DERIVED,
            details={"r": r, "rank": len(basis), "basis": [[str(x) for x in vector] for vector in basis]},
        )
        return options["file"]
