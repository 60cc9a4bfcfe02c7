from pathlib import Path

from core.dependency import Verdict, probe_independence
from core.documents import load_probe
from core.reports import CheckList, Provenance

from ._reporting import ReportCommand


class Command(ReportCommand):
    help = "Probe the translates listed in a probe file for linear independence."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("probe", help="Probe file.")
        parser.add_argument(
            "--expect",
            choices=[Verdict.INDEPENDENT.value, Verdict.DEPENDENT.value],
            help="Fail unless the probe reaches this verdict.",
        )

    def build_report(self, config, **options):
        path = options["probe"]
        document = load_probe(path, config)
        probe = probe_independence(document.space, document.elements, document.function, document.threshold, document.floor)
        checks = CheckList("probe")
        anchor = f"probe {Path(path).name}"
        if options.get("expect"):
            checks.probe("verdict", probe, Verdict(options["expect"]), anchor=anchor, provenance=Provenance.DERIVED)
        else:
            checks.add(
                "verdict",
                passed=True,
                observed=probe.verdict.value,
                expected="independent or dependent",
                anchor=anchor,
                provenance=Provenance.DERIVED,
                tolerance=probe.threshold,
                details=probe.as_record(),
                inconclusive=probe.verdict is Verdict.INCONCLUSIVE,
            )
        return checks.report("probe", path)
