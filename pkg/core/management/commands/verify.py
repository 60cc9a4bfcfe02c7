from pathlib import Path

from core.dependency import CertificateSpace, verify
from core.documents import load_certificate
from core.exceptions import AdmissibilityError, CertificateError
from core.reports import CheckList, Provenance

from ._reporting import ReportCommand


class Command(ReportCommand):
    help = "Verify a dependency certificate file in its representation space or on the group."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("certificate", help="Certificate file.")

    def build_report(self, config, **options):
        path = options["certificate"]
        document = load_certificate(path, config)
        checks = CheckList("verify")
        anchor = f"certificate {Path(path).name}"
        details = {"space": document.space.value, "terms": document.certificate.lines()}

        try:
            certificate = document.resolve()
        except (CertificateError, AdmissibilityError) as exc:
            checks.holds("transfer", False, anchor=anchor, provenance=Provenance.DERIVED, details={**details, "error": str(exc)})
            return checks.report("verify", path)

        if certificate.space is CertificateSpace.L2G:
            details["input_residual"] = certificate.source_residual
            details["box"] = document.box.describe()
        details["unnormalized"] = verify(certificate, normalized=False)
        checks.at_most(
            "residual",
            verify(certificate),
            document.tolerance,
            anchor=anchor,
            provenance=Provenance.DERIVED,
            details=details,
        )
        return checks.report("verify", path)
