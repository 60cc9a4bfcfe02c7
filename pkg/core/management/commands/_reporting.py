"""Shared plumbing for the verification commands.

Every command reads a :class:`~core.config.RunConfig`, builds a
:class:`~core.reports.Report`, prints its text form and optionally writes
the text and JSON-lines forms to files and stores it in the database.

Exit status: 0 when every check passed, 1 on a failed check, 2 for
configuration, usage and parse errors, 3 when only inconclusive checks
remain.
"""

import logging

from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from core.config import RunConfig, parse_overrides
from core.exceptions import LintransError
from core.reports import Report

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


class ReportCommand(BaseCommand):
    """Base class; subclasses implement :meth:`build_report`."""

    def add_arguments(self, parser):
        parser.add_argument("--config", help="Run configuration file (defaults to $LINTRANS_CONFIG or lintrans.env).")
        parser.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="Override one configuration key; may be repeated.",
        )
        parser.add_argument("--store", action="store_true", help="Keep the report in the database.")
        parser.add_argument("--text-output", help="Write the plain-text report here.")
        parser.add_argument("--records-output", help="Write the JSON-lines records here.")

    def build_report(self, config: RunConfig, **options) -> Report:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = RunConfig.load(options.pop("config", None), parse_overrides(options.get("overrides")))
            report = self.build_report(config, **options)
        except (ImproperlyConfigured, LintransError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

        self.stdout.write(report.to_text(), ending="")
        report.write(
            options.get("text_output") or config.run_text_output or None,
            options.get("records_output") or config.run_records_output or None,
        )
        if options.get("store"):
            report.store(seed=config.run_seed, digest=config.digest())

        status = report.exit_status
        if status:
            raise CommandError(f"{report.command}: {report.summary()}", returncode=status)
