from core.suites import run_suites, suite_names

from ._reporting import ReportCommand


class Command(ReportCommand):
    help = "Run canned verification suites; 'all' runs every suite."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("names", nargs="*", help="Suite names, or 'all'.")
        parser.add_argument("--list", action="store_true", help="List the registered suites and exit.")

    def handle(self, *args, **options):
        if options["list"]:
            for name in suite_names():
                self.stdout.write(name)
            return
        super().handle(*args, **options)

    def build_report(self, config, **options):
        names = options["names"] or ["all"]
        label = " ".join(names)
        if "all" in names:
            names = suite_names()
        return run_suites(dict.fromkeys(names), config, label=label)
