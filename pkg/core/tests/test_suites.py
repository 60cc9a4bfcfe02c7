from django.test import SimpleTestCase

from core.config import RunConfig
from core.exceptions import UnknownSuiteError
from core.reports import Outcome
from core.suites import canned_suite, run_suites, suite_names, suite_rng

FAST = ["refinement-chi", "schroedinger-homomorphism", "torsion"]


class RegistryTests(SimpleTestCase):
    def test_names(self):
        self.assertEqual(
            suite_names(),
            [
                "affine-L2G",
                "affine-Z-independence",
                "affine-chi",
                "calderon",
                "gabor-hrt",
                "oracle-equivalence",
                "pi-plus-fourier",
                "refinement-chi",
                "schroedinger-homomorphism",
                "shearlet-identity",
                "shearlet-independence",
                "torsion",
                "torsion-free",
                "wh-orthogonality",
            ],
        )

    def test_unknown_suite(self):
        with self.assertRaises(UnknownSuiteError):
            canned_suite("rotation")
        with self.assertRaises(UnknownSuiteError):
            run_suites(["torsion", "rotation"], RunConfig())
        with self.assertRaises(UnknownSuiteError) as raised:
            canned_suite("rotation")
        self.assertTrue(str(raised.exception).startswith("Unknown suite 'rotation';"))

    def test_generators_depend_on_seed_and_name(self):
        first = suite_rng("torsion-free", 0).random()
        self.assertEqual(first, suite_rng("torsion-free", 0).random())
        self.assertNotEqual(first, suite_rng("torsion-free", 1).random())
        self.assertNotEqual(first, suite_rng("oracle-equivalence", 0).random())


class DeterminismTests(SimpleTestCase):
    def test_same_seed_same_records(self):
        config = RunConfig(run_seed=5)
        self.assertEqual(canned_suite("torsion-free", config).to_jsonl(), canned_suite("torsion-free", config).to_jsonl())

    def test_threads_do_not_change_the_report(self):
        sequential = run_suites(FAST, RunConfig())
        threaded = run_suites(reversed(FAST), RunConfig(run_jobs=3), label=" ".join(FAST))
        self.assertEqual(sequential.to_jsonl(), threaded.to_jsonl())
        self.assertEqual(sequential.to_text(), threaded.to_text())

    def test_records_carry_their_suite(self):
        report = canned_suite("torsion")
        self.assertEqual({record.suite for record in report.records}, {"torsion"})
        self.assertEqual(len(report.records), 44)


class CannedSuiteTests(SimpleTestCase):
    def test_every_suite_passes_at_the_default_configuration(self):
        config = RunConfig()
        for name in suite_names():
            with self.subTest(suite=name):
                report = canned_suite(name, config)
                self.assertTrue(report.records)
                failed = [record.name for record in report.records if record.verdict is not Outcome.PASS]
                self.assertEqual(failed, [], report.to_text())
