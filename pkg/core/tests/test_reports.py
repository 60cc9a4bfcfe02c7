import json
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, TestCase

from core.config import RunConfig
from core.models import CheckResult, SuiteRun
from core.reports import PLUMBING, CheckList, CheckRecord, Outcome, Provenance, Report, plain


def sample_report():
    checks = CheckList("sample")
    checks.at_most("residual", 1e-14, 1e-12, anchor=PLUMBING, provenance=Provenance.DERIVED)
    checks.close_to("constant", np.float64(1.0000001), 1.0, 1e-6, anchor="unit constant", provenance=Provenance.PUBLISHED)
    checks.above("gap", 0.5, 0.1, anchor=PLUMBING, provenance=Provenance.TRIVIAL, details={"spectrum": np.array([0.5, 1.0])})
    return checks


class PlainTests(SimpleTestCase):
    def test_unwraps_numpy_and_complex_values(self):
        value = {"a": np.int64(3), "b": np.array([1.5, 2.0]), 4: 1 + 2j, "c": np.bool_(True), "d": Outcome.PASS}
        self.assertEqual(plain(value), {"a": 3, "b": [1.5, 2.0], "4": {"re": 1.0, "im": 2.0}, "c": True, "d": "pass"})


class CheckRecordTests(SimpleTestCase):
    def test_anchor_is_required(self):
        with self.assertRaises(ValueError):
            CheckRecord("sample", "residual", "", Provenance.DERIVED, Outcome.PASS, 0.0, "<= 0")

    def test_text_line(self):
        record = sample_report().records[0]
        self.assertEqual(record.to_text(), "PASS         sample / residual: observed=1e-14 expected <= 1e-12 tol=1e-12 [derived: plumbing]")


class CheckListTests(SimpleTestCase):
    def test_comparisons(self):
        checks = CheckList("sample")
        self.assertIs(checks.at_most("a", 2.0, 1.0, anchor=PLUMBING, provenance=Provenance.DERIVED).verdict, Outcome.FAIL)
        self.assertIs(checks.above("b", 1.0, 1.0, anchor=PLUMBING, provenance=Provenance.DERIVED).verdict, Outcome.FAIL)
        self.assertIs(checks.close_to("c", 1.5, 1.0, 0.5, anchor=PLUMBING, provenance=Provenance.DERIVED).verdict, Outcome.PASS)
        self.assertIs(checks.holds("d", True, anchor=PLUMBING, provenance=Provenance.DERIVED).verdict, Outcome.PASS)

    def test_inconclusive_overrides_the_comparison(self):
        checks = CheckList("sample")
        record = checks.add(
            "undecided", passed=True, observed=None, expected="kernel", anchor=PLUMBING, provenance=Provenance.DERIVED, inconclusive=True
        )
        self.assertIs(record.verdict, Outcome.INCONCLUSIVE)


class ReportTests(SimpleTestCase):
    def test_records_are_sorted(self):
        report = sample_report().report()
        self.assertEqual([record.name for record in report.records], ["constant", "gap", "residual"])

    def test_duplicates_are_rejected(self):
        checks = sample_report()
        checks.holds("gap", True, anchor=PLUMBING, provenance=Provenance.DERIVED)
        with self.assertRaises(ValueError):
            checks.report()

    def test_exit_status(self):
        checks = sample_report()
        self.assertEqual(checks.report().exit_status, 0)
        checks.add("undecided", passed=False, observed=None, expected="x", anchor=PLUMBING, provenance=Provenance.DERIVED, inconclusive=True)
        self.assertEqual(checks.report().exit_status, 3)
        checks.holds("broken", False, anchor=PLUMBING, provenance=Provenance.DERIVED)
        report = checks.report()
        self.assertEqual(report.exit_status, 1)
        self.assertEqual(report.summary(), "3 passed, 1 failed, 1 inconclusive")

    def test_text_ends_with_the_summary(self):
        text = sample_report().report("suite").to_text()
        self.assertTrue(text.startswith("== sample ==\n"))
        self.assertTrue(text.endswith("suite sample: 3 passed, 0 failed, 0 inconclusive\n"))

    def test_jsonl_is_deterministic(self):
        first = sample_report().report().to_jsonl()
        self.assertEqual(first, sample_report().report().to_jsonl())
        lines = [json.loads(line) for line in first.splitlines()]
        self.assertEqual(len(lines), 4)
        self.assertEqual(lines[1]["details"], {"spectrum": [0.5, 1.0]})
        self.assertEqual(lines[-1], {"command": "suite", "exit_status": 0, "label": "sample", "summary": {"fail": 0, "inconclusive": 0, "pass": 3}})

    def test_merge(self):
        other = CheckList("other")
        other.holds("ok", True, anchor=PLUMBING, provenance=Provenance.DERIVED)
        merged = Report.merge("suite", [sample_report().report(), other.report()], "both")
        self.assertEqual([record.suite for record in merged.records][0], "other")
        self.assertEqual(merged.label, "both")

    def test_write(self):
        report = sample_report().report()
        with tempfile.TemporaryDirectory() as directory:
            text_path, records_path = Path(directory) / "report.txt", Path(directory) / "records.jsonl"
            report.write(text_path, records_path)
            self.assertEqual(text_path.read_text(encoding="utf-8"), report.to_text())
            self.assertEqual(records_path.read_text(encoding="utf-8"), report.to_jsonl())


class StoreTests(TestCase):
    def test_store(self):
        digest = RunConfig().digest()
        run = sample_report().report().store(seed=4, digest=digest)
        self.assertEqual((run.passed, run.failed, run.inconclusive, run.seed), (3, 0, 0, 4))
        self.assertEqual(run.exit_status, 0)
        results = list(run.results.all())
        self.assertEqual([result.name for result in results], ["constant", "gap", "residual"])
        self.assertEqual(results[2].observed, 1e-14)
        self.assertEqual(results[0].payload["anchor"], "unit constant")

    def test_boolean_observations_are_not_numbers(self):
        checks = CheckList("sample")
        checks.holds("flag", True, anchor=PLUMBING, provenance=Provenance.DERIVED)
        run = checks.report().store(seed=0, digest=RunConfig().digest())
        self.assertIsNone(run.results.get().observed)

    def test_invalid_digest_stores_nothing(self):
        with self.assertRaises(ValidationError):
            sample_report().report().store(seed=0, digest="not-a-digest")
        self.assertFalse(SuiteRun.objects.exists())
        self.assertFalse(CheckResult.objects.exists())
