import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from core.models import SuiteRun

SAMPLES = settings.BASE_DIR / "samples"


class CommandTestMixin:
    def setUp(self):
        super().setUp()
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.directory = Path(directory.name)

    def write(self, name, text):
        path = self.directory / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    def run_command(self, *args):
        stdout, stderr = StringIO(), StringIO()
        try:
            call_command(*args, stdout=stdout, stderr=stderr)
        except CommandError as exc:
            status = exc.returncode
        else:
            status = 0
        return status, stdout.getvalue(), stderr.getvalue()


class SuiteCommandTests(CommandTestMixin, TestCase):
    def test_list(self):
        status, out, _ = self.run_command("suite", "--list")
        self.assertEqual(status, 0)
        self.assertIn("torsion-free\n", out)

    def test_passing_suite(self):
        status, out, _ = self.run_command("suite", "torsion")
        self.assertEqual(status, 0)
        self.assertTrue(out.endswith("suite torsion: 44 passed, 0 failed, 0 inconclusive\n"))

    def test_unknown_suite_is_a_usage_error(self):
        status, _, _ = self.run_command("suite", "rotation")
        self.assertEqual(status, 2)

    def test_bad_configuration_is_a_usage_error(self):
        self.assertEqual(self.run_command("suite", "torsion", "--set", "RUN_JOBS=0")[0], 2)
        self.assertEqual(self.run_command("suite", "torsion", "--set", "TOL_BOGUS=1")[0], 2)
        self.assertEqual(self.run_command("suite", "torsion", "--set", "RUN_SEED")[0], 2)
        self.assertEqual(self.run_command("suite", "torsion", "--config", str(self.directory / "absent.env"))[0], 2)

    def test_outputs_and_store(self):
        text_path = self.directory / "report.txt"
        records_path = self.directory / "records.jsonl"
        status, out, _ = self.run_command(
            "suite", "torsion", "--text-output", str(text_path), "--records-output", str(records_path), "--store"
        )
        self.assertEqual(status, 0)
        self.assertEqual(text_path.read_text(encoding="utf-8"), out)
        last = json.loads(records_path.read_text(encoding="utf-8").splitlines()[-1])
        self.assertEqual(last["exit_status"], 0)
        run = SuiteRun.objects.get()
        self.assertEqual((run.command, run.label, run.passed), ("suite", "torsion", 44))
        self.assertEqual(run.results.count(), 44)

    def test_output_paths_from_the_configuration(self):
        records_path = self.directory / "configured.jsonl"
        status, _, _ = self.run_command("suite", "torsion", "--set", f"RUN_RECORDS_OUTPUT={records_path}")
        self.assertEqual(status, 0)
        self.assertTrue(records_path.is_file())


class VerifyCommandTests(CommandTestMixin, SimpleTestCase):
    def test_sample_certificates(self):
        for name in ("affine-chi.cert", "affine-l2g.cert"):
            with self.subTest(certificate=name):
                status, out, _ = self.run_command("verify", str(SAMPLES / name))
                self.assertEqual(status, 0, out)

    def test_wrong_coefficient_fails(self):
        text = (SAMPLES / "affine-chi.cert").read_text(encoding="utf-8").replace("1 * affine(1, 0)", "2 * affine(1, 0)")
        status, out, _ = self.run_command("verify", self.write("wrong.cert", text))
        self.assertEqual(status, 1)
        self.assertIn("FAIL", out)

    def test_unverified_transfer_input_fails(self):
        text = (SAMPLES / "affine-l2g.cert").read_text(encoding="utf-8").replace("1 * affine(1, 0)", "2 * affine(1, 0)")
        status, out, _ = self.run_command("verify", self.write("wrong-l2g.cert", text))
        self.assertEqual(status, 1)
        self.assertIn("verify / transfer", out)

    def test_malformed_certificate_is_a_usage_error(self):
        self.assertEqual(self.run_command("verify", self.write("short.cert", "[certificate]\nspace = hpi\n"))[0], 2)
        self.assertEqual(self.run_command("verify", str(self.directory / "absent.cert"))[0], 2)


class ProbeCommandTests(CommandTestMixin, SimpleTestCase):
    def test_expected_verdicts(self):
        self.assertEqual(self.run_command("probe", str(SAMPLES / "gabor.probe"), "--expect", "independent")[0], 0)
        self.assertEqual(self.run_command("probe", str(SAMPLES / "gabor.probe"), "--expect", "dependent")[0], 1)
        self.assertEqual(self.run_command("probe", str(SAMPLES / "torsion-translates.probe"), "--expect", "dependent")[0], 0)

    def test_without_expectation(self):
        status, out, _ = self.run_command("probe", str(SAMPLES / "gabor.probe"))
        self.assertEqual(status, 0)
        self.assertIn("observed=independent", out)

    def test_near_coincident_translates_are_inconclusive(self):
        text = (
            "[probe]\nspace = hpi\nrepresentation = schroedinger\nfunction = gaussian\n"
            "threshold = 1\nfloor = 1e-12\n\n[elements]\nwh(0, 0, 0)\nwh(0, 0, 1/100)\n"
        )
        with self.assertLogs("core.dependency", "WARNING"):
            status, _, _ = self.run_command("probe", self.write("close.probe", text))
        self.assertEqual(status, 3)


class AdmissibilityCommandTests(CommandTestMixin, SimpleTestCase):
    def test_odd_gaussian(self):
        status, out, _ = self.run_command("admissibility")
        self.assertEqual(status, 0)
        self.assertIn("admissibility odd-gaussian under pi-affine", out)

    def test_energy_identity(self):
        status, out, _ = self.run_command("admissibility", "--energy")
        self.assertEqual(status, 0)
        self.assertIn("energy-ratio", out)

    def test_nonzero_mean_is_inconclusive(self):
        with self.assertLogs("core.coefficients", "WARNING"):
            status, _, _ = self.run_command("admissibility", "--profile", "gaussian")
        self.assertEqual(status, 3)

    def test_positive_frequencies(self):
        status, out, err = self.run_command(
            "admissibility", "--representation", "pi-plus", "--profile", "half-line-wavelet", "--energy"
        )
        self.assertEqual(status, 0)
        self.assertNotIn("energy-ratio", out)
        self.assertIn("skipping", err)

    def test_csv(self):
        path = self.directory / "coefficient.csv"
        status, _, _ = self.run_command("admissibility", "--csv", str(path))
        self.assertEqual(status, 0)
        rows = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(rows[0], "a,b,abs_F")
        self.assertEqual(len(rows), 1 + 32 * 32)

    def test_unknown_profile_is_a_usage_error(self):
        self.assertEqual(self.run_command("admissibility", "--profile", "mexican-hat")[0], 2)

    def test_division_by_zero_in_a_profile_argument_is_a_usage_error(self):
        self.assertEqual(self.run_command("admissibility", "--profile", "indicator(1/0, 1)")[0], 2)


class GroupRingCommandTests(CommandTestMixin, SimpleTestCase):
    def test_torsion(self):
        status, out, _ = self.run_command("gring", "torsion", "--m", "4")
        self.assertEqual(status, 0)
        self.assertIn("kernel witness: ", out)
        self.assertEqual(self.run_command("gring", "torsion", "--m", "1")[0], 2)

    def test_probe(self):
        self.assertEqual(self.run_command("gring", "probe", str(SAMPLES / "torsion.sum"), "--radius", "2", "--expect", "kernel")[0], 0)
        self.assertEqual(self.run_command("gring", "probe", str(SAMPLES / "integer-line.sum"), "--radius", "2", "--expect", "none")[0], 0)
        self.assertEqual(self.run_command("gring", "probe", str(SAMPLES / "integer-line.sum"), "--radius", "2", "--expect", "kernel")[0], 1)

    def test_symbol(self):
        self.assertEqual(self.run_command("gring", "symbol", str(SAMPLES / "plane.sum"))[0], 0)
        vanishing = self.write("vanishing.sum", "[formal-sum]\n[terms]\nzn(0)\nzn(1)\n")
        self.assertEqual(self.run_command("gring", "symbol", vanishing, "--resolution", "3")[0], 3)
        self.assertEqual(self.run_command("gring", "symbol", str(SAMPLES / "torsion.sum"))[0], 2)

    def test_lattice(self):
        self.assertEqual(self.run_command("gring", "lattice", str(SAMPLES / "half-lattice.lattice"))[0], 0)
        self.assertEqual(self.run_command("gring", "lattice", str(SAMPLES / "half-lattice.lattice"), "--r", "2")[0], 1)
        missing_r = self.write("no-r.lattice", "[elements]\nheis(0; 1/2; 1/2)\n")
        self.assertEqual(self.run_command("gring", "lattice", missing_r)[0], 2)
