from fractions import Fraction

import numpy as np
import sympy
from django.conf import settings
from django.test import SimpleTestCase
from sympy.polys.domains import QQ_I

from core.config import RunConfig
from core.dependency import CertificateSpace, RepresentationSpace, SequenceSpace, verify
from core.documents import (
    SectionedText,
    certificate_from,
    formal_sum_from,
    load_certificate,
    load_formal_sum,
    load_lattice,
    load_probe,
    parse_coefficient,
    probe_from,
)
from core.exceptions import LiteralSyntaxError
from core.groupring import CoefficientMode
from core.groups import CyclicElement, GroupKind
from core.profiles import parse_profile

SAMPLES = settings.BASE_DIR / "samples"

CERTIFICATE = """\
[certificate]
space = hpi
representation = pi-affine
target = indicator(0, 1)
grid = -1, 2, 64

[terms]
1 * affine(1, 0)
-2^(-1/2) * affine(1/2, 0)
-2^(-1/2) * affine(1/2, 1/2)
"""


class SectionedTextTests(SimpleTestCase):
    def assertErrorAt(self, text, line):
        with self.assertRaises(LiteralSyntaxError) as caught:
            SectionedText(text, "input.cert")
        self.assertEqual((caught.exception.source, caught.exception.line), ("input.cert", line))

    def test_sections_and_rows(self):
        document = SectionedText(CERTIFICATE)
        self.assertEqual(document.value("certificate", "space"), ("hpi", 2))
        self.assertEqual(len(document.section("terms").rows), 3)
        self.assertTrue(document.has("certificate", "grid"))
        self.assertFalse(document.has("certificate", "tolerance"))

    def test_comments_and_blank_lines_are_skipped(self):
        document = SectionedText("# heading\n\n[lattice]\n# r below\nr = 4\n")
        self.assertEqual(document.value("lattice", "r"), ("4", 5))

    def test_structural_errors(self):
        self.assertErrorAt("space = hpi\n", 1)
        self.assertErrorAt("[certificate]\n[rotation]\n", 2)
        self.assertErrorAt("[terms]\n1 * zn(0)\n[terms]\n", 3)
        self.assertErrorAt("[certificate]\nspace = hpi\nspace = l2g\n", 3)
        self.assertErrorAt("[certificate]\ncolour = red\n", 2)
        self.assertErrorAt("[certificate]\nspace\n", 2)

    def test_missing_pieces(self):
        document = SectionedText("[certificate]\nspace = hpi\n", "input.cert")
        with self.assertRaises(LiteralSyntaxError):
            document.section("terms")
        with self.assertRaises(LiteralSyntaxError) as caught:
            document.value("certificate", "representation")
        self.assertEqual(caught.exception.line, 1)

    def test_missing_file(self):
        with self.assertRaises(LiteralSyntaxError):
            SectionedText.read(SAMPLES / "absent.cert")


class CoefficientTests(SimpleTestCase):
    def test_float_mode(self):
        self.assertAlmostEqual(parse_coefficient("-2^(-1/2)", mode=CoefficientMode.FLOAT), -(2 ** -0.5), delta=1e-15)
        self.assertEqual(parse_coefficient("(1 + i)/2", mode=CoefficientMode.FLOAT), 0.5 + 0.5j)
        self.assertEqual(parse_coefficient("", mode=CoefficientMode.FLOAT), 1)

    def test_exact_mode(self):
        self.assertEqual(parse_coefficient("1/3 + I", mode=CoefficientMode.EXACT), QQ_I.from_sympy(sympy.Rational(1, 3) + sympy.I))
        self.assertEqual(parse_coefficient("0.5", mode=CoefficientMode.EXACT), QQ_I.from_sympy(sympy.Rational(1, 2)))

    def test_exact_mode_rejects_irrationals(self):
        with self.assertRaises(LiteralSyntaxError):
            parse_coefficient("sqrt(2)", mode=CoefficientMode.EXACT)

    def test_rejected_text(self):
        for text in ("exp(1)", "2 $ 3", "1/0", "x + 1", "(1"):
            with self.subTest(text=text), self.assertRaises(LiteralSyntaxError):
                parse_coefficient(text, mode=CoefficientMode.FLOAT, source="input.cert", line=7)


class CertificateDocumentTests(SimpleTestCase):
    def test_certificate_from_text(self):
        document = certificate_from(SectionedText(CERTIFICATE), RunConfig())
        self.assertIs(document.space, CertificateSpace.HPI)
        self.assertEqual(document.tolerance, RunConfig().tol_identity)
        self.assertIs(document.resolve(), document.certificate)
        self.assertEqual(verify(document.certificate, normalized=False), 0.0)

    def test_repeated_elements_point_at_the_terms(self):
        text = CERTIFICATE.replace("affine(1/2, 1/2)", "affine(1/2, 0)")
        with self.assertRaises(LiteralSyntaxError) as caught:
            certificate_from(SectionedText(text, "input.cert"), RunConfig())
        self.assertEqual(caught.exception.line, 7)

    def test_unknown_representation(self):
        text = CERTIFICATE.replace("pi-affine", "pi-rotation")
        with self.assertRaises(LiteralSyntaxError) as caught:
            certificate_from(SectionedText(text), RunConfig())
        self.assertEqual(caught.exception.line, 3)

    def test_sample_certificates(self):
        config = RunConfig()
        hpi = load_certificate(SAMPLES / "affine-chi.cert", config)
        self.assertEqual(hpi.tolerance, 1e-12)
        self.assertLessEqual(verify(hpi.resolve()), hpi.tolerance)

        l2g = load_certificate(SAMPLES / "affine-l2g.cert", config)
        self.assertIs(l2g.space, CertificateSpace.L2G)
        self.assertEqual(l2g.box.shape, (32, 32))
        self.assertEqual(l2g.quadrature.breakpoints, (0.5,))
        self.assertLessEqual(verify(l2g.resolve()), l2g.tolerance)


class ProbeDocumentTests(SimpleTestCase):
    def test_gabor_probe(self):
        document = load_probe(SAMPLES / "gabor.probe", RunConfig())
        self.assertIsInstance(document.space, RepresentationSpace)
        self.assertEqual(len(document.elements), 9)
        self.assertEqual(document.threshold, RunConfig().tol_spectral)

    def test_sequence_probe(self):
        document = load_probe(SAMPLES / "torsion-translates.probe", RunConfig())
        self.assertIsInstance(document.space, SequenceSpace)
        self.assertIs(document.function.mode, CoefficientMode.EXACT)
        self.assertEqual(document.elements[2], CyclicElement(2, 3))

    def test_unknown_space(self):
        text = "[probe]\nspace = banach\nrepresentation = schroedinger\nfunction = gaussian\n[elements]\nwh(0, 0, 0)\n"
        with self.assertRaises(LiteralSyntaxError) as caught:
            probe_from(SectionedText(text), RunConfig())
        self.assertEqual(caught.exception.line, 2)


class FormalSumDocumentTests(SimpleTestCase):
    def test_sample_sums(self):
        torsion = load_formal_sum(SAMPLES / "torsion.sum")
        self.assertEqual(torsion.signature, (GroupKind.CYCLIC, 4))
        self.assertEqual(len(torsion), 4)
        plane = load_formal_sum(SAMPLES / "plane.sum")
        self.assertIs(plane.mode, CoefficientMode.FLOAT)
        self.assertEqual(plane.signature, (GroupKind.ZN, 2))

    def test_mode_defaults_to_exact(self):
        alpha = formal_sum_from(SectionedText("[formal-sum]\n[terms]\n1/2 * zn(1)\n"))
        self.assertIs(alpha.mode, CoefficientMode.EXACT)

    def test_mixed_groups_point_at_the_terms(self):
        text = "[formal-sum]\nmode = exact\n[terms]\nzn(0)\nzmod(1, 2)\n"
        with self.assertRaises(LiteralSyntaxError) as caught:
            formal_sum_from(SectionedText(text))
        self.assertEqual(caught.exception.line, 3)

    def test_empty_terms(self):
        with self.assertRaises(LiteralSyntaxError):
            formal_sum_from(SectionedText("[formal-sum]\n[terms]\n"))


class LatticeDocumentTests(SimpleTestCase):
    def test_sample_lattice(self):
        points, r = load_lattice(SAMPLES / "half-lattice.lattice")
        self.assertEqual(r, 4)
        self.assertEqual(len(points), 9)
        self.assertEqual(points[4], ((Fraction(1, 2),), (Fraction(1, 2),)))


class ProfileLiteralTests(SimpleTestCase):
    def test_arguments(self):
        chi = parse_profile("indicator(1/2, 3)")
        self.assertEqual(chi(np.array([0.25, 1.0, 3.0])).tolist(), [0.0, 1.0, 0.0])

    def test_unreadable_arguments(self):
        for text in ("indicator(1/0, 1)", "indicator(x, 1)", "gaussian(1, 2, 3)"):
            with self.subTest(text=text), self.assertRaises(LiteralSyntaxError):
                parse_profile(text)
