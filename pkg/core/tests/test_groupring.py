import math
from fractions import Fraction
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ElementError, FormalSumError
from core.groupring import (
    CoefficientMode,
    FormalSum,
    convolution_matrix,
    convolution_matrix_by_sum,
    convolve,
    heisenberg_lattice_basis,
    heisenberg_lattice_check,
    left_translate,
    support_ball,
    torsion_element,
    zero_divisor_probe,
    zn_fourier_criterion,
)
from core.groups import CyclicElement, GroupKind, HeisenbergLatticeElement, ZnElement


def heis(z, a, b):
    return HeisenbergLatticeElement(Fraction(z), (Fraction(a),), (Fraction(b),))


class FormalSumTests(SimpleTestCase):
    def test_repeated_elements_are_combined(self):
        alpha = FormalSum([(1, ZnElement((1,))), (2, ZnElement((1,))), (-3, ZnElement((0,)))])
        self.assertEqual(alpha.lines(), ["-3 * zn(0)", "3 * zn(1)"])
        self.assertFalse(FormalSum([(1, ZnElement((2,))), (-1, ZnElement((2,)))]))

    def test_exact_sums_reject_floats(self):
        with self.assertRaises(FormalSumError):
            FormalSum([(0.5, ZnElement((0,)))])
        half = FormalSum([(Fraction(1, 2), ZnElement((0,)))])
        self.assertEqual(half.lines(), ["1/2 * zn(0)"])

    def test_modes_do_not_mix(self):
        exact = FormalSum.delta(ZnElement((0,)))
        with self.assertRaises(FormalSumError):
            exact + exact.as_float()
        with self.assertRaises(FormalSumError):
            convolve(exact, exact.as_float())

    def test_groups_do_not_mix(self):
        with self.assertRaises(FormalSumError):
            FormalSum([(1, ZnElement((0,))), (1, CyclicElement(0, 3))])
        with self.assertRaises(FormalSumError):
            FormalSum.delta(ZnElement((0,))) + FormalSum.delta(ZnElement((0, 0)))

    def test_empty_sums_need_a_signature(self):
        with self.assertRaises(FormalSumError):
            FormalSum()
        zero = FormalSum(signature=(GroupKind.ZN, 1))
        self.assertEqual(len(zero), 0)
        self.assertEqual(zero.kind, GroupKind.ZN)

    def test_left_translation(self):
        f = FormalSum([(1, CyclicElement(0, 5)), (2, CyclicElement(4, 5))])
        shifted = left_translate(CyclicElement(1, 5), f)
        self.assertEqual(shifted, FormalSum([(1, CyclicElement(1, 5)), (2, CyclicElement(0, 5))]))

    def test_float_inner_product(self):
        f = FormalSum([(1j, ZnElement((0,))), (2, ZnElement((1,)))], mode=CoefficientMode.FLOAT)
        self.assertEqual(f.inner(f), 5)
        self.assertEqual(f.norm2(), 5.0)


class ConvolutionTests(SimpleTestCase):
    def test_torsion_element_is_a_zero_divisor(self):
        for m in range(2, 8):
            with self.subTest(m=m):
                difference = FormalSum([(1, CyclicElement(0, m)), (-1, CyclicElement(1, m))])
                self.assertFalse(convolve(torsion_element(m), difference))

    def test_heisenberg_convolution_is_not_commutative(self):
        alpha = FormalSum([(1, heis(0, "1/2", 0))])
        beta = FormalSum([(1, heis(0, 0, "1/2"))])
        self.assertNotEqual(convolve(alpha, beta), convolve(beta, alpha))

    def test_matrix_agrees_with_brute_force(self):
        pools = {
            "zn": FormalSum([(1, ZnElement((0, 0))), (-2, ZnElement((1, 0))), (1, ZnElement((0, -1)))]),
            "zmod": FormalSum([(1, CyclicElement(0, 7)), (3, CyclicElement(2, 7))]),
            "heis": FormalSum([(1, heis(0, "1/2", 0)), (-1, heis("1/4", 0, "1/3"))]),
        }
        for name, alpha in pools.items():
            with self.subTest(group=name):
                columns = support_ball(alpha.support()[0], 1, alpha.support())
                matrix = convolution_matrix(alpha, columns)
                np.testing.assert_array_equal(matrix.entries, convolution_matrix_by_sum(alpha, matrix.rows, columns))
                self.assertIsNotNone(matrix.exact)

    def test_zero_sum_has_no_matrix(self):
        with self.assertRaises(FormalSumError):
            convolution_matrix(FormalSum(signature=(GroupKind.ZN, 1)), [ZnElement((0,))])


class RingAxiomTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(17)
        quarter = [Fraction(k, 4) for k in range(-4, 5)]
        self.pools = {
            "zn": lambda: ZnElement(tuple(int(x) for x in self.rng.integers(-2, 3, size=2))),
            "zmod": lambda: CyclicElement(int(self.rng.integers(0, 7)), 7),
            "heis": lambda: heis(*(quarter[i] for i in self.rng.integers(0, len(quarter), size=3))),
        }

    def random_sum(self, element):
        size = int(self.rng.integers(1, 5))
        return FormalSum([(int(self.rng.integers(-3, 4)) or 1, element()) for _ in range(size)])

    def test_associative_and_distributive(self):
        for name, element in self.pools.items():
            for _ in range(10):
                with self.subTest(group=name):
                    x, y, z = (self.random_sum(element) for _ in range(3))
                    self.assertEqual(convolve(convolve(x, y), z), convolve(x, convolve(y, z)))
                    self.assertEqual(convolve(x, y + z), convolve(x, y) + convolve(x, z))
                    self.assertEqual(convolve(x + y, z), convolve(x, z) + convolve(y, z))


class SupportBallTests(SimpleTestCase):
    def test_zn_box(self):
        self.assertEqual(len(support_ball(ZnElement((0, 0)), 2)), 25)

    def test_cyclic_word_length(self):
        residues = [g.residue for g in support_ball(CyclicElement(0, 7), 2)]
        self.assertEqual(residues, [0, 1, 2, 5, 6])

    def test_heisenberg_needs_generators(self):
        with self.assertRaises(ElementError):
            support_ball(heis(0, 0, 0), 1)
        ball = support_ball(heis(0, 0, 0), 1, [heis(0, 1, 0)])
        self.assertEqual(len(ball), 3)

    def test_negative_radius(self):
        with self.assertRaises(FormalSumError):
            support_ball(ZnElement((0,)), -1)


class ZeroDivisorProbeTests(SimpleTestCase):
    def test_torsion_kernel_witness(self):
        alpha = torsion_element(4)
        report = zero_divisor_probe(alpha, 2)
        self.assertTrue(report.exact)
        self.assertEqual(report.kernel_dimension, 3)
        self.assertEqual(report.min_singular_value, 0.0)
        self.assertFalse(convolve(alpha, report.witness))

    def test_integer_line_has_no_finite_kernel(self):
        alpha = FormalSum((1, ZnElement((k,))) for k in range(4))
        report = zero_divisor_probe(alpha, 2)
        self.assertIsNone(report.witness)
        self.assertEqual(report.kernel_dimension, 0)
        self.assertGreater(report.min_singular_value, 0.0)
        self.assertIn("finite-support", report.as_record()["note"])

    def test_float_mode(self):
        alpha = FormalSum([(1, CyclicElement(k, 3)) for k in range(3)], mode=CoefficientMode.FLOAT)
        report = zero_divisor_probe(alpha, 1)
        self.assertFalse(report.exact)
        self.assertIsNotNone(report.witness)
        self.assertLess(convolve(alpha, report.witness).norm2(), 1e-20)


class FourierCriterionTests(SimpleTestCase):
    def test_difference_symbol(self):
        alpha = FormalSum([(1, ZnElement((0,))), (-1, ZnElement((1,)))])
        minimum, maximum = zn_fourier_criterion(alpha, 8)
        self.assertAlmostEqual(minimum, 2 * math.sin(math.pi / 16), delta=1e-12)
        self.assertAlmostEqual(maximum, 2 * math.sin(7 * math.pi / 16), delta=1e-12)

    def test_only_zn(self):
        with self.assertRaises(FormalSumError):
            zn_fourier_criterion(torsion_element(3), 8)
        with self.assertRaises(FormalSumError):
            zn_fourier_criterion(FormalSum.delta(ZnElement((0,))), 0)


class HeisenbergLatticeTests(SimpleTestCase):
    def setUp(self):
        half = Fraction(1, 2)
        self.points = [((a,), (b,)) for a in (0, half, -half) for b in (0, half, -half)]

    def test_condition_on_r(self):
        self.assertTrue(heisenberg_lattice_check(self.points, 4))
        self.assertFalse(heisenberg_lattice_check(self.points, 2))

    def test_basis(self):
        basis = heisenberg_lattice_basis(self.points)
        self.assertEqual(len(basis), 2)
        self.assertEqual(heisenberg_lattice_basis([((0,), (0,))]), [])

    def test_invalid_input(self):
        with self.assertRaises(ElementError):
            heisenberg_lattice_check(self.points, 0)
        with self.assertRaises(ElementError):
            heisenberg_lattice_check([((0.5,), (0.5,))], 4)
        with self.assertRaises(ElementError):
            heisenberg_lattice_check([], 4)

    def test_order_of_points_does_not_matter(self):
        rng = np.random.default_rng(19)
        for _ in range(5):
            shuffled = [self.points[i] for i in rng.permutation(len(self.points))]
            self.assertTrue(heisenberg_lattice_check(shuffled, 4))
            self.assertFalse(heisenberg_lattice_check(shuffled, 2))

    def test_basis_must_generate_the_points(self):
        one, zero = Fraction(1), Fraction(0)
        for basis in ([(one, zero)], [(one, zero), (2 * one, zero)], [(one, zero), (zero, one)]):
            with self.subTest(basis=basis):
                with mock.patch("core.groupring.heisenberg_lattice_basis", return_value=basis):
                    self.assertFalse(heisenberg_lattice_check(self.points, 4))
