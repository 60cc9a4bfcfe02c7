import numpy as np
from django.test import SimpleTestCase

from core import profiles
from core.exceptions import RepresentationError
from core.groups import AffineElement, ShearletElement, WeylHeisenbergElement
from core.numerics import Grid, SampledFunction, fourier_transform, inner_product
from core.representations import (
    RepresentationKind,
    RepresentationTag,
    act,
    apply,
    apply_checked,
    dilate,
    homomorphism_check,
    modulate,
    pointwise,
    translate,
    translation,
)

AFFINE = RepresentationTag(RepresentationKind.AFFINE)
AFFINE_PLUS = RepresentationTag(RepresentationKind.AFFINE_PLUS)
SCHROEDINGER = RepresentationTag(RepresentationKind.SCHROEDINGER)
SHEARLET = RepresentationTag.named("pi-shearlet")


class OperatorTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.line(-8.0, 8.0, 1024)
        self.gaussian = SampledFunction.from_profile(self.grid, profiles.gaussian())
        self.x = self.grid.axis(0)

    def test_translate(self):
        np.testing.assert_allclose(translate(self.gaussian, 1.5).values, np.exp(-np.pi * (self.x - 1.5) ** 2))

    def test_modulate(self):
        expected = np.exp(2j * np.pi * 0.25 * self.x) * np.exp(-np.pi * self.x ** 2)
        np.testing.assert_allclose(modulate(self.gaussian, 0.25).values, expected)

    def test_dilation_is_unitary(self):
        self.assertAlmostEqual(dilate(self.gaussian, 2.0).norm2(), self.gaussian.norm2(), delta=1e-12)

    def test_affine_action(self):
        image = apply(AFFINE, AffineElement(2.0, 1.0), self.gaussian)
        expected = 2 ** -0.5 * np.exp(-np.pi * ((self.x - 1.0) / 2.0) ** 2)
        np.testing.assert_allclose(image.values, expected, atol=1e-15)

    def test_schroedinger_action(self):
        g = WeylHeisenbergElement(0.125, (0.5,), (1.0,))
        expected = (
            np.exp(2j * np.pi * 0.125)
            * np.exp(-2j * np.pi * 0.5)
            * np.exp(2j * np.pi * 0.5 * self.x)
            * np.exp(-np.pi * (self.x - 1.0) ** 2)
        )
        np.testing.assert_allclose(apply(SCHROEDINGER, g, self.gaussian).values, expected, atol=1e-15)

    def test_pointwise_matches_the_sampled_action(self):
        g = AffineElement(-0.5, 0.25)
        values = pointwise(AFFINE, g, profiles.gaussian())(self.x)
        np.testing.assert_allclose(values, apply(AFFINE, g, self.gaussian).values, atol=1e-15)


class HomomorphismTests(SimpleTestCase):
    def test_affine(self):
        f = SampledFunction.from_profile(Grid.line(-8.0, 8.0, 1024), profiles.gaussian())
        defect = homomorphism_check(AFFINE, AffineElement(2.0, 1.0), AffineElement(-0.5, -1.0), f)
        self.assertLessEqual(defect, 1e-12)

    def test_schroedinger(self):
        f = SampledFunction.from_profile(Grid.line(-8.0, 8.0, 1024), profiles.gaussian())
        step = f.grid.spacing[0]
        g = WeylHeisenbergElement(0.3, (17 * step,), (-40 * step,))
        h = WeylHeisenbergElement(0.9, (-5 * step,), (64 * step,))
        self.assertLessEqual(homomorphism_check(SCHROEDINGER, g, h, f), 1e-10)

    def test_positive_affine(self):
        f = SampledFunction.from_profile(Grid.line(0.0, 64.0, 4096), profiles.half_line_wavelet())
        defect = homomorphism_check(AFFINE_PLUS, AffineElement(2.0, 0.3), AffineElement(0.5, -1.0), f)
        self.assertLessEqual(defect, 1e-12)

    def test_shearlet(self):
        f = SampledFunction.from_profile(Grid.square(-8.0, 8.0, 128), profiles.gaussian_2d(width=0.5))
        g = ShearletElement(2.0, 0.5, (1.0, -1.0))
        h = ShearletElement(0.5, -1.0, (0.5, 0.25))
        self.assertLessEqual(homomorphism_check(SHEARLET, g, h, f), 1e-12)


class UnitarityTests(SimpleTestCase):
    def test_positive_affine_preserves_norms(self):
        f = SampledFunction.from_profile(Grid.line(0.0, 64.0, 4096), profiles.half_line_wavelet())
        g = AffineElement(2.0, 0.3)
        image = apply(AFFINE_PLUS, g, f)
        self.assertAlmostEqual(image.norm2(), f.norm2(), delta=1e-10)

    def test_shearlet_preserves_norms(self):
        f = SampledFunction.from_profile(Grid.square(-8.0, 8.0, 128), profiles.gaussian_2d())
        image = apply(SHEARLET, ShearletElement(4.0, 1.0, (0.5, 0.0)), f)
        self.assertAlmostEqual(image.norm2(), f.norm2(), delta=1e-8)

    def test_translates_are_orthogonal_in_frequency(self):
        f = SampledFunction.from_profile(Grid.line(-8.0, 8.0, 1024), profiles.gaussian())
        g = apply(SCHROEDINGER, WeylHeisenbergElement(0.0, (0.0,), (0.0,)), f)
        h = apply(SCHROEDINGER, WeylHeisenbergElement(0.0, (8.0,), (0.0,)), f)
        self.assertLess(abs(inner_product(g, h)), 1e-10)


class CompatibilityTests(SimpleTestCase):
    def test_dimension_mismatch(self):
        f = SampledFunction.from_profile(Grid.line(-1.0, 1.0, 8), profiles.gaussian())
        with self.assertRaises(RepresentationError):
            apply(SHEARLET, ShearletElement(1.0), f)

    def test_wrong_group(self):
        f = SampledFunction.from_profile(Grid.line(-1.0, 1.0, 8), profiles.gaussian())
        with self.assertRaises(RepresentationError):
            apply(AFFINE, WeylHeisenbergElement(0.0, (0.0,), (0.0,)), f)

    def test_positive_affine_needs_positive_scale_and_half_line(self):
        half_line = SampledFunction.from_profile(Grid.line(0.0, 4.0, 8), profiles.half_line_wavelet())
        with self.assertRaises(RepresentationError):
            apply(AFFINE_PLUS, AffineElement(-1.0, 0.0), half_line)
        line = SampledFunction.from_profile(Grid.line(-1.0, 1.0, 8), profiles.gaussian())
        with self.assertRaises(RepresentationError):
            apply(AFFINE_PLUS, AffineElement(1.0, 0.0), line)

    def test_named_tags(self):
        self.assertEqual(SHEARLET.dimension, 2)
        self.assertEqual(RepresentationTag.named("schroedinger", 2).dimension, 2)
        with self.assertRaises(RepresentationError):
            RepresentationTag.named("pi-rotation")
        with self.assertRaises(RepresentationError):
            RepresentationTag(RepresentationKind.AFFINE, 2)


class EscapedMassTests(SimpleTestCase):
    def test_translation_out_of_the_box_is_reported(self):
        f = SampledFunction.from_profile(Grid.line(-8.0, 8.0, 1024), profiles.gaussian())
        with self.assertLogs("core.representations", "WARNING"):
            _, escaped = apply_checked(AFFINE, AffineElement(1.0, 7.9), f)
        self.assertGreater(escaped, 0.1)

    def test_small_moves_stay_inside(self):
        f = SampledFunction.from_profile(Grid.line(-8.0, 8.0, 1024), profiles.gaussian())
        _, escaped = apply_checked(AFFINE, AffineElement(1.0, 0.5), f)
        self.assertLess(escaped, 1e-12)

    def test_mass_leaving_the_box_is_dropped(self):
        grid = Grid.line(0.0, 1.0, 64)
        ones = SampledFunction.from_profile(grid, profiles.constant(1.0))
        for f in (ones, ones.without_profile()):
            image, escaped = act(translation(0.5), f)
            self.assertAlmostEqual(image.norm2(), 0.5, delta=1e-14)
            self.assertAlmostEqual(escaped, 0.5, delta=1e-14)
        image, _ = act(translation(0.5), ones)
        np.testing.assert_array_equal(image.evaluate(np.array([0.25, 0.75])), [0, 1])


class OperatorIdentityTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.line(-8.0, 8.0, 1024)
        self.gaussian = SampledFunction.from_profile(self.grid, profiles.gaussian())
        self.x = self.grid.axis(0)
        self.rng = np.random.default_rng(5)

    def random_samples(self, grid):
        return SampledFunction(grid, self.rng.normal(size=grid.size) + 1j * self.rng.normal(size=grid.size))

    def test_translation_adjoint(self):
        grid = Grid.line(0.0, 1.0, 64)
        step = grid.spacing[0]
        for _ in range(20):
            f, g = self.random_samples(grid), self.random_samples(grid)
            y = int(self.rng.integers(-40, 41)) * step
            self.assertAlmostEqual(inner_product(f, translate(g, y)), inner_product(translate(f, -y), g), delta=1e-12)

    def test_affine_action_factors_into_dilation_then_translation(self):
        for _ in range(20):
            a = float(self.rng.choice([-1.0, 1.0]) * self.rng.uniform(0.5, 2.0))
            b = float(self.rng.uniform(-2.0, 2.0))
            direct = apply(AFFINE, AffineElement(a, b), self.gaussian)
            np.testing.assert_allclose(direct.values, translate(dilate(self.gaussian, a), b).values, atol=1e-14)

    def test_fourier_transform_swaps_translation_and_modulation(self):
        left = fourier_transform(translate(self.gaussian, 0.75))
        right = modulate(fourier_transform(self.gaussian), -0.75)
        np.testing.assert_allclose(left.values, right.values, atol=1e-9)

    def test_fourier_transform_inverts_dilation(self):
        left = fourier_transform(dilate(self.gaussian, 2.0))
        right = dilate(fourier_transform(self.gaussian), 0.5)
        np.testing.assert_allclose(left.values, right.values, atol=1e-9)

    def test_plain_samples_are_interpolated_off_the_nodes(self):
        plain = self.gaussian.without_profile()
        shifted = translate(plain, 0.3)
        np.testing.assert_allclose(shifted.values, np.exp(-np.pi * (self.x - 0.3) ** 2), atol=1e-3)
        stretched = dilate(plain, 2.0)
        np.testing.assert_allclose(stretched.values, 2 ** -0.5 * np.exp(-np.pi * (self.x / 2) ** 2), atol=1e-3)

    def test_plain_samples_are_read_exactly_at_nodes(self):
        y = 37 * self.grid.spacing[0]
        shifted = translate(self.gaussian.without_profile(), y)
        np.testing.assert_allclose(shifted.values, np.exp(-np.pi * (self.x - y) ** 2), atol=1e-15)
