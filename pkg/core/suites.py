"""Canned verification suites.

Each suite runs one family of identities or probes with the grids and
tolerances of a :class:`~core.config.RunConfig` and returns a
:class:`~core.reports.Report`. Suites draw random instances from their own
generator, seeded from the run seed and the suite name, so the outcome does
not depend on which other suites run or in which order.
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable

import numpy as np

from . import profiles
from .coefficients import (
    CoefficientQuadrature,
    admissibility_constant,
    calderon_energy_check,
    transfer_certificate,
    wh_orthogonality_check,
)
from .config import RunConfig
from .dependency import (
    SHEARLET_REFINEMENT,
    CertificateSpace,
    DependencyCertificate,
    GroupFunctionSpace,
    Mask,
    RepresentationSpace,
    SequenceSpace,
    Term,
    Verdict,
    gram_matrix,
    gram_matrix_by_pairs,
    probe_independence,
    shearlet_dependency_from_mask,
    verify,
    verify_refinement,
)
from .exceptions import UnknownSuiteError
from .groupring import (
    FINITE_SUPPORT_NOTE,
    CoefficientMode,
    FormalSum,
    convolution_matrix,
    convolution_matrix_by_sum,
    convolve,
    heisenberg_lattice_check,
    support_ball,
    torsion_element,
    zero_divisor_probe,
)
from .groups import (
    AffineElement,
    CyclicElement,
    HeisenbergLatticeElement,
    ShearletElement,
    WeylHeisenbergElement,
    ZnElement,
)
from .numerics import Grid, ParameterAxis, ParameterBox, QuadratureKind, QuadratureRule, SampledFunction
from .reports import PLUMBING, CheckList, Provenance, Report
from .representations import RepresentationKind, RepresentationTag, apply, homomorphism_check

logger = logging.getLogger(__name__)

AFFINE = RepresentationTag(RepresentationKind.AFFINE)
AFFINE_PLUS = RepresentationTag(RepresentationKind.AFFINE_PLUS)
SCHROEDINGER = RepresentationTag(RepresentationKind.SCHROEDINGER, 1)
SHEARLET = RepresentationTag(RepresentationKind.SHEARLET, 2)

HALF_ROOT = 2 ** -0.5

SuiteFunction = Callable[[CheckList, RunConfig, np.random.Generator], None]
SUITES: dict[str, SuiteFunction] = {}


def suite(name: str) -> Callable[[SuiteFunction], SuiteFunction]:
    def register(function: SuiteFunction) -> SuiteFunction:
        SUITES[name] = function
        return function

    return register


def suite_names() -> list[str]:
    return sorted(SUITES)


def suite_rng(name: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


def canned_suite(name: str, config: RunConfig | None = None) -> Report:
    """Run one suite by name; ``all`` runs every registered suite."""
    config = config or RunConfig()
    if name == "all":
        return run_suites(suite_names(), config, label="all")
    if name not in SUITES:
        raise UnknownSuiteError(f"Unknown suite {name!r}; expected 'all' or one of {', '.join(suite_names())}.")
    checks = CheckList(name)
    SUITES[name](checks, config, suite_rng(name, config.run_seed))
    report = checks.report()
    logger.info("Suite %s: %s", name, report.summary())
    return report


def run_suites(names, config: RunConfig, *, label: str = "") -> Report:
    """Run suites on ``config.run_jobs`` threads; the merged report is in canonical order."""
    names = list(names)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise UnknownSuiteError(f"Unknown suites: {', '.join(unknown)}.")
    with ThreadPoolExecutor(max_workers=config.run_jobs) as pool:
        reports = list(pool.map(lambda name: canned_suite(name, config), names))
    return Report.merge("suite", reports, label or " ".join(names))


# Shared instances -------------------------------------------------------------------


def indicator_certificate(config: RunConfig) -> DependencyCertificate:
    """chi - 2^(-1/2) pi(1/2, 0) chi - 2^(-1/2) pi(1/2, 1/2) chi = 0 for the unit-interval indicator."""
    target = SampledFunction.from_profile(config.chi_grid(), profiles.indicator(0.0, 1.0))
    terms = (
        Term(1.0, AffineElement(1.0, 0.0)),
        Term(-HALF_ROOT, AffineElement(0.5, 0.0)),
        Term(-HALF_ROOT, AffineElement(0.5, 0.5)),
    )
    return DependencyCertificate(CertificateSpace.HPI, terms, target, AFFINE)


def indicator_transform_certificate(config: RunConfig) -> DependencyCertificate:
    """The same dependency on the Fourier side, under pi-plus on the half-line."""
    target = SampledFunction.from_profile(config.half_line_grid(), profiles.indicator_transform(0.0, 1.0))
    terms = (
        Term(1.0, AffineElement(1.0, 0.0)),
        Term(-HALF_ROOT, AffineElement(0.5, 0.0)),
        Term(-HALF_ROOT, AffineElement(0.5, -0.5)),
    )
    return DependencyCertificate(CertificateSpace.HPI, terms, target, AFFINE_PLUS)


def transferred_indicator(config: RunConfig, box: ParameterBox | None = None) -> DependencyCertificate:
    u = SampledFunction.from_profile(config.line_grid(), profiles.odd_gaussian())
    return transfer_certificate(
        AFFINE,
        indicator_certificate(config),
        u,
        box or config.transfer_box(),
        quadrature=CoefficientQuadrature((0.0, 1.0), (0.5,)),
        tolerance=config.tol_identity,
    )


# Refinement and affine certificates ---------------------------------------------------


@suite("refinement-chi")
def refinement_chi(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    chi = SampledFunction.from_profile(config.chi_grid(), profiles.indicator(0.0, 1.0))
    residual = verify_refinement(chi, Mask({0: 1, 1: 1}), 2, normalized=False)
    checks.at_most(
        "indicator-two-scale",
        residual,
        0.0,
        anchor="two-scale refinement of the unit-interval indicator",
        provenance=Provenance.PUBLISHED,
        details={"grid": chi.grid.describe()},
    )

    hat = SampledFunction.from_profile(Grid.line(-1.0, 3.0, config.grid_chi_points), profiles.hat(0.0, 2.0))
    checks.at_most(
        "hat-two-scale",
        verify_refinement(hat, Mask({0: 0.5, 1: 1.0, 2: 0.5}), 2),
        config.tol_exact,
        anchor="piecewise linear B-spline refinement",
        provenance=Provenance.DERIVED,
    )

    gaussian = SampledFunction.from_profile(config.line_grid(), profiles.gaussian())
    checks.above(
        "gaussian-not-refinable",
        verify_refinement(gaussian, Mask({0: 1}), 2),
        0.1,
        anchor="direct evaluation of f(x) - f(2x)",
        provenance=Provenance.DERIVED,
    )


@suite("affine-chi")
def affine_chi(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    cert = indicator_certificate(config)
    anchor = "affine dependency of the unit-interval indicator"
    details = {"terms": cert.lines(), "grid": cert.target.grid.describe()}
    checks.at_most(
        "certificate-residual", verify(cert, normalized=False), 0.0, anchor=anchor, provenance=Provenance.PUBLISHED, details=details
    )
    checks.at_most(
        "relative-residual", verify(cert), config.tol_exact, anchor=anchor, provenance=Provenance.PUBLISHED, details=details
    )

    single = DependencyCertificate(CertificateSpace.HPI, (Term(1.0, AffineElement(1.0, 0.0)),), cert.target, AFFINE)
    checks.close_to(
        "single-term-residual",
        verify(single),
        1.0,
        config.tol_exact,
        anchor="a single nonzero translate never vanishes",
        provenance=Provenance.TRIVIAL,
    )

    perturbed = DependencyCertificate(
        CertificateSpace.HPI,
        tuple(Term(-0.7 if term.coefficient.real < 0 else 1.0, term.element) for term in cert.terms),
        cert.target,
        AFFINE,
    )
    checks.above(
        "perturbed-coefficients-detected",
        verify(perturbed),
        1e-3,
        anchor="coefficients off the refinement mask",
        provenance=Provenance.TRIVIAL,
    )
    scale = 2.0 - 1.0j
    scaled = DependencyCertificate(
        CertificateSpace.HPI,
        tuple(Term(scale * term.coefficient, term.element) for term in perturbed.terms),
        cert.target,
        AFFINE,
    )
    ratio = verify(scaled, normalized=False) / (abs(scale) * verify(perturbed, normalized=False))
    checks.close_to(
        "residual-homogeneity", ratio, 1.0, config.tol_exact, anchor=PLUMBING, provenance=Provenance.DERIVED
    )


@suite("affine-L2G")
def affine_l2g(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    source = indicator_certificate(config)
    transferred = transferred_indicator(config)
    residual = verify(transferred)
    anchor = "dependency transferred to the matrix coefficient"
    checks.at_most(
        "transferred-residual",
        residual,
        config.tol_transfer,
        anchor=anchor,
        provenance=Provenance.PUBLISHED,
        details={"box": config.transfer_box().describe(), "input_residual": transferred.source_residual},
    )
    preserved = transferred.coefficients == source.coefficients and all(
        g.is_close(h) for g, h in zip(transferred.elements, source.elements)
    )
    checks.holds("terms-preserved", preserved, anchor=PLUMBING, provenance=Provenance.TRIVIAL)
    checks.at_most(
        "residual-growth",
        residual,
        10 * transferred.source_residual + 1e-12,
        anchor=anchor,
        provenance=Provenance.DERIVED,
    )


@suite("pi-plus-fourier")
def pi_plus_fourier(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    grid = config.half_line_grid()
    xi = grid.axis(0)
    chi_hat = profiles.indicator_transform(0.0, 1.0)
    two_scale = chi_hat(xi / 2) * (1 + np.exp(-1j * np.pi * xi))
    anchor = "Fourier-side two-scale relation of the indicator"
    checks.at_most(
        "fourier-identity",
        np.max(np.abs(0.5 * two_scale - chi_hat(xi))),
        config.tol_exact,
        anchor=anchor,
        provenance=Provenance.PUBLISHED,
        details={"samples": int(xi.size), "upper": grid.upper[0]},
    )
    checks.above(
        "identity-without-half-factor",
        np.max(np.abs(two_scale - chi_hat(xi))),
        0.5,
        anchor=anchor,
        provenance=Provenance.DERIVED,
    )

    cert = indicator_transform_certificate(config)
    checks.at_most(
        "hpi-certificate",
        verify(cert),
        config.tol_transfer,
        anchor="dependency among positive-affine translates of the indicator transform",
        provenance=Provenance.PUBLISHED,
        details={"terms": cert.lines()},
    )

    u = SampledFunction.from_profile(grid, profiles.half_line_wavelet())
    box = ParameterBox(
        (
            ParameterAxis("a", 0.25, 4.0, QuadratureRule(panels=16), log_scale=True),
            ParameterAxis("b", -2.0, 2.0, QuadratureRule(panels=16)),
        )
    )
    quadrature = CoefficientQuadrature((0.0, 32.0), (), QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, 512, 12))
    transferred = transfer_certificate(AFFINE_PLUS, cert, u, box, quadrature=quadrature, tolerance=config.tol_identity)
    checks.at_most(
        "transferred-residual",
        verify(transferred),
        config.tol_identity,
        anchor="dependency transferred to the positive affine group",
        provenance=Provenance.DERIVED,
        details={"box": box.describe()},
    )


@suite("affine-Z-independence")
def affine_z_independence(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    scale = 2.0 ** config.haar_transfer_log2_scale
    shift = 2 * config.haar_transfer_shift
    box = ParameterBox(
        (
            ParameterAxis("a", 1.0 / scale, scale, QuadratureRule(panels=config.haar_transfer_points), log_scale=True),
            ParameterAxis("b", -shift, shift, QuadratureRule(panels=2 * config.haar_transfer_points)),
        )
    )
    target = transferred_indicator(config, box).target
    elements = [AffineElement(1.0, float(n)) for n in range(-3, 4)]
    probe = probe_independence(GroupFunctionSpace(), elements, target, config.tol_spectral, config.tol_inconclusive)
    checks.probe(
        "integer-translates",
        probe,
        Verdict.INDEPENDENT,
        anchor="integer translates of the matrix coefficient",
        provenance=Provenance.DERIVED,
        details={"box": box.describe()},
    )


# Shearlets --------------------------------------------------------------------------


@suite("shearlet-identity")
def shearlet_identity(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    grid = config.plane_grid()
    f = SampledFunction.from_profile(grid, profiles.gaussian_2d(width=0.5))
    x1, x2 = grid.coordinates()
    step1, step2 = grid.spacing
    worst = 0.0
    for _ in range(100):
        k1, k2 = (int(k) for k in rng.integers(-8, 9, size=2))
        beta = (k1 * step1, k2 * step2)
        g = ShearletElement(4.0, 0.0, (4.0 * beta[0], 2.0 * beta[1]))
        expected = 4.0 ** -0.75 * f.profile(x1 / 4.0 - beta[0], x2 / 2.0 - beta[1])
        worst = max(worst, float(np.max(np.abs(apply(SHEARLET, g, f).values - expected))))
    checks.at_most(
        "operator-identity",
        worst,
        config.tol_exact,
        anchor="shearlet refinement operator identity",
        provenance=Provenance.PUBLISHED,
        details={"samples": 100},
    )

    cert = shearlet_dependency_from_mask(Mask({(1, 1): 1.0}))
    built = cert.elements[1].is_close(ShearletElement(4.0, 0.0, (4.0, 2.0))) and math.isclose(
        cert.coefficients[1].real, -(4 ** 0.75)
    )
    checks.holds(
        "mask-to-certificate",
        built,
        anchor="translation column (4 b1, 2 b2)",
        provenance=Provenance.PUBLISHED,
        details={"terms": cert.lines()},
    )

    constant = SampledFunction.from_profile(grid, profiles.constant(1.0))
    witness = shearlet_dependency_from_mask(Mask({(0, 0): 1.0}), constant)
    checks.at_most(
        "constant-witness",
        verify(witness),
        config.tol_exact,
        anchor="constant functions are parabolically self-similar",
        provenance=Provenance.TRIVIAL,
        details={"terms": witness.lines()},
    )
    checks.at_most(
        "constant-refinement",
        verify_refinement(constant, Mask({(0, 0): 1.0}), SHEARLET_REFINEMENT, normalized=False),
        0.0,
        anchor="constant functions are parabolically self-similar",
        provenance=Provenance.TRIVIAL,
    )


@suite("shearlet-independence")
def shearlet_independence(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    f = SampledFunction.from_profile(config.plane_grid(), profiles.gaussian_2d())
    elements = [
        ShearletElement(1.0, float(s), (float(t1), float(t2)))
        for s in (-1, 0, 1)
        for t1 in (0, 1)
        for t2 in (0, 1)
    ]
    probe = probe_independence(RepresentationSpace(SHEARLET), elements, f, config.tol_spectral, config.tol_inconclusive)
    checks.probe(
        "sheared-translates",
        probe,
        Verdict.INDEPENDENT,
        anchor="sheared integer translates of a Gaussian",
        provenance=Provenance.DERIVED,
    )


# Weyl-Heisenberg -----------------------------------------------------------------------


@suite("gabor-hrt")
def gabor_hrt(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    halves = (Fraction(-1, 2), Fraction(0), Fraction(1, 2))
    points = [(a, b) for a in halves for b in halves]
    anchor = "Gabor system of a Gaussian on a rational lattice"
    checks.holds(
        "lattice-condition",
        heisenberg_lattice_check(points, 4),
        anchor=anchor,
        provenance=Provenance.DERIVED,
        details={"r": 4, "points": [[str(a), str(b)] for a, b in points]},
    )
    f = SampledFunction.from_profile(config.line_grid(), profiles.gaussian())
    elements = [WeylHeisenbergElement(0.0, (float(a),), (float(b),)) for a, b in points]
    probe = probe_independence(RepresentationSpace(SCHROEDINGER), elements, f, config.tol_spectral, config.tol_inconclusive)
    checks.probe("gram-verdict", probe, Verdict.INDEPENDENT, anchor=anchor, provenance=Provenance.DERIVED, details={"kind": "probe"})
    checks.above(
        "gram-relative-minimum",
        probe.relative_min,
        1e-6,
        anchor=anchor,
        provenance=Provenance.DERIVED,
        details={"kind": "probe"},
    )


@suite("wh-orthogonality")
def wh_orthogonality(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    f = SampledFunction.from_profile(config.line_grid(), profiles.normalized_gaussian())
    box = config.wh_box()
    lhs, rhs = wh_orthogonality_check(f, f, box=box)
    anchor = "Weyl-Heisenberg orthogonality relation"
    checks.close_to(
        "orthogonality-lhs", lhs, 1.0, 1e-2, anchor=anchor, provenance=Provenance.PUBLISHED, details={"rhs": rhs, "box": box.describe()}
    )
    scaled_second, _ = wh_orthogonality_check(f, 2.0 * f, box=box)
    scaled_first, _ = wh_orthogonality_check(2.0 * f, f, box=box)
    for name, value in (("norm-exponent-second", scaled_second), ("norm-exponent-first", scaled_first)):
        checks.close_to(name, math.log2(value / lhs), 2.0, 1e-9, anchor=anchor, provenance=Provenance.DERIVED)


@suite("schroedinger-homomorphism")
def schroedinger_homomorphism(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    f = SampledFunction.from_profile(config.line_grid(), profiles.gaussian())
    samples = f.without_profile()
    step = f.grid.spacing[0]

    def element() -> WeylHeisenbergElement:
        t = float(rng.random())
        a, b = (int(k) * step for k in rng.integers(-64, 65, size=2))
        return WeylHeisenbergElement(t, (a,), (b,))

    worst = worst_sampled = 0.0
    for _ in range(200):
        g = element()
        h = element()
        worst = max(worst, homomorphism_check(SCHROEDINGER, g, h, f))
        worst_sampled = max(worst_sampled, homomorphism_check(SCHROEDINGER, g, h, samples))
    anchor = "the Schroedinger representation is a homomorphism"
    checks.at_most(
        "composition-defect",
        worst,
        config.tol_transfer,
        anchor=anchor,
        provenance=Provenance.PUBLISHED,
        details={"pairs": 200},
    )
    # Shifts are grid multiples, so plain samples are read at nodes.
    checks.at_most(
        "composition-defect-samples",
        worst_sampled,
        config.tol_transfer,
        anchor=anchor,
        provenance=Provenance.PUBLISHED,
        details={"pairs": 200},
    )


# Calderon ----------------------------------------------------------------------------


@suite("calderon")
def calderon(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    options = config.admissibility_options()
    u = SampledFunction.from_profile(config.line_grid(), profiles.odd_gaussian())
    report = admissibility_constant(AFFINE, u, **options)
    anchor = "Calderon admissibility of the odd Gaussian"
    checks.close_to(
        "admissibility-constant", report.constant, 1.0, 1e-6, anchor=anchor, provenance=Provenance.PUBLISHED, details=report.as_record()
    )
    checks.holds("admissibility-converges", report.convergent, anchor=anchor, provenance=Provenance.PUBLISHED)

    gaussian = SampledFunction.from_profile(config.line_grid(), profiles.gaussian())
    checks.holds(
        "gaussian-not-admissible",
        not admissibility_constant(AFFINE, gaussian, **options).convergent,
        anchor="a nonzero mean makes the Calderon integral diverge",
        provenance=Provenance.TRIVIAL,
    )

    box = config.energy_box()
    lhs, rhs = calderon_energy_check(AFFINE, u, u, box=box, admissibility=report)
    checks.close_to(
        "energy-ratio", lhs / rhs, 1.0, 0.02, anchor=anchor, provenance=Provenance.PUBLISHED, details={"lhs": lhs, "rhs": rhs}
    )
    doubled, _ = calderon_energy_check(AFFINE, u, u, box=box.scaled(2.0), admissibility=report)
    checks.at_most(
        "truncation-doubling",
        abs(doubled - lhs) / lhs,
        5e-3,
        anchor=PLUMBING,
        provenance=Provenance.DERIVED,
        details={"lhs": lhs, "doubled": doubled},
    )


# Group rings --------------------------------------------------------------------------


@suite("torsion")
def torsion(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    anchor = "torsion zero divisor in the cyclic group ring"
    for m in range(2, 13):
        alpha = torsion_element(m)
        beta = FormalSum([(1, CyclicElement(0, m)), (-1, CyclicElement(1, m))])
        checks.holds(f"zero-divisor-m{m:02d}", not convolve(alpha, beta), anchor=anchor, provenance=Provenance.PUBLISHED)

        report = zero_divisor_probe(alpha, m)
        witnessed = report.witness is not None and bool(report.witness) and not convolve(alpha, report.witness)
        checks.holds(
            f"kernel-witness-m{m:02d}", witnessed, anchor=anchor, provenance=Provenance.PUBLISHED, details=report.as_record()
        )

        line = FormalSum(((1, ZnElement((j,))) for j in range(m)), mode=CoefficientMode.EXACT)
        free = zero_divisor_probe(line, 12)
        checks.holds(
            f"integer-line-m{m:02d}",
            free.kernel_dimension == 0,
            anchor="the same pattern over the integers has no finite kernel",
            provenance=Provenance.DERIVED,
            details=free.as_record(),
        )

        elements = [CyclicElement(j, m) for j in range(m)]
        probe = probe_independence(
            SequenceSpace(), elements, alpha.as_float(), config.tol_spectral, config.tol_inconclusive
        )
        checks.probe(f"constant-translates-m{m:02d}", probe, Verdict.DEPENDENT, anchor=anchor, provenance=Provenance.PUBLISHED)


@suite("torsion-free")
def torsion_free(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    choices = (1, -1, 1j, -1j, 2, -2)
    smallest = math.inf
    for _ in range(200):
        count = int(rng.integers(1, 6))
        points: list[tuple[int, int]] = []
        while len(points) < count:
            point = tuple(int(k) for k in rng.integers(-2, 3, size=2))
            if point not in points:
                points.append(point)
        alpha = FormalSum(
            ((choices[int(rng.integers(len(choices)))], ZnElement(point)) for point in points),
            mode=CoefficientMode.FLOAT,
        )
        smallest = min(smallest, zero_divisor_probe(alpha, 8).min_singular_value)
    checks.above(
        "min-singular-value",
        smallest,
        config.tol_inconclusive,
        anchor="no finitely supported kernels over the integer lattice",
        provenance=Provenance.DERIVED,
        details={"samples": 200, "radius": 8, "note": FINITE_SUPPORT_NOTE},
    )


# Oracles ------------------------------------------------------------------------------


def _random_sum(rng: np.random.Generator, pool, *, mode: CoefficientMode = CoefficientMode.FLOAT) -> FormalSum:
    count = int(rng.integers(1, 7))
    picked = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    values = (1, -1, 2, 1j, -1j)
    return FormalSum(((values[int(rng.integers(len(values)))], pool[int(index)]) for index in picked), mode=mode)


@suite("oracle-equivalence")
def oracle_equivalence(checks: CheckList, config: RunConfig, rng: np.random.Generator) -> None:
    f = SampledFunction.from_profile(config.line_grid(), profiles.gaussian())
    space = RepresentationSpace(SCHROEDINGER)
    quarters = [k / 4 for k in range(-4, 5)]
    worst_gram = 0.0
    for _ in range(10):
        count = int(rng.integers(1, 7))
        pairs = rng.choice(len(quarters) ** 2, size=count, replace=False)
        elements = [
            WeylHeisenbergElement(float(rng.random()), (quarters[int(p) // len(quarters)],), (quarters[int(p) % len(quarters)],))
            for p in pairs
        ]
        difference = gram_matrix(space, elements, f) - gram_matrix_by_pairs(space, elements, f)
        worst_gram = max(worst_gram, float(np.max(np.abs(difference))))

    grid_points = [ZnElement((i, j)) for i in range(-2, 3) for j in range(-2, 3)]
    for _ in range(10):
        sequence = _random_sum(rng, grid_points)
        elements = [grid_points[int(i)] for i in rng.choice(len(grid_points), size=int(rng.integers(1, 7)), replace=False)]
        difference = gram_matrix(SequenceSpace(), elements, sequence) - gram_matrix_by_pairs(SequenceSpace(), elements, sequence)
        worst_gram = max(worst_gram, float(np.max(np.abs(difference))))
    checks.at_most("gram-matrices", worst_gram, config.tol_exact, anchor=PLUMBING, provenance=Provenance.DERIVED)

    halves = [Fraction(k, 2) for k in range(-2, 3)]
    pools = {
        "zn": (grid_points, 2, None),
        "zmod": ([CyclicElement(k, 7) for k in range(7)], 3, None),
        "heis": (
            [
                HeisenbergLatticeElement(Fraction(z, 4), (a,), (b,))
                for z in range(3)
                for a in halves
                for b in halves
                if z or a or b
            ],
            1,
            True,
        ),
    }
    worst_convolution = 0.0
    for _, (pool, radius, use_support) in sorted(pools.items()):
        for _ in range(5):
            alpha = _random_sum(rng, pool)
            generators = alpha.support() if use_support else None
            columns = support_ball(alpha.support()[0], radius, generators)
            matrix = convolution_matrix(alpha, columns)
            reference = convolution_matrix_by_sum(alpha, matrix.rows, columns)
            worst_convolution = max(worst_convolution, float(np.max(np.abs(matrix.entries - reference))))
    checks.at_most("convolution-matrices", worst_convolution, config.tol_exact, anchor=PLUMBING, provenance=Provenance.DERIVED)
