"""Matrix coefficients, admissibility constants and orthogonality relations.

The matrix coefficient of ``v`` and ``u`` is ``F(g) = <v, rep(g) u>``. A
dependency among the translates ``rep(g_k) v`` carries over to the left
translates of ``F`` on the group; :func:`transfer_certificate` builds that
group-side certificate.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, TextIO

import numpy as np

from .dependency import CertificateSpace, DependencyCertificate, verify
from .exceptions import AdmissibilityError, CertificateError, GridError, GridMismatchError, RepresentationError
from .groups import GroupElement, Side, elements_on_mesh, haar_density, invert, multiply
from .numerics import (
    ParameterAxis,
    ParameterBox,
    QuadratureKind,
    QuadratureRule,
    SampledFunction,
    fourier_at,
    inner_product,
    integrate_haar,
)
from .representations import RepresentationKind, RepresentationTag, apply, pointwise, translate

logger = logging.getLogger(__name__)


def matrix_coefficient(rep: RepresentationTag, v: SampledFunction, u: SampledFunction, g: GroupElement) -> complex:
    """<v, rep(g) u>."""
    return inner_product(v, apply(rep, g, u))


@dataclass(frozen=True)
class CoefficientQuadrature:
    """Composite Gauss-Legendre over the support of ``v``, panels split at ``breakpoints``."""

    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    rule: QuadratureRule = QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, panels=64, nodes_per_panel=16)

    def __post_init__(self):
        lower, upper = (float(value) for value in self.support)
        if not lower < upper:
            raise GridError(f"Empty coefficient support [{lower}, {upper}].")
        object.__setattr__(self, "support", (lower, upper))
        object.__setattr__(self, "breakpoints", tuple(float(point) for point in self.breakpoints))

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.rule.nodes(*self.support, self.breakpoints)


@dataclass(frozen=True, eq=False)
class MatrixCoefficient:
    """F(g) = <v, rep(g) u>, sampled on the nodes of a parameter box.

    With a ``quadrature`` the inner product is computed from the closed
    forms of ``v`` and ``u`` by Gauss-Legendre; otherwise from the grid
    samples by the midpoint rule.
    """

    rep: RepresentationTag
    v: SampledFunction
    u: SampledFunction
    box: ParameterBox
    quadrature: CoefficientQuadrature | None = None

    def __post_init__(self):
        if self.quadrature is not None:
            if self.v.profile is None or self.u.profile is None:
                raise RepresentationError("Quadrature-mode coefficients need closed forms for v and u.")
            if self.rep.dimension != 1:
                raise RepresentationError("Quadrature-mode coefficients are one-dimensional.")
        elif self.v.grid != self.u.grid:
            raise GridMismatchError("v and u must share a grid.")

    @property
    def density(self):
        return haar_density(self.rep.group_kind, Side.LEFT)

    @cached_property
    def elements(self) -> list[GroupElement]:
        return elements_on_mesh(self.rep.group_kind, self.box.mesh())

    @cached_property
    def _nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x, w = self.quadrature.nodes()
        return x, w, np.asarray(self.v.profile(x), dtype=complex)

    def __call__(self, g: GroupElement) -> complex:
        if self.quadrature is None:
            return matrix_coefficient(self.rep, self.v, self.u, g)
        x, w, vx = self._nodes
        image = np.broadcast_to(pointwise(self.rep, g, self.u.profile)(x), x.shape)
        return complex(np.sum(w * vx * np.conj(image)))

    def evaluate(self, elements: Sequence[GroupElement]) -> np.ndarray:
        return np.array([self(g) for g in elements], dtype=complex)

    @cached_property
    def _samples(self) -> np.ndarray:
        values = self.evaluate(self.elements).reshape(self.box.shape)
        values.flags.writeable = False
        logger.debug("Sampled %s coefficient on %d box nodes", self.rep.name, self.box.size)
        return values

    def sample(self) -> np.ndarray:
        return self._samples

    def translated(self, g: GroupElement) -> np.ndarray:
        """(L(g) F)(x) = F(g^-1 x) at the box nodes, re-evaluated rather than interpolated."""
        inverse = invert(g)
        return self.evaluate([multiply(inverse, x) for x in self.elements]).reshape(self.box.shape)

    @cached_property
    def _haar_weights(self) -> np.ndarray:
        weights = self.box.weights() * self.density(*self.box.mesh())
        if not np.all(np.isfinite(weights)):
            raise GridError("Haar density is not finite on the parameter box.")
        return weights

    def haar_weights(self) -> np.ndarray:
        return self._haar_weights

    def norm(self) -> float:
        return float(np.sqrt(integrate_haar(np.abs(self.sample()) ** 2, self.box, self.density)))


def coefficient_grid(coefficient: MatrixCoefficient) -> np.ndarray:
    return coefficient.sample()


def write_coefficient_csv(coefficient: MatrixCoefficient, stream: TextIO) -> None:
    """One row per box node: the parameters and |F| there."""
    names = [axis.name for axis in coefficient.box.axes]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*names, "abs_F"])
    mesh = [axis.ravel() for axis in coefficient.box.mesh()]
    magnitudes = np.abs(coefficient.sample()).ravel()
    for index, magnitude in enumerate(magnitudes):
        writer.writerow([repr(float(axis[index])) for axis in mesh] + [repr(float(magnitude))])


def affine_box(
    log2_scale: float = 6,
    scale_panels: int = 256,
    shift: float = 12.0,
    shift_panels: int = 384,
    *,
    both_signs: bool = True,
) -> ParameterBox:
    """a in +-[2^-L, 2^L] log-spaced, b in [-B, B], midpoint rule on both axes."""
    return ParameterBox(
        (
            ParameterAxis("a", 2.0 ** -log2_scale, 2.0 ** log2_scale, QuadratureRule(panels=scale_panels), log_scale=True, reflect=both_signs),
            ParameterAxis("b", -shift, shift, QuadratureRule(panels=shift_panels)),
        )
    )


def wh_box(extent: float = 6.0, panels: int = 192) -> ParameterBox:
    rule = QuadratureRule(panels=panels)
    return ParameterBox((ParameterAxis("a", -extent, extent, rule), ParameterAxis("b", -extent, extent, rule)))


# Admissibility -------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    constant: float
    convergent: bool
    truncation_box: tuple[float, float]
    edge_fractions: tuple[float, float]
    rule: QuadratureRule

    def as_record(self) -> dict:
        return {
            "constant": self.constant,
            "convergent": self.convergent,
            "truncation_box": list(self.truncation_box),
            "edge_fractions": list(self.edge_fractions),
            "rule": self.rule.describe(),
        }


def admissibility_constant(
    rep: RepresentationTag,
    u: SampledFunction,
    *,
    log2_min: float = -12,
    log2_max: float = 4,
    rule: QuadratureRule = QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, panels=64, nodes_per_panel=8),
    decay_tolerance: float = 1e-3,
) -> AdmissibilityReport:
    """Integral of |u^(xi)|^2 / |xi| over log-spaced |xi| in [2^log2_min, 2^log2_max].

    For ``pi-plus`` the function already lives on the frequency half-line
    and the integrand is |u(xi)|^2 / xi there. The integral counts as
    convergent when the outermost panel on each end carries less than
    ``decay_tolerance`` of the total.
    """
    if rep.kind not in (RepresentationKind.AFFINE, RepresentationKind.AFFINE_PLUS):
        raise AdmissibilityError(f"Admissibility constants are computed for the affine representations, not {rep.name}.")
    if u.is_zero():
        raise AdmissibilityError("The zero vector is not admissible.")
    if not log2_min < log2_max:
        raise AdmissibilityError(f"Empty frequency box [2^{log2_min}, 2^{log2_max}].")

    lower, upper = 2.0 ** log2_min, 2.0 ** log2_max
    logs, weights = rule.nodes(np.log(lower), np.log(upper))
    xi = np.exp(logs)
    # In log coordinates d(xi) / xi = d(log xi), so the weights need no Jacobian.
    if rep.kind is RepresentationKind.AFFINE:
        sides = [np.abs(fourier_at(u, sign * xi)) ** 2 for sign in (1.0, -1.0)]
    else:
        sides = [np.abs(u.evaluate(xi)) ** 2]
    panels = [(weights * side).reshape(rule.panels, rule.nodes_per_panel).sum(axis=1) for side in sides]
    total = float(sum(panel.sum() for panel in panels))
    if total > 0:
        low = float(sum(panel[0] for panel in panels)) / total
        high = float(sum(panel[-1] for panel in panels)) / total
    else:
        low = high = 1.0
    convergent = total > 0 and low < decay_tolerance and high < decay_tolerance
    if not convergent:
        logger.warning("Admissibility integral does not settle: edge fractions %.3g and %.3g", low, high)
    return AdmissibilityReport(total, convergent, (lower, upper), (low, high), rule)


def calderon_energy_check(
    rep: RepresentationTag,
    v: SampledFunction,
    u: SampledFunction,
    *,
    box: ParameterBox | None = None,
    admissibility: AdmissibilityReport | None = None,
) -> tuple[float, float]:
    """Both sides of  integral |<v, pi(a,b) u>|^2 da db / a^2 = ||v||^2 C_u.

    The left side runs the midpoint rule over ``box`` (default
    :func:`affine_box`), batching every shift b for one scale a.
    """
    if rep.kind is not RepresentationKind.AFFINE:
        raise AdmissibilityError("The energy identity is checked for pi-affine.")
    if v.grid != u.grid:
        raise GridMismatchError("v and u must share a grid.")
    box = box or affine_box()
    if admissibility is None:
        admissibility = admissibility_constant(rep, u)
    rhs = v.norm2() * admissibility.constant

    scales, scale_weights = box.axes[0].nodes()
    shifts, shift_weights = box.axes[1].nodes()
    x = v.grid.axis(0)
    step = v.grid.cell_volume
    lhs = 0.0
    for a, weight in zip(scales, scale_weights):
        images = u.evaluate((x[None, :] - shifts[:, None]) / a) / np.sqrt(abs(a))
        coefficients = images.conj() @ v.values * step
        lhs += weight / a ** 2 * float(np.sum(shift_weights * np.abs(coefficients) ** 2))
    logger.debug("Energy identity over %d x %d nodes: lhs %.6g, rhs %.6g", scales.size, shifts.size, lhs, rhs)
    return lhs, rhs


def wh_orthogonality_check(
    f: SampledFunction, g: SampledFunction, *, box: ParameterBox | None = None
) -> tuple[float, float]:
    """Both sides of  integral |<f, pi(t,a,b) g>|^2 dt da db = ||f||^2 ||g||^2.

    The circle integral contributes exactly 1; the (a, b) integral runs the
    midpoint rule over ``box`` (default :func:`wh_box`).
    """
    if f.grid != g.grid:
        raise GridMismatchError("f and g must share a grid.")
    if f.grid.dimension != 1:
        raise GridError("The orthogonality check is implemented for n = 1.")
    box = box or wh_box()
    frequencies, frequency_weights = box.axes[0].nodes()
    shifts, shift_weights = box.axes[1].nodes()
    x = f.grid.axis(0)
    kernel = np.exp(-2j * np.pi * np.multiply.outer(frequencies, x))
    step = f.grid.cell_volume
    lhs = 0.0
    for b, weight in zip(shifts, shift_weights):
        shifted = translate(g, b).values
        coefficients = kernel @ (f.values * np.conj(shifted)) * step
        lhs += weight * float(np.sum(frequency_weights * np.abs(coefficients) ** 2))
    return lhs, f.norm2() * g.norm2()


# Transfer to the group ------------------------------------------------------------------


def transfer_certificate(
    rep: RepresentationTag,
    cert: DependencyCertificate,
    u: SampledFunction,
    box: ParameterBox,
    *,
    quadrature: CoefficientQuadrature | None = None,
    tolerance: float = 1e-8,
) -> DependencyCertificate:
    """Carry a verified representation-space certificate over to L(G).

    The returned certificate keeps the coefficients and elements and
    targets the matrix coefficient F(x) = <v, rep(x) u>.
    """
    if cert.space is not CertificateSpace.HPI:
        raise CertificateError("Only representation-space certificates can be transferred.")
    if cert.rep != rep:
        raise CertificateError(f"Certificate was built for {cert.rep}, not {rep}.")
    residual = verify(cert)
    if residual > tolerance:
        raise CertificateError(f"Input certificate is not verified: residual {residual:.3g} exceeds {tolerance:.3g}.")
    if rep.kind in (RepresentationKind.AFFINE, RepresentationKind.AFFINE_PLUS):
        report = admissibility_constant(rep, u)
        if not report.convergent or report.constant <= 0:
            raise AdmissibilityError(f"u is not admissible for {rep.name}: constant {report.constant:.3g}.")
    target = MatrixCoefficient(rep, cert.target, u, box, quadrature)
    logger.info("Transferred a %d-term certificate (input residual %.3g) to %s", len(cert.terms), residual, rep.name)
    return DependencyCertificate(CertificateSpace.L2G, cert.terms, target, rep, residual)
