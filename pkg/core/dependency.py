"""Dependency certificates and independence probes.

A certificate asserts that a finite combination of translates vanishes:
``sum c_k rep(g_k) v = 0`` on the representation space, or
``sum c_k F(g_k^-1 x) = 0`` for a function ``F`` on the group. A probe
measures how close a finite family of translates is to being dependent
through the spectrum of its Gram matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Protocol, Sequence, runtime_checkable

import numpy as np
import scipy.linalg

from .exceptions import CertificateError, GroupMismatchError, ProbeError
from .groupring import FormalSum, format_coefficient, left_translate
from .groups import GroupElement, LatticeElement, ShearletElement
from .numerics import SampledFunction, inner_product
from .representations import RepresentationKind, RepresentationTag, apply

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-8
DEFAULT_FLOOR = 1e-10


class CertificateSpace(str, Enum):
    HPI = "hpi"
    L2G = "l2g"


@runtime_checkable
class GroupFunction(Protocol):
    """A function on a truncated parameter box of a group."""

    def sample(self) -> np.ndarray: ...

    def translated(self, g: GroupElement) -> np.ndarray: ...

    def haar_weights(self) -> np.ndarray: ...

    def norm(self) -> float: ...


@dataclass(frozen=True, eq=False)
class Term:
    coefficient: complex
    element: GroupElement

    def __post_init__(self):
        coefficient = complex(self.coefficient)
        if coefficient == 0 or not np.isfinite(coefficient):
            raise CertificateError(f"Certificate coefficients must be finite and nonzero, got {coefficient}.")
        object.__setattr__(self, "coefficient", coefficient)

    def literal(self) -> str:
        return f"{format_coefficient(self.coefficient)} * {self.element.literal()}"


def distinct_elements(elements: Sequence[GroupElement]) -> bool:
    return not any(
        elements[j].is_close(elements[k]) for j in range(len(elements)) for k in range(j)
    )


@dataclass(frozen=True, eq=False)
class DependencyCertificate:
    space: CertificateSpace
    terms: tuple[Term, ...]
    target: SampledFunction | GroupFunction | None = None
    rep: RepresentationTag | None = None
    source_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "space", CertificateSpace(self.space))
        terms = tuple(term if isinstance(term, Term) else Term(*term) for term in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise CertificateError("A certificate needs at least one term.")
        signature = terms[0].element.signature
        if any(term.element.signature != signature for term in terms):
            raise CertificateError("All certificate elements must come from one group.")
        if not distinct_elements(self.elements):
            raise CertificateError("Certificate elements must be pairwise distinct.")
        if self.rep is None:
            raise CertificateError("Certificates name the representation they were built for.")
        if terms[0].element.kind is not self.rep.group_kind:
            raise CertificateError(f"{self.rep.name} does not act through {terms[0].element.kind.value} elements.")
        if self.target is not None:
            if self.space is CertificateSpace.HPI and not isinstance(self.target, SampledFunction):
                raise CertificateError("Representation-space certificates target a sampled function.")
            if self.space is CertificateSpace.L2G and not isinstance(self.target, GroupFunction):
                raise CertificateError("Group-side certificates target a function on the group.")

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return tuple(term.coefficient for term in self.terms)

    @property
    def elements(self) -> tuple[GroupElement, ...]:
        return tuple(term.element for term in self.terms)

    def with_target(self, target) -> DependencyCertificate:
        return DependencyCertificate(self.space, self.terms, target, self.rep, self.source_residual)

    def lines(self) -> list[str]:
        return [term.literal() for term in self.terms]


def verify(cert: DependencyCertificate, *, normalized: bool = True) -> float:
    """Norm of sum c_k Lambda(g_k) target, divided by the target norm unless ``normalized`` is off."""
    target = cert.target
    if target is None:
        raise CertificateError("The certificate has no target function to verify against.")

    if cert.space is CertificateSpace.HPI:
        total = np.zeros(target.grid.shape, dtype=complex)
        for term in cert.terms:
            total = total + term.coefficient * apply(cert.rep, term.element, target).values
        residual = float(np.sqrt(np.sum(np.abs(total) ** 2) * target.grid.cell_volume))
        norm = target.norm()
    else:
        weights = target.haar_weights()
        total = np.zeros(weights.shape, dtype=complex)
        for term in cert.terms:
            total = total + term.coefficient * target.translated(term.element)
        residual = float(np.sqrt(np.sum(np.abs(total) ** 2 * weights)))
        norm = target.norm()

    logger.debug("Certificate with %d terms: unnormalized residual %.3g", len(cert.terms), residual)
    if not normalized:
        return residual
    if norm == 0:
        raise CertificateError("The target vanishes; a relative residual is undefined.")
    return residual / norm


# Refinement masks ----------------------------------------------------------------------


@dataclass(frozen=True)
class Mask:
    """Finitely supported refinement mask, keys bounded by ``bound`` in max norm."""

    coefficients: Mapping[tuple[int, ...], complex]
    bound: int = 64

    def __post_init__(self):
        entries = {}
        for key, value in dict(self.coefficients).items():
            index = tuple(int(k) for k in np.atleast_1d(key))
            if max(abs(k) for k in index) > self.bound:
                raise CertificateError(f"Mask entry {index} lies outside the declared bound {self.bound}.")
            if complex(value) != 0:
                entries[index] = complex(value)
        if len({len(index) for index in entries}) > 1:
            raise CertificateError("Mask indices must all have the same dimension.")
        object.__setattr__(self, "coefficients", entries)

    @property
    def dimension(self) -> int:
        return len(next(iter(self.coefficients))) if self.coefficients else 0

    def __len__(self) -> int:
        return len(self.coefficients)


def verify_refinement(f: SampledFunction, mask: Mask, dilation, *, normalized: bool = True) -> float:
    """Residual of f(x) - sum_beta a(beta) f(D x - beta) over the grid.

    ``dilation`` is the matrix D applied to x: 2 for dyadic refinement on
    the line, diag(1/4, 1/2) = A_4^-1 for the parabolic shearlet form.
    """
    grid = f.grid
    if mask.dimension and mask.dimension != grid.dimension:
        raise CertificateError(f"Mask of dimension {mask.dimension} on a {grid.dimension}-dimensional grid.")
    matrix = np.atleast_2d(np.asarray(dilation, dtype=float))
    if matrix.shape == (1, 1):
        matrix = matrix[0, 0] * np.eye(grid.dimension)
    if matrix.shape != (grid.dimension, grid.dimension):
        raise CertificateError(f"Dilation of shape {matrix.shape} does not fit the grid.")

    coords = grid.coordinates()
    scaled = [sum(matrix[i, j] * coords[j] for j in range(grid.dimension)) for i in range(grid.dimension)]
    residual = f.values.copy()
    for beta, value in mask.coefficients.items():
        residual = residual - value * f.lookup(*(scaled[i] - beta[i] for i in range(grid.dimension)))
    unnormalized = float(np.sqrt(np.sum(np.abs(residual) ** 2) * grid.cell_volume))
    if not normalized:
        return unnormalized
    norm = f.norm()
    if norm == 0:
        raise CertificateError("The refinement residual of the zero function is not normalizable.")
    return unnormalized / norm


SHEARLET_REFINEMENT = np.diag([0.25, 0.5])


def shearlet_dependency_from_mask(mask: Mask, target: SampledFunction | None = None) -> DependencyCertificate:
    """Certificate pi(e) f - sum 4^(3/4) a(beta) pi(S_0 A_4, beta') f = 0 with beta' = (4 b1, 2 b2)."""
    if not mask.coefficients:
        raise CertificateError("The mask is empty.")
    if mask.dimension != 2:
        raise CertificateError("Shearlet masks are indexed by Z^2.")
    terms = [Term(1.0, ShearletElement(1.0, 0.0, (0.0, 0.0)))]
    for (b1, b2), value in sorted(mask.coefficients.items()):
        terms.append(Term(-(4 ** 0.75) * value, ShearletElement(4.0, 0.0, (4.0 * b1, 2.0 * b2))))
    rep = RepresentationTag(RepresentationKind.SHEARLET, 2)
    return DependencyCertificate(CertificateSpace.HPI, tuple(terms), target, rep)


# Independence probes ---------------------------------------------------------------


class Verdict(str, Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    INCONCLUSIVE = "inconclusive"


class RepresentationSpace:
    """Translates rep(g) f of a sampled function."""

    def __init__(self, rep: RepresentationTag):
        self.rep = rep
        self.label = f"hpi:{rep.name}"

    def is_zero(self, f: SampledFunction) -> bool:
        return f.is_zero()

    def orbit(self, elements, f: SampledFunction) -> tuple[np.ndarray, np.ndarray]:
        rows = np.array([apply(self.rep, g, f).values.ravel() for g in elements])
        return rows, np.full(rows.shape[1], f.grid.cell_volume)

    def pair(self, g, h, f: SampledFunction) -> complex:
        return inner_product(apply(self.rep, g, f), apply(self.rep, h, f))


class GroupFunctionSpace:
    """Left translates x -> F(g^-1 x) of a function on a parameter box."""

    label = "l2g"

    def is_zero(self, target: GroupFunction) -> bool:
        return not np.any(target.sample())

    def orbit(self, elements, target: GroupFunction) -> tuple[np.ndarray, np.ndarray]:
        rows = np.array([target.translated(g).ravel() for g in elements])
        return rows, target.haar_weights().ravel()

    def pair(self, g, h, target: GroupFunction) -> complex:
        weights = target.haar_weights()
        return complex(np.sum(target.translated(g) * np.conj(target.translated(h)) * weights))


class SequenceSpace:
    """Left translates of a finitely supported sequence on a discrete group."""

    label = "l2-discrete"

    def is_zero(self, f: FormalSum) -> bool:
        return not f

    def orbit(self, elements, f: FormalSum) -> tuple[np.ndarray, np.ndarray]:
        translates = [left_translate(g, f) for g in elements]
        index = sorted({x for t in translates for x in t.support()}, key=lambda x: x.sort_key())
        rows = np.array([[complex(t.as_float()[x]) for x in index] for t in translates])
        return rows, np.ones(len(index))

    def pair(self, g, h, f: FormalSum) -> complex:
        return left_translate(g, f).inner(left_translate(h, f))


@dataclass(frozen=True, eq=False)
class IndependenceProbe:
    space: str
    elements: tuple[GroupElement, ...]
    gram: np.ndarray
    eigenvalues: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    floor: float = DEFAULT_FLOOR

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def relative_min(self) -> float:
        return self.min_eigenvalue / self.max_eigenvalue if self.max_eigenvalue > 0 else 0.0

    @property
    def verdict(self) -> Verdict:
        if self.relative_min > self.threshold:
            return Verdict.INDEPENDENT
        if self.relative_min < self.floor:
            return Verdict.DEPENDENT
        return Verdict.INCONCLUSIVE

    def as_record(self) -> dict:
        return {
            "space": self.space,
            "elements": [g.literal() for g in self.elements],
            "spectrum": [float(value) for value in self.eigenvalues],
            "relative_min": self.relative_min,
            "threshold": self.threshold,
            "floor": self.floor,
            "verdict": self.verdict.value,
        }


def _validate_probe(space, elements, f, threshold, floor) -> tuple[GroupElement, ...]:
    elements = tuple(elements)
    if not elements:
        raise ProbeError("A probe needs at least one element.")
    if not 0 < floor <= threshold:
        raise ProbeError(f"Need 0 < floor <= threshold, got floor {floor} and threshold {threshold}.")
    if space.is_zero(f):
        raise ProbeError("Translates of the zero function are trivially dependent; give a nonzero f.")
    try:
        distinct = distinct_elements(elements)
    except GroupMismatchError as exc:
        raise ProbeError(str(exc)) from exc
    if not distinct:
        raise ProbeError("Probe elements must be pairwise distinct.")
    return elements


def gram_matrix(space, elements: Sequence[GroupElement], f) -> np.ndarray:
    rows, weights = space.orbit(elements, f)
    gram = (rows * weights) @ rows.conj().T
    logger.debug("Gram matrix %d x %d over %d samples", len(elements), len(elements), rows.shape[1])
    return (gram + gram.conj().T) / 2


def gram_matrix_by_pairs(space, elements: Sequence[GroupElement], f) -> np.ndarray:
    """Reference Gram matrix from one inner product per pair."""
    size = len(elements)
    gram = np.empty((size, size), dtype=complex)
    for j in range(size):
        for k in range(size):
            gram[j, k] = space.pair(elements[j], elements[k], f)
    return gram


def probe_independence(
    space,
    elements: Sequence[GroupElement | LatticeElement],
    f,
    threshold: float = DEFAULT_THRESHOLD,
    floor: float = DEFAULT_FLOOR,
) -> IndependenceProbe:
    elements = _validate_probe(space, elements, f, threshold, floor)
    gram = gram_matrix(space, elements, f)
    eigenvalues = scipy.linalg.eigh(gram, eigvals_only=True)
    probe = IndependenceProbe(space.label, elements, gram, eigenvalues, threshold, floor)
    if probe.verdict is Verdict.INCONCLUSIVE:
        logger.warning(
            "Probe over %d elements is inconclusive: relative minimum eigenvalue %.3g",
            len(elements),
            probe.relative_min,
        )
    return probe
