"""Formal sums over discrete groups, convolution and zero-divisor probes.

Coefficients are either exact Gaussian rationals (sympy's ``QQ_I``) or
complex floats. The mode is part of every :class:`FormalSum` and two sums
of different modes never combine.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import sympy
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.matrices import DomainMatrix

from .exceptions import ElementError, FormalSumError
from .groups import (
    CyclicElement,
    GroupKind,
    HeisenbergLatticeElement,
    LatticeElement,
    ZnElement,
    _rational,
    identity_like,
    multiply,
)

logger = logging.getLogger(__name__)

# Singular values below this count as zero in float mode.
KERNEL_TOLERANCE = 1e-12

FINITE_SUPPORT_NOTE = (
    "Only vectors supported in the probed ball are tested; a full-rank result "
    "does not exclude kernels in l2 outside that finite-support class."
)


class CoefficientMode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


def to_exact(value):
    """Convert ints, fractions, sympy numbers and QQ_I elements to QQ_I."""
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, (int, np.integer)):
        return QQ_I.convert(int(value))
    if isinstance(value, Fraction):
        return QQ_I.from_sympy(sympy.Rational(value.numerator, value.denominator))
    if isinstance(value, sympy.Basic):
        try:
            return QQ_I.from_sympy(value)
        except (CoercionFailed, TypeError, ValueError):
            pass
    raise FormalSumError(f"{value!r} is not a Gaussian rational; exact sums need exact coefficients.")


def to_float(value) -> complex:
    if isinstance(value, QQ_I.dtype):
        return complex(QQ_I.to_sympy(value))
    if isinstance(value, sympy.Basic):
        return complex(value)
    return complex(value)


def format_coefficient(value) -> str:
    if isinstance(value, QQ_I.dtype):
        text = str(QQ_I.to_sympy(value))
    else:
        value = complex(value)
        if value.imag == 0:
            text = repr(value.real)
        else:
            text = f"{value.real!r} + {value.imag!r}*I"
    return f"({text})" if any(symbol in text.lstrip("-") for symbol in "+- ") else text


class FormalSum:
    """Finitely supported function on a discrete group: sum of a_g g.

    Built from ``(coefficient, element)`` pairs; repeated elements are
    added together and zero coefficients are dropped.
    """

    __slots__ = ("_terms", "mode", "signature")

    def __init__(
        self,
        pairs: Iterable[tuple[object, LatticeElement]] = (),
        *,
        mode: CoefficientMode | str = CoefficientMode.EXACT,
        signature: tuple | None = None,
    ):
        self.mode = CoefficientMode(mode)
        self.signature = signature
        terms: dict[LatticeElement, object] = {}
        convert = to_exact if self.mode is CoefficientMode.EXACT else to_float
        for coefficient, element in pairs:
            if not isinstance(element, LatticeElement):
                raise FormalSumError(f"Formal sums live on discrete groups, got {element}.")
            if self.signature is None:
                self.signature = element.signature
            elif element.signature != self.signature:
                raise FormalSumError(f"Mixed groups in one formal sum: {self.signature} and {element.signature}.")
            value = convert(coefficient)
            terms[element] = terms[element] + value if element in terms else value
        self._terms = {element: value for element, value in terms.items() if value}
        if self.signature is None:
            raise FormalSumError("An empty formal sum needs an explicit group signature.")

    @classmethod
    def delta(cls, element: LatticeElement, coefficient=1, *, mode=CoefficientMode.EXACT) -> FormalSum:
        return cls([(coefficient, element)], mode=mode)

    @classmethod
    def zero_like(cls, other: FormalSum) -> FormalSum:
        return cls(mode=other.mode, signature=other.signature)

    def _zero(self):
        return QQ_I.zero if self.mode is CoefficientMode.EXACT else 0j

    @property
    def kind(self) -> GroupKind:
        return self.signature[0]

    def support(self) -> list[LatticeElement]:
        return sorted(self._terms, key=lambda element: element.sort_key())

    def items(self) -> list[tuple[LatticeElement, object]]:
        return [(element, self._terms[element]) for element in self.support()]

    def __getitem__(self, element: LatticeElement):
        return self._terms.get(element, self._zero())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self.mode is other.mode and self.signature == other.signature and self._terms == other._terms

    __hash__ = None

    def _check_partner(self, other: FormalSum) -> None:
        if not isinstance(other, FormalSum):
            raise FormalSumError(f"Expected a formal sum, got {type(other).__name__}.")
        if other.mode is not self.mode:
            raise FormalSumError(f"Cannot combine {self.mode.value} and {other.mode.value} coefficients.")
        if other.signature != self.signature:
            raise FormalSumError(f"Formal sums over different groups: {self.signature} and {other.signature}.")

    def __add__(self, other: FormalSum) -> FormalSum:
        self._check_partner(other)
        pairs = [(value, element) for element, value in self._terms.items()]
        pairs += [(value, element) for element, value in other._terms.items()]
        return FormalSum(pairs, mode=self.mode, signature=self.signature)

    def __neg__(self) -> FormalSum:
        return FormalSum(((-value, element) for element, value in self._terms.items()), mode=self.mode, signature=self.signature)

    def __sub__(self, other: FormalSum) -> FormalSum:
        return self + (-other)

    def scale(self, scalar) -> FormalSum:
        convert = to_exact if self.mode is CoefficientMode.EXACT else to_float
        factor = convert(scalar)
        return FormalSum(((factor * value, element) for element, value in self._terms.items()), mode=self.mode, signature=self.signature)

    def __mul__(self, other):
        if isinstance(other, FormalSum):
            return convolve(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def as_float(self) -> FormalSum:
        return FormalSum(
            ((to_float(value), element) for element, value in self._terms.items()),
            mode=CoefficientMode.FLOAT,
            signature=self.signature,
        )

    def inner(self, other: FormalSum) -> complex:
        """l2 inner product, conjugate-linear in ``other``."""
        self._check_partner(other)
        return sum(
            (to_float(value) * np.conj(to_float(other[element])) for element, value in self._terms.items()),
            0j,
        )

    def norm2(self) -> float:
        return float(sum(abs(to_float(value)) ** 2 for value in self._terms.values()))

    def lines(self) -> list[str]:
        return [f"{format_coefficient(value)} * {element.literal()}" for element, value in self.items()]

    def __repr__(self) -> str:
        body = " + ".join(self.lines()) or "0"
        return f"FormalSum[{self.mode.value}]({body})"


def convolve(alpha: FormalSum, f: FormalSum) -> FormalSum:
    """alpha * f = sum over g, h of a_g b_h (g h)."""
    alpha._check_partner(f)
    pairs = [
        (a * b, multiply(g, h))
        for g, a in alpha._terms.items()
        for h, b in f._terms.items()
    ]
    return FormalSum(pairs, mode=alpha.mode, signature=alpha.signature)


def left_translate(g: LatticeElement, f: FormalSum) -> FormalSum:
    """L_g f = sum of a_x (g x)."""
    if g.signature != f.signature:
        raise FormalSumError(f"Cannot translate a sum over {f.signature} by an element of {g.signature}.")
    return FormalSum(((value, multiply(g, x)) for x, value in f._terms.items()), mode=f.mode, signature=f.signature)


# Convolution matrices -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConvolutionMatrix:
    """alpha * (.) restricted to vectors supported on ``columns``."""

    rows: tuple[LatticeElement, ...]
    columns: tuple[LatticeElement, ...]
    entries: np.ndarray
    exact: DomainMatrix | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.columns))


def _product_support(alpha: FormalSum, columns: Sequence[LatticeElement]) -> list[LatticeElement]:
    products = {multiply(g, h) for g in alpha.support() for h in columns}
    return sorted(products, key=lambda element: element.sort_key())


def convolution_matrix(alpha: FormalSum, columns: Sequence[LatticeElement]) -> ConvolutionMatrix:
    """Matrix of f -> alpha * f on sums supported in ``columns``.

    Entry (x, h) is the coefficient of alpha at x h^-1; it is filled from
    alpha's support, one product g h per term and column.
    """
    if not alpha:
        raise FormalSumError("The convolution matrix of the zero sum is trivial; give a nonzero alpha.")
    rows = _product_support(alpha, columns)
    position = {row: index for index, row in enumerate(rows)}
    table = [[alpha._zero() for _ in columns] for _ in rows]
    for j, h in enumerate(columns):
        for g, a in alpha.items():
            i = position[multiply(g, h)]
            table[i][j] = table[i][j] + a
    entries = np.array([[to_float(value) for value in row] for row in table], dtype=complex).reshape(len(rows), len(columns))
    exact = alpha.mode is CoefficientMode.EXACT
    domain_matrix = DomainMatrix(table, (len(rows), len(columns)), QQ_I) if exact else None
    logger.debug("Convolution matrix %d x %d over %s", len(rows), len(columns), alpha.signature)
    return ConvolutionMatrix(tuple(rows), tuple(columns), entries, domain_matrix)


def convolution_matrix_by_sum(
    alpha: FormalSum, rows: Sequence[LatticeElement], columns: Sequence[LatticeElement]
) -> np.ndarray:
    """Brute-force reference: entry (x, h) sums a_g over every g with g h = x."""
    entries = np.zeros((len(rows), len(columns)), dtype=complex)
    for i, x in enumerate(rows):
        for j, h in enumerate(columns):
            for g, a in alpha.items():
                if multiply(g, h) == x:
                    entries[i, j] += to_float(a)
    return entries


def support_ball(
    template: LatticeElement, radius: int, generators: Sequence[LatticeElement] | None = None
) -> list[LatticeElement]:
    """Elements within ``radius`` of the identity.

    Max-norm box on Z^n; word length in the generator on Z/m; word length
    in ``generators`` and their inverses on Heisenberg lattices.
    """
    if radius < 0:
        raise FormalSumError(f"Support radius must be non-negative, got {radius}.")
    if isinstance(template, ZnElement):
        span = range(-radius, radius + 1)
        return [ZnElement(point) for point in itertools.product(span, repeat=template.n)]
    if isinstance(template, CyclicElement):
        m = template.modulus
        return [CyclicElement(k, m) for k in range(m) if min(k, m - k) <= radius]
    if isinstance(template, HeisenbergLatticeElement):
        identity = identity_like(template)
        moves = [g for g in (generators or ()) if g != identity]
        if not moves:
            raise ElementError("Word-length balls on a Heisenberg lattice need at least one generator.")
        moves += [g.inverse() for g in moves]
        seen = {identity: 0}
        queue = deque([identity])
        while queue:
            current = queue.popleft()
            if seen[current] == radius:
                continue
            for move in moves:
                step = multiply(current, move)
                if step not in seen:
                    seen[step] = seen[current] + 1
                    queue.append(step)
        return sorted(seen, key=lambda element: element.sort_key())
    raise FormalSumError(f"No support ball for {template.signature}.")


@dataclass(frozen=True)
class ZeroDivisorReport:
    min_singular_value: float
    witness: FormalSum | None
    radius: int
    rows: int
    columns: int
    kernel_dimension: int
    exact: bool
    note: str = FINITE_SUPPORT_NOTE

    def as_record(self) -> dict:
        return {
            "min_singular_value": self.min_singular_value,
            "witness": self.witness.lines() if self.witness is not None else None,
            "radius": self.radius,
            "rows": self.rows,
            "columns": self.columns,
            "kernel_dimension": self.kernel_dimension,
            "exact": self.exact,
            "note": self.note,
        }


def zero_divisor_probe(
    alpha: FormalSum, support_radius: int, *, generators: Sequence[LatticeElement] | None = None
) -> ZeroDivisorReport:
    """Smallest singular value of alpha * (.) on the radius ball, with a kernel witness if any."""
    if not alpha:
        raise FormalSumError("zero_divisor_probe needs a nonzero alpha.")
    template = alpha.support()[0]
    if generators is None and isinstance(template, HeisenbergLatticeElement):
        generators = alpha.support()
    columns = support_ball(template, support_radius, generators)
    matrix = convolution_matrix(alpha, columns)
    singular_values = scipy.linalg.svd(matrix.entries, compute_uv=False)
    smallest = float(singular_values[-1]) if matrix.shape[0] >= matrix.shape[1] else 0.0
    witness = None

    if matrix.exact is not None:
        rank = matrix.exact.rank()
        kernel_dimension = len(columns) - rank
        if kernel_dimension:
            basis = matrix.exact.nullspace().to_Matrix()
            vector = [basis[0, j] for j in range(basis.shape[1])]
            witness = FormalSum(zip(vector, columns), mode=CoefficientMode.EXACT, signature=alpha.signature)
            smallest = 0.0
    else:
        kernel_dimension = int(np.sum(singular_values < KERNEL_TOLERANCE)) + max(0, matrix.shape[1] - matrix.shape[0])
        if smallest < KERNEL_TOLERANCE:
            _, _, vh = scipy.linalg.svd(matrix.entries)
            vector = np.conj(vh[-1])
            vector = vector / vector[np.argmax(np.abs(vector))]
            witness = FormalSum(
                ((value, element) for value, element in zip(vector, columns) if abs(value) > KERNEL_TOLERANCE),
                mode=CoefficientMode.FLOAT,
                signature=alpha.signature,
            )

    logger.info(
        "Zero-divisor probe over %s, radius %d: min singular value %.3g", alpha.signature, support_radius, smallest
    )
    return ZeroDivisorReport(
        min_singular_value=smallest,
        witness=witness,
        radius=support_radius,
        rows=matrix.shape[0],
        columns=matrix.shape[1],
        kernel_dimension=kernel_dimension,
        exact=matrix.exact is not None,
    )


def torsion_element(m: int) -> FormalSum:
    """1 + g + ... + g^(m-1) in the group ring of Z/m."""
    return FormalSum(((1, CyclicElement(k, m)) for k in range(m)), mode=CoefficientMode.EXACT)


def zn_fourier_criterion(alpha: FormalSum, resolution: int) -> tuple[float, float]:
    """Min and max of |sum a_g exp(-2 pi i g.theta)| on a midpoint grid of the torus."""
    if alpha.kind is not GroupKind.ZN:
        raise FormalSumError(f"The Fourier criterion applies to Z^n only, got {alpha.kind.value}.")
    if resolution < 1:
        raise FormalSumError(f"Resolution must be positive, got {resolution}.")
    n = alpha.signature[1]
    axis = (np.arange(resolution) + 0.5) / resolution
    theta = np.meshgrid(*([axis] * n), indexing="ij")
    symbol = np.zeros(theta[0].shape, dtype=complex)
    for element, value in alpha.items():
        phase = sum(k * t for k, t in zip(element.coordinates, theta))
        symbol += to_float(value) * np.exp(-2j * np.pi * phase)
    magnitude = np.abs(symbol)
    return float(magnitude.min()), float(magnitude.max())


# Rational Heisenberg lattices ----------------------------------------------------


def _lattice_vectors(points) -> list[tuple[Fraction, ...]]:
    vectors = []
    for a, b in points:
        a = tuple(_rational(x) for x in np.atleast_1d(np.asarray(a, dtype=object)))
        b = tuple(_rational(x) for x in np.atleast_1d(np.asarray(b, dtype=object)))
        if len(a) != len(b):
            raise ElementError(f"a and b must have equal length, got {len(a)} and {len(b)}.")
        vectors.append(a + b)
    if not vectors:
        raise ElementError("At least one lattice point is required.")
    if len({len(vector) for vector in vectors}) != 1:
        raise ElementError("All lattice points must have the same dimension.")
    return vectors


def heisenberg_lattice_basis(points) -> list[tuple[Fraction, ...]]:
    """Basis of the subgroup of Q^2n generated by the points (a_k, b_k)."""
    vectors = _lattice_vectors(points)
    scale = math.lcm(*(x.denominator for vector in vectors for x in vector))
    integral = sympy.Matrix([[int(x * scale) for x in vector] for vector in vectors]).T
    if integral.rank() == 0:
        return []
    normal = hermite_normal_form(integral)
    basis = []
    for j in range(normal.shape[1]):
        column = [Fraction(int(normal[i, j]), scale) for i in range(normal.shape[0])]
        if any(column):
            basis.append(tuple(column))
    return basis


def _generates(basis: list[tuple[Fraction, ...]], vectors: list[tuple[Fraction, ...]]) -> bool:
    """The basis vectors are independent and give every generator with integer coefficients."""
    if not basis:
        return not any(any(vector) for vector in vectors)
    matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in vector] for vector in basis]).T
    if matrix.rank() != len(basis):
        return False
    for vector in vectors:
        target = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in vector])
        try:
            solution, free = matrix.gauss_jordan_solve(target)
        except ValueError:
            return False
        if free.shape[0] or not all(value.is_integer for value in solution):
            return False
    return True


def heisenberg_lattice_check(points, r: int) -> bool:
    """True iff r (a_h . b_k) is an integer for all h, k and the points span a lattice.

    The lattice is confirmed through its Hermite normal form basis: the
    basis must be linearly independent and must reproduce every generator
    with integer coefficients.
    """
    if int(r) != r or r <= 0:
        raise ElementError(f"r must be a positive integer, got {r}.")
    vectors = _lattice_vectors(points)
    n = len(vectors[0]) // 2
    for h in vectors:
        for k in vectors:
            pairing = sum((x * y for x, y in zip(h[:n], k[n:])), Fraction(0))
            if (r * pairing).denominator != 1:
                return False
    basis = heisenberg_lattice_basis(points)
    logger.debug("Lattice generated by %d points has rank %d", len(vectors), len(basis))
    return _generates(basis, vectors)
