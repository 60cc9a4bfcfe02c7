"""Group elements, multiplication, inversion and Haar densities.

Continuous groups: the affine group R* x| R (with the positive subgroup
``a > 0``), the Weyl-Heisenberg group T x R^n x R^n and the shearlet
group. Discrete groups used by the group ring: Z^n, Z/m and rational
Heisenberg lattices with exact :class:`~fractions.Fraction` coordinates.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .exceptions import ElementError, GroupMismatchError, LiteralSyntaxError

# Parameters of continuous elements are compared with this tolerance.
PARAMETER_TOLERANCE = 1e-12


class GroupKind(str, Enum):
    AFFINE = "affine"
    WEYL_HEISENBERG = "wh"
    SHEARLET = "shear"
    ZN = "zn"
    CYCLIC = "zmod"
    HEISENBERG_LATTICE = "heis"

    @property
    def is_discrete(self) -> bool:
        return self in (GroupKind.ZN, GroupKind.CYCLIC, GroupKind.HEISENBERG_LATTICE)


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


def _real(value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ElementError(f"Group parameters must be finite, got {value}.")
    return value


def _format_real(value: float) -> str:
    return repr(float(value))


def _format_rational(value: Fraction) -> str:
    return str(value)


def _circle_distance(t: float, s: float) -> float:
    difference = abs(t - s) % 1.0
    return min(difference, 1.0 - difference)


class GroupElement:
    """Common behaviour of every element type.

    Subclasses provide ``kind``, ``signature``, ``multiply``, ``inverse``,
    ``is_close`` and ``literal``.
    """

    kind: GroupKind

    @property
    def signature(self) -> tuple:
        """Identifies the group; elements combine only with equal signatures."""
        return (self.kind,)

    def _check_partner(self, other: GroupElement) -> None:
        if not isinstance(other, GroupElement) or other.signature != self.signature:
            other_signature = getattr(other, "signature", type(other).__name__)
            raise GroupMismatchError(f"Cannot combine {self.signature} with {other_signature}.")

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def identity(self) -> GroupElement:
        return identity_like(self)

    def __str__(self) -> str:
        return self.literal()


@dataclass(frozen=True, eq=False)
class AffineElement(GroupElement):
    """(a, b) with a != 0, acting on R by x -> a x + b."""

    a: float
    b: float = 0.0

    kind = GroupKind.AFFINE

    def __post_init__(self):
        object.__setattr__(self, "a", _real(self.a))
        object.__setattr__(self, "b", _real(self.b))
        if self.a == 0:
            raise ElementError("Affine elements need a != 0.")

    @property
    def is_positive(self) -> bool:
        return self.a > 0

    def multiply(self, other: AffineElement) -> AffineElement:
        return AffineElement(self.a * other.a, self.b + self.a * other.b)

    def inverse(self) -> AffineElement:
        return AffineElement(1.0 / self.a, -self.b / self.a)

    def parameters(self) -> tuple[float, ...]:
        return (self.a, self.b)

    def is_close(self, other: GroupElement, tolerance: float = PARAMETER_TOLERANCE) -> bool:
        self._check_partner(other)
        return abs(self.a - other.a) <= tolerance and abs(self.b - other.b) <= tolerance

    def literal(self) -> str:
        return f"affine({_format_real(self.a)}, {_format_real(self.b)})"


@dataclass(frozen=True, eq=False)
class WeylHeisenbergElement(GroupElement):
    """(t, a, b) with the circle coordinate t stored in [0, 1)."""

    t: float
    a: tuple[float, ...]
    b: tuple[float, ...]

    kind = GroupKind.WEYL_HEISENBERG

    def __post_init__(self):
        a = tuple(_real(value) for value in np.atleast_1d(self.a))
        b = tuple(_real(value) for value in np.atleast_1d(self.b))
        if len(a) != len(b) or not a:
            raise ElementError(f"a and b must have the same positive length, got {len(a)} and {len(b)}.")
        t = _real(self.t) % 1.0
        if t >= 1.0:
            t = 0.0
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def signature(self) -> tuple:
        return (self.kind, self.n)

    def multiply(self, other: WeylHeisenbergElement) -> WeylHeisenbergElement:
        cocycle = float(np.dot(self.a, other.b))
        return WeylHeisenbergElement(
            self.t + other.t + cocycle,
            tuple(x + y for x, y in zip(self.a, other.a)),
            tuple(x + y for x, y in zip(self.b, other.b)),
        )

    def inverse(self) -> WeylHeisenbergElement:
        return WeylHeisenbergElement(
            float(np.dot(self.a, self.b)) - self.t,
            tuple(-x for x in self.a),
            tuple(-x for x in self.b),
        )

    def parameters(self) -> tuple[float, ...]:
        return (self.t, *self.a, *self.b)

    def is_close(self, other: GroupElement, tolerance: float = PARAMETER_TOLERANCE) -> bool:
        self._check_partner(other)
        if _circle_distance(self.t, other.t) > tolerance:
            return False
        return all(abs(x - y) <= tolerance for x, y in zip(self.a + self.b, other.a + other.b))

    def literal(self) -> str:
        values = ", ".join(_format_real(value) for value in self.parameters())
        return f"wh({values})"


@dataclass(frozen=True, eq=False)
class ShearletElement(GroupElement):
    """(S_s A_a, t) with A_a = diag(a, sqrt(a)) and S_s = [[1, s], [0, 1]]."""

    a: float
    s: float = 0.0
    t: tuple[float, float] = (0.0, 0.0)

    kind = GroupKind.SHEARLET

    def __post_init__(self):
        object.__setattr__(self, "a", _real(self.a))
        object.__setattr__(self, "s", _real(self.s))
        t = tuple(_real(value) for value in self.t)
        if len(t) != 2:
            raise ElementError(f"Shearlet translations live in R^2, got {len(t)} coordinates.")
        object.__setattr__(self, "t", t)
        if self.a <= 0:
            raise ElementError("Shearlet elements need a > 0.")

    def matrix(self) -> np.ndarray:
        root = math.sqrt(self.a)
        return np.array([[self.a, self.s * root], [0.0, root]])

    def inverse_matrix(self) -> np.ndarray:
        return np.array([[1.0 / self.a, -self.s / self.a], [0.0, 1.0 / math.sqrt(self.a)]])

    def multiply(self, other: ShearletElement) -> ShearletElement:
        shift = self.matrix() @ np.asarray(other.t)
        return ShearletElement(
            self.a * other.a,
            self.s + other.s * math.sqrt(self.a),
            (self.t[0] + shift[0], self.t[1] + shift[1]),
        )

    def inverse(self) -> ShearletElement:
        shift = -(self.inverse_matrix() @ np.asarray(self.t))
        return ShearletElement(1.0 / self.a, -self.s / math.sqrt(self.a), (shift[0], shift[1]))

    def parameters(self) -> tuple[float, ...]:
        return (self.a, self.s, *self.t)

    def is_close(self, other: GroupElement, tolerance: float = PARAMETER_TOLERANCE) -> bool:
        self._check_partner(other)
        return all(abs(x - y) <= tolerance for x, y in zip(self.parameters(), other.parameters()))

    def literal(self) -> str:
        values = ", ".join(_format_real(value) for value in self.parameters())
        return f"shear({values})"


class LatticeElement(GroupElement):
    """Discrete-group element with exact equality and hashing."""

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def is_close(self, other: GroupElement, tolerance: float = 0.0) -> bool:
        self._check_partner(other)
        return self == other


@dataclass(frozen=True, order=False)
class ZnElement(LatticeElement):
    coordinates: tuple[int, ...]

    kind = GroupKind.ZN

    def __post_init__(self):
        coordinates = tuple(int(value) for value in np.atleast_1d(self.coordinates))
        if not coordinates:
            raise ElementError("Z^n elements need at least one coordinate.")
        object.__setattr__(self, "coordinates", coordinates)

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def signature(self) -> tuple:
        return (self.kind, self.n)

    def multiply(self, other: ZnElement) -> ZnElement:
        return ZnElement(tuple(x + y for x, y in zip(self.coordinates, other.coordinates)))

    def inverse(self) -> ZnElement:
        return ZnElement(tuple(-x for x in self.coordinates))

    def sort_key(self) -> tuple:
        return (max(abs(x) for x in self.coordinates), self.coordinates)

    def literal(self) -> str:
        return "zn(" + ", ".join(str(x) for x in self.coordinates) + ")"


@dataclass(frozen=True)
class CyclicElement(LatticeElement):
    """g^residue in the cyclic group of order ``modulus``."""

    residue: int
    modulus: int

    kind = GroupKind.CYCLIC

    def __post_init__(self):
        modulus = int(self.modulus)
        if modulus < 1:
            raise ElementError(f"Cyclic groups need a positive order, got {modulus}.")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "residue", int(self.residue) % modulus)

    @property
    def signature(self) -> tuple:
        return (self.kind, self.modulus)

    def multiply(self, other: CyclicElement) -> CyclicElement:
        return CyclicElement(self.residue + other.residue, self.modulus)

    def inverse(self) -> CyclicElement:
        return CyclicElement(-self.residue, self.modulus)

    def sort_key(self) -> tuple:
        return (self.residue,)

    def literal(self) -> str:
        return f"zmod({self.residue}, {self.modulus})"


@dataclass(frozen=True)
class HeisenbergLatticeElement(LatticeElement):
    """(z, a, b) with rational entries and z reduced modulo 1."""

    z: Fraction
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    kind = GroupKind.HEISENBERG_LATTICE

    def __post_init__(self):
        a = tuple(_rational(value) for value in self.a)
        b = tuple(_rational(value) for value in self.b)
        if len(a) != len(b) or not a:
            raise ElementError(f"a and b must have the same positive length, got {len(a)} and {len(b)}.")
        object.__setattr__(self, "z", _rational(self.z) % 1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def signature(self) -> tuple:
        return (self.kind, self.n)

    def multiply(self, other: HeisenbergLatticeElement) -> HeisenbergLatticeElement:
        cocycle = sum((x * y for x, y in zip(self.a, other.b)), Fraction(0))
        return HeisenbergLatticeElement(
            self.z + other.z + cocycle,
            tuple(x + y for x, y in zip(self.a, other.a)),
            tuple(x + y for x, y in zip(self.b, other.b)),
        )

    def inverse(self) -> HeisenbergLatticeElement:
        pairing = sum((x * y for x, y in zip(self.a, self.b)), Fraction(0))
        return HeisenbergLatticeElement(pairing - self.z, tuple(-x for x in self.a), tuple(-x for x in self.b))

    def sort_key(self) -> tuple:
        return (self.a, self.b, self.z)

    def literal(self) -> str:
        a = ", ".join(_format_rational(x) for x in self.a)
        b = ", ".join(_format_rational(x) for x in self.b)
        return f"heis({_format_rational(self.z)}; {a}; {b})"


def _rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ElementError(f"Lattice coordinates must be exact rationals, got {value!r}.")


ContinuousElement = Union[AffineElement, WeylHeisenbergElement, ShearletElement]


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    g._check_partner(h)
    return g.multiply(h)


def invert(g: GroupElement) -> GroupElement:
    return g.inverse()


def identity_like(g: GroupElement) -> GroupElement:
    """Identity of the group ``g`` belongs to."""
    if isinstance(g, AffineElement):
        return AffineElement(1.0, 0.0)
    if isinstance(g, WeylHeisenbergElement):
        return WeylHeisenbergElement(0.0, (0.0,) * g.n, (0.0,) * g.n)
    if isinstance(g, ShearletElement):
        return ShearletElement(1.0, 0.0, (0.0, 0.0))
    if isinstance(g, ZnElement):
        return ZnElement((0,) * g.n)
    if isinstance(g, CyclicElement):
        return CyclicElement(0, g.modulus)
    if isinstance(g, HeisenbergLatticeElement):
        return HeisenbergLatticeElement(Fraction(0), (Fraction(0),) * g.n, (Fraction(0),) * g.n)
    raise GroupMismatchError(f"Unknown element type {type(g).__name__}.")


# Haar densities -------------------------------------------------------------

Density = Callable[..., np.ndarray]


def _ones(*parameters) -> np.ndarray:
    return np.ones(np.broadcast(*parameters).shape)


@dataclass(frozen=True)
class HaarDensity:
    """Left and right Haar densities in the group's parameter coordinates.

    Affine coordinates are (a, b); shearlet (a, s, t1, t2); Weyl-Heisenberg
    (t, a..., b...). Discrete groups carry counting measure.
    """

    kind: GroupKind
    left: Density
    right: Density

    def __call__(self, side: Side | str = Side.LEFT) -> Density:
        return self.left if Side(side) is Side.LEFT else self.right

    @property
    def unimodular(self) -> bool:
        return self.left is self.right


_HAAR = {
    GroupKind.AFFINE: HaarDensity(
        GroupKind.AFFINE,
        left=lambda a, *rest: 1.0 / np.asarray(a, dtype=float) ** 2 * _ones(a, *rest),
        right=lambda a, *rest: 1.0 / np.abs(np.asarray(a, dtype=float)) * _ones(a, *rest),
    ),
    GroupKind.SHEARLET: HaarDensity(
        GroupKind.SHEARLET,
        left=lambda a, *rest: 1.0 / np.asarray(a, dtype=float) ** 3 * _ones(a, *rest),
        right=lambda a, *rest: 1.0 / np.asarray(a, dtype=float) * _ones(a, *rest),
    ),
    GroupKind.WEYL_HEISENBERG: HaarDensity(GroupKind.WEYL_HEISENBERG, left=_ones, right=_ones),
}
for _kind in (GroupKind.ZN, GroupKind.CYCLIC, GroupKind.HEISENBERG_LATTICE):
    _HAAR[_kind] = HaarDensity(_kind, left=_ones, right=_ones)


def haar_measures(kind: GroupKind | str) -> HaarDensity:
    return _HAAR[GroupKind(kind)]


def haar_density(kind: GroupKind | str, side: Side | str = Side.LEFT) -> Density:
    return haar_measures(kind)(side)


# Parameter boxes --------------------------------------------------------------


def elements_on_mesh(kind: GroupKind | str, mesh: Sequence[np.ndarray]) -> list[ContinuousElement]:
    """Group elements at the nodes of a parameter mesh, in C order."""
    kind = GroupKind(kind)
    columns = [np.asarray(axis).ravel() for axis in mesh]
    if kind is GroupKind.AFFINE:
        return [AffineElement(a, b) for a, b in zip(*columns)]
    if kind is GroupKind.SHEARLET:
        return [ShearletElement(a, s, (t1, t2)) for a, s, t1, t2 in zip(*columns)]
    if kind is GroupKind.WEYL_HEISENBERG:
        n = (len(columns) - 1) // 2
        return [
            WeylHeisenbergElement(row[0], row[1:1 + n], row[1 + n:])
            for row in zip(*columns)
        ]
    raise GroupMismatchError(f"{kind.value} has no continuous parameter box.")


# Literals -------------------------------------------------------------------

_LITERAL = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$")


def parse_element(text: str, *, source: str = "<string>", line: int = 0) -> GroupElement:
    """Parse ``affine(a, b)``, ``wh(t, a..., b...)``, ``shear(a, s, t1, t2)``,
    ``zn(k1, ...)``, ``zmod(k, m)`` or ``heis(z; a...; b...)``.

    Numbers use exact rational syntax ``p/q`` (decimals are accepted for the
    continuous groups).
    """
    match = _LITERAL.match(text)
    if not match:
        raise LiteralSyntaxError(f"Not an element literal: {text.strip()!r}.", source=source, line=line)
    name, body = match.groups()
    column = text.index("(") + 2

    def numbers(chunk: str) -> list[Fraction]:
        tokens = [token.strip() for token in chunk.split(",")]
        if tokens == [""]:
            return []
        values = []
        for token in tokens:
            try:
                values.append(Fraction(token))
            except (ValueError, ZeroDivisionError):
                raise LiteralSyntaxError(
                    f"{token!r} is not a rational number.", source=source, line=line, column=column
                ) from None
        return values

    try:
        if name == "heis":
            parts = body.split(";")
            if len(parts) != 3:
                raise LiteralSyntaxError(
                    "heis literals need three ';'-separated groups: z; a...; b...",
                    source=source,
                    line=line,
                    column=column,
                )
            z, a, b = (numbers(part) for part in parts)
            if len(z) != 1:
                raise LiteralSyntaxError("heis literals take exactly one z.", source=source, line=line, column=column)
            return HeisenbergLatticeElement(z[0], tuple(a), tuple(b))
        values = numbers(body)
        if name == "affine" and len(values) == 2:
            return AffineElement(float(values[0]), float(values[1]))
        if name == "wh" and len(values) >= 3 and len(values) % 2 == 1:
            n = (len(values) - 1) // 2
            floats = [float(value) for value in values]
            return WeylHeisenbergElement(floats[0], tuple(floats[1:1 + n]), tuple(floats[1 + n:]))
        if name == "shear" and len(values) == 4:
            a, s, t1, t2 = (float(value) for value in values)
            return ShearletElement(a, s, (t1, t2))
        if name == "zn" and values and all(value.denominator == 1 for value in values):
            return ZnElement(tuple(int(value) for value in values))
        if name == "zmod" and len(values) == 2 and all(value.denominator == 1 for value in values):
            return CyclicElement(int(values[0]), int(values[1]))
    except ElementError as exc:
        raise LiteralSyntaxError(str(exc), source=source, line=line, column=column) from exc
    raise LiteralSyntaxError(
        f"Wrong arguments for {name!r}: {body.strip()!r}.", source=source, line=line, column=column
    )


def format_element(g: GroupElement) -> str:
    return g.literal()
