"""Translation, modulation, dilation and the four unitary representations.

Every operator is an :class:`Action`: a pullback of the coordinates and a
pointwise factor, ``(Uf)(x) = factor(x) * f(pullback(x))``. Functions that
carry a closed-form profile are re-evaluated exactly; plain samples are
looked up directly when the pulled-back points are grid nodes and linearly
interpolated otherwise. Both paths read zero outside the box.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .exceptions import RepresentationError
from .groups import (
    AffineElement,
    GroupElement,
    GroupKind,
    ShearletElement,
    WeylHeisenbergElement,
    multiply,
)
from .numerics import SampledFunction

logger = logging.getLogger(__name__)

# Escaped mass above this fraction is logged.
ESCAPE_WARNING = 1e-8


class RepresentationKind(str, Enum):
    AFFINE = "pi-affine"
    AFFINE_PLUS = "pi-plus"
    SCHROEDINGER = "schroedinger"
    SHEARLET = "pi-shearlet"


_GROUPS = {
    RepresentationKind.AFFINE: GroupKind.AFFINE,
    RepresentationKind.AFFINE_PLUS: GroupKind.AFFINE,
    RepresentationKind.SCHROEDINGER: GroupKind.WEYL_HEISENBERG,
    RepresentationKind.SHEARLET: GroupKind.SHEARLET,
}


@dataclass(frozen=True)
class RepresentationTag:
    kind: RepresentationKind
    dimension: int = 1

    def __post_init__(self):
        kind = RepresentationKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (RepresentationKind.AFFINE, RepresentationKind.AFFINE_PLUS) and self.dimension != 1:
            raise RepresentationError(f"{kind.value} acts on functions of one variable.")
        if kind is RepresentationKind.SHEARLET and self.dimension != 2:
            raise RepresentationError("pi-shearlet acts on functions of two variables.")
        if self.dimension not in (1, 2):
            raise RepresentationError(f"Unsupported dimension {self.dimension}.")

    @classmethod
    def named(cls, name: str, dimension: int | None = None) -> RepresentationTag:
        try:
            kind = RepresentationKind(name)
        except ValueError:
            known = ", ".join(kind.value for kind in RepresentationKind)
            raise RepresentationError(f"Unknown representation {name!r}; expected one of {known}.") from None
        if dimension is None:
            dimension = 2 if kind is RepresentationKind.SHEARLET else 1
        return cls(kind, dimension)

    @property
    def group_kind(self) -> GroupKind:
        return _GROUPS[self.kind]

    @property
    def name(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Action:
    """``x -> factor(x) * f(pullback(x))``; ``push`` is the inverse point map."""

    pullback: Callable[..., tuple[np.ndarray, ...]]
    factor: Callable[..., np.ndarray | complex]
    push: Callable[..., tuple[np.ndarray, ...]]

    def __call__(self, func: Callable[..., np.ndarray]) -> Callable[..., np.ndarray]:
        return lambda *x: self.factor(*x) * func(*self.pullback(*x))


def _unit(*x) -> float:
    return 1.0


def _vector(y, dimension: int) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (dimension,):
        raise RepresentationError(f"Expected a vector of length {dimension}, got shape {y.shape}.")
    return y


def act(action: Action, f: SampledFunction) -> tuple[SampledFunction, float]:
    """Apply ``action`` to ``f``; also returns the fraction of mass pushed out of the box."""
    grid = f.grid
    coords = grid.coordinates()
    source = action.pullback(*coords)
    factor = action.factor(*coords)
    samples = f.lookup(*source)
    profile = action(f.evaluate) if f.profile is not None else None
    values = np.broadcast_to(factor * samples, grid.shape)
    return SampledFunction(grid, values, profile), escaped_mass(action, f)


def escaped_mass(action: Action, f: SampledFunction) -> float:
    """Fraction of ``norm2(f)`` whose image lands outside the grid box."""
    weights = np.abs(f.values) ** 2
    total = float(np.sum(weights))
    if total == 0:
        return 0.0
    landed = action.push(*f.grid.coordinates())
    outside = ~f.grid.contains(*landed)
    return float(np.sum(weights[outside]) / total)


def translation(y, dimension: int = 1) -> Action:
    y = _vector(y, dimension)
    return Action(
        pullback=lambda *x: tuple(xi - yi for xi, yi in zip(x, y)),
        factor=_unit,
        push=lambda *x: tuple(xi + yi for xi, yi in zip(x, y)),
    )


def modulation(y, dimension: int = 1) -> Action:
    y = _vector(y, dimension)
    return Action(
        pullback=lambda *x: x,
        factor=lambda *x: np.exp(2j * np.pi * sum(yi * xi for xi, yi in zip(x, y))),
        push=lambda *x: x,
    )


def dilation(y: float, dimension: int = 1) -> Action:
    y = float(y)
    if y == 0:
        raise RepresentationError("Dilation by 0 is not defined.")
    scale = 1.0 / math.sqrt(abs(y)) ** dimension
    return Action(
        pullback=lambda *x: tuple(xi / y for xi in x),
        factor=lambda *x: scale,
        push=lambda *x: tuple(y * xi for xi in x),
    )


def translate(f: SampledFunction, y) -> SampledFunction:
    """T_y f(x) = f(x - y)."""
    return act(translation(y, f.grid.dimension), f)[0]


def modulate(f: SampledFunction, y) -> SampledFunction:
    """E_y f(x) = exp(2 pi i y.x) f(x)."""
    return act(modulation(y, f.grid.dimension), f)[0]


def dilate(f: SampledFunction, y: float) -> SampledFunction:
    """D_y f(x) = |y|^(-n/2) f(x / y)."""
    return act(dilation(y, f.grid.dimension), f)[0]


def action_for(rep: RepresentationTag, g: GroupElement) -> Action:
    """The operator rep(g) as a pullback and a factor."""
    if not isinstance(g, GroupElement) or g.kind is not rep.group_kind:
        raise RepresentationError(f"{rep.name} needs elements of the {rep.group_kind.value} group, got {g}.")

    if rep.kind is RepresentationKind.AFFINE:
        assert isinstance(g, AffineElement)
        a, b = g.a, g.b
        scale = 1.0 / math.sqrt(abs(a))
        return Action(
            pullback=lambda x: ((x - b) / a,),
            factor=lambda x: scale,
            push=lambda x: (a * x + b,),
        )

    if rep.kind is RepresentationKind.AFFINE_PLUS:
        assert isinstance(g, AffineElement)
        if g.a <= 0:
            raise RepresentationError(f"pi-plus is defined on a > 0 only, got a = {g.a}.")
        a, b = g.a, g.b
        scale = math.sqrt(a)
        return Action(
            pullback=lambda x: (a * x,),
            factor=lambda x: scale * np.exp(2j * np.pi * b * x),
            push=lambda x: (x / a,),
        )

    if rep.kind is RepresentationKind.SCHROEDINGER:
        assert isinstance(g, WeylHeisenbergElement)
        if g.n != rep.dimension:
            raise RepresentationError(f"schroedinger in dimension {rep.dimension} got an element with n = {g.n}.")
        a = np.asarray(g.a)
        b = np.asarray(g.b)
        phase = np.exp(2j * np.pi * g.t) * np.exp(-2j * np.pi * float(np.dot(a, b)))
        return Action(
            pullback=lambda *x: tuple(xi - bi for xi, bi in zip(x, b)),
            factor=lambda *x: phase * np.exp(2j * np.pi * sum(ai * xi for xi, ai in zip(x, a))),
            push=lambda *x: tuple(xi + bi for xi, bi in zip(x, b)),
        )

    assert isinstance(g, ShearletElement)
    forward = g.matrix()
    backward = g.inverse_matrix()
    t1, t2 = g.t
    scale = g.a ** -0.75

    def pullback(x1, x2):
        y1, y2 = x1 - t1, x2 - t2
        return (backward[0, 0] * y1 + backward[0, 1] * y2, backward[1, 1] * y2)

    def push(y1, y2):
        return (forward[0, 0] * y1 + forward[0, 1] * y2 + t1, forward[1, 1] * y2 + t2)

    return Action(pullback=pullback, factor=lambda x1, x2: scale, push=push)


def _check_compatible(rep: RepresentationTag, f: SampledFunction) -> None:
    if f.grid.dimension != rep.dimension:
        raise RepresentationError(
            f"{rep.name} acts in dimension {rep.dimension}, function lives in dimension {f.grid.dimension}."
        )
    if rep.kind is RepresentationKind.AFFINE_PLUS and f.grid.lower[0] < 0:
        raise RepresentationError("pi-plus acts on functions on the positive half-line; grid starts below 0.")


def apply_checked(rep: RepresentationTag, g: GroupElement, f: SampledFunction) -> tuple[SampledFunction, float]:
    """rep(g) f together with the fraction of mass that left the grid box."""
    _check_compatible(rep, f)
    result, escaped = act(action_for(rep, g), f)
    if escaped > ESCAPE_WARNING:
        logger.warning("%s(%s) pushed %.3g of the mass out of the grid box", rep.name, g, escaped)
    return result, escaped


def apply(rep: RepresentationTag, g: GroupElement, f: SampledFunction) -> SampledFunction:
    return apply_checked(rep, g, f)[0]


def pointwise(rep: RepresentationTag, g: GroupElement, func: Callable[..., np.ndarray]) -> Callable[..., np.ndarray]:
    """rep(g) applied to a closed form, evaluable at arbitrary points."""
    return action_for(rep, g)(func)


def homomorphism_check(rep: RepresentationTag, g: GroupElement, h: GroupElement, f: SampledFunction) -> float:
    """Relative defect of rep(gh) f against rep(g) rep(h) f."""
    norm = f.norm()
    if norm == 0:
        raise RepresentationError("The homomorphism check needs a nonzero function.")
    direct = apply(rep, multiply(g, h), f)
    composed = apply(rep, g, apply(rep, h, f))
    return (direct - composed).norm() / norm
