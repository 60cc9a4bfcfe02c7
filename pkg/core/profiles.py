"""Closed-form test functions.

Each factory returns a profile: a callable taking one coordinate array per
axis. Profiles are attached to sampled functions so that the operators in
:mod:`core.representations` can re-evaluate them exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable

import numpy as np

from .exceptions import LiteralSyntaxError
from .numerics import Profile

SQRT_TWO_PI = np.sqrt(2 * np.pi)


def gaussian(center: float = 0.0, width: float = 1.0) -> Profile:
    """exp(-pi ((x - center) / width)^2)."""
    return lambda x: np.exp(-np.pi * ((x - center) / width) ** 2)


def normalized_gaussian() -> Profile:
    """2^(1/4) exp(-pi x^2), unit L2 norm."""
    return lambda x: 2 ** 0.25 * np.exp(-np.pi * x ** 2)


def odd_gaussian() -> Profile:
    """sqrt(2 pi) x exp(-pi x^2); its Calderon constant is exactly 1."""
    return lambda x: SQRT_TWO_PI * x * np.exp(-np.pi * x ** 2)


def odd_gaussian_transform() -> Profile:
    return lambda xi: -1j * SQRT_TWO_PI * xi * np.exp(-np.pi * xi ** 2)


def half_line_wavelet() -> Profile:
    """xi exp(-pi xi^2) on the positive half-line, zero elsewhere."""
    return lambda xi: np.where(xi > 0, xi * np.exp(-np.pi * xi ** 2), 0.0)


def indicator(lower: float = 0.0, upper: float = 1.0) -> Profile:
    """Indicator of the half-open interval [lower, upper)."""
    return lambda x: ((x >= lower) & (x < upper)).astype(float)


def indicator_transform(lower: float = 0.0, upper: float = 1.0) -> Profile:
    """Fourier transform of :func:`indicator` with kernel exp(-2 pi i xi x)."""
    length = upper - lower
    middle = (upper + lower) / 2
    return lambda xi: length * np.exp(-2j * np.pi * xi * middle) * np.sinc(length * xi)


def hat(lower: float = 0.0, upper: float = 2.0) -> Profile:
    """Piecewise linear B-spline peaking at the midpoint with value 1."""
    middle = (upper + lower) / 2
    half = (upper - lower) / 2
    return lambda x: np.clip(1.0 - np.abs(x - middle) / half, 0.0, None)


def bump() -> Profile:
    """x exp(-1 / (1 - x^2)) on (-1, 1): smooth, compactly supported, zero mean."""

    def profile(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 1
        safe = np.where(inside, x, 0.0)
        return np.where(inside, safe * np.exp(-1.0 / (1.0 - safe ** 2)), 0.0)

    return profile


def constant(value: complex = 1.0) -> Profile:
    return lambda *x: np.full(np.broadcast(*x).shape, value, dtype=complex)


def gaussian_2d(center: tuple[float, float] = (0.0, 0.0), width: float = 1.0) -> Profile:
    c1, c2 = center
    return lambda x1, x2: np.exp(-np.pi * (((x1 - c1) / width) ** 2 + ((x2 - c2) / width) ** 2))


PROFILES: dict[str, Callable[..., Profile]] = {
    "gaussian": gaussian,
    "normalized-gaussian": normalized_gaussian,
    "odd-gaussian": odd_gaussian,
    "odd-gaussian-transform": odd_gaussian_transform,
    "half-line-wavelet": half_line_wavelet,
    "indicator": indicator,
    "indicator-transform": indicator_transform,
    "hat": hat,
    "bump": bump,
    "constant": constant,
    "gaussian-2d": gaussian_2d,
}

_CALL = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\((.*)\))?\s*$")


def parse_profile(text: str, *, source: str = "<string>", line: int = 0) -> Profile:
    """Build a profile from ``name`` or ``name(arg, ...)`` with real arguments."""
    match = _CALL.match(text)
    if not match or match.group(1) not in PROFILES:
        known = ", ".join(sorted(PROFILES))
        raise LiteralSyntaxError(f"Unknown profile {text.strip()!r}; expected one of {known}.", source=source, line=line)
    name, arguments = match.groups()
    values = []
    if arguments and arguments.strip():
        for position, token in enumerate(arguments.split(",")):
            try:
                values.append(float(Fraction(token.strip())))
            except (ValueError, ZeroDivisionError):
                raise LiteralSyntaxError(
                    f"Argument {position + 1} of {name} is not a real number: {token.strip()!r}.",
                    source=source,
                    line=line,
                ) from None
    factory = PROFILES[name]
    if name == "gaussian-2d" and values:
        return factory(tuple(values[:2]), *values[2:])
    try:
        return factory(*values)
    except TypeError:
        raise LiteralSyntaxError(f"Wrong number of arguments for {name}.", source=source, line=line) from None
