"""Grids, sampled functions, quadrature rules and the Fourier transform.

Every function here is pure: grids and sampled functions are immutable
after construction and may be shared freely between threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import roots_legendre

from .exceptions import GridError, GridMismatchError

logger = logging.getLogger(__name__)

# A closed form on R^n: takes one coordinate array per axis (broadcastable)
# and returns the values at those points.
Profile = Callable[..., np.ndarray]

# Index-space tolerance for recognising that a pulled-back point is a node.
NODE_TOLERANCE = 1e-9

# Relative size of an imaginary part that integrate_haar still treats as rounding.
IMAGINARY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform midpoint grid over a box in R^1 or R^2."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(value) for value in np.atleast_1d(self.lower))
        upper = tuple(float(value) for value in np.atleast_1d(self.upper))
        points = tuple(int(value) for value in np.atleast_1d(self.points))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "points", points)

        if not (len(lower) == len(upper) == len(points)):
            raise GridError("lower, upper and points must have one entry per axis.")
        if len(points) not in (1, 2):
            raise GridError(f"Only one- and two-dimensional grids are supported, got {len(points)}.")
        for axis, (lo, hi, count) in enumerate(zip(lower, upper, points)):
            if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
                raise GridError(f"Axis {axis}: lower bound {lo} must be below upper bound {hi}.")
            if count < 1:
                raise GridError(f"Axis {axis}: points per axis must be positive, got {count}.")

    @classmethod
    def line(cls, lower: float, upper: float, points: int) -> Grid:
        return cls((lower,), (upper,), (points,))

    @classmethod
    def square(cls, lower: float, upper: float, points: int) -> Grid:
        return cls((lower, lower), (upper, upper), (points, points))

    @property
    def dimension(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(length / count for length, count in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, index: int) -> np.ndarray:
        """Midpoint sample locations along one axis."""
        step = self.spacing[index]
        return self.lower[index] + (np.arange(self.points[index]) + 0.5) * step

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(self.axis(index) for index in range(self.dimension))

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """One coordinate array per axis, each shaped like the grid."""
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def contains(self, *coords: np.ndarray) -> np.ndarray:
        """Boolean mask of the points lying inside the half-open box."""
        inside = np.ones(np.broadcast(*coords).shape, dtype=bool)
        for lo, hi, values in zip(self.lower, self.upper, coords):
            inside &= (values >= lo) & (values < hi)
        return inside

    def fractional_index(self, axis: int, values: np.ndarray) -> np.ndarray:
        """Position of ``values`` measured in node indices along ``axis``."""
        return (np.asarray(values, dtype=float) - self.lower[axis]) / self.spacing[axis] - 0.5

    def frequency_grid(self) -> Grid:
        """Grid carrying the samples returned by :func:`fourier_transform`."""
        lower, upper = [], []
        for length, count in zip(self.lengths, self.points):
            frequencies = np.fft.fftshift(np.fft.fftfreq(count, d=length / count))
            step = 1.0 / length
            lower.append(frequencies[0] - step / 2)
            upper.append(frequencies[-1] + step / 2)
        return Grid(tuple(lower), tuple(upper), self.points)

    def describe(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "points": list(self.points)}


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function on a :class:`Grid`.

    ``profile`` optionally carries the closed form the samples came from.
    Operators re-evaluate it at transformed points instead of
    interpolating the samples. Either way the function is an element of
    L2 of the box: points outside the box read as zero.
    """

    grid: Grid
    values: np.ndarray
    profile: Profile | None = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.size != self.grid.size:
            raise GridError(
                f"Expected {self.grid.size} samples for grid {self.grid.points}, got {values.size}."
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise GridError("Sampled values must be finite.")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_profile(cls, grid: Grid, profile: Profile) -> SampledFunction:
        values = np.broadcast_to(profile(*grid.coordinates()), grid.shape)
        return cls(grid, values, profile)

    @classmethod
    def zeros(cls, grid: Grid) -> SampledFunction:
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume)

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def without_profile(self) -> SampledFunction:
        return SampledFunction(self.grid, self.values)

    def evaluate(self, *coords: np.ndarray) -> np.ndarray:
        """Values at arbitrary points, zero outside the grid box.

        The profile is used if known, else the samples are interpolated.
        """
        if self.profile is not None:
            shape = np.broadcast(*coords).shape
            values = np.broadcast_to(np.asarray(self.profile(*coords), dtype=complex), shape)
            return np.where(self.grid.contains(*coords), values, 0)
        return self.interpolate(*coords)

    def lookup(self, *coords: np.ndarray) -> np.ndarray:
        """Like :meth:`evaluate`, but reads samples directly at grid nodes."""
        if self.profile is not None:
            return self.evaluate(*coords)
        samples = self.gather(*coords)
        return samples if samples is not None else self.interpolate(*coords)

    def interpolate(self, *coords: np.ndarray) -> np.ndarray:
        """Linear interpolation of the samples; zero outside the node range."""
        if len(coords) != self.grid.dimension:
            raise GridError(f"Expected {self.grid.dimension} coordinate arrays, got {len(coords)}.")
        broadcast = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
        shape = broadcast[0].shape
        points = np.stack([c.ravel() for c in broadcast], axis=-1)
        axes = self.grid.axes()
        result = np.zeros(points.shape[0], dtype=complex)
        if min(self.grid.points) < 2:
            return result.reshape(shape)
        for part, scale in ((self.values.real, 1.0), (self.values.imag, 1j)):
            if not np.any(part):
                continue
            interpolator = RegularGridInterpolator(
                axes, part, method="linear", bounds_error=False, fill_value=0.0
            )
            result = result + scale * interpolator(points)
        return result.reshape(shape)

    def gather(self, *coords: np.ndarray) -> np.ndarray | None:
        """Exact sample lookup when every point is a grid node, else ``None``.

        Points that are nodes of the infinite lattice but fall outside the
        grid read as zero.
        """
        indices = []
        for axis, values in enumerate(coords):
            position = self.grid.fractional_index(axis, values)
            nearest = np.rint(position)
            if np.any(np.abs(position - nearest) > NODE_TOLERANCE):
                return None
            indices.append(nearest.astype(np.int64))
        indices = np.broadcast_arrays(*indices)
        inside = np.ones(indices[0].shape, dtype=bool)
        for axis, index in enumerate(indices):
            inside &= (index >= 0) & (index < self.grid.points[axis])
        result = np.zeros(indices[0].shape, dtype=complex)
        picked = tuple(index[inside] for index in indices)
        result[inside] = self.values[picked]
        return result

    def _combine(self, other: SampledFunction, sign: float) -> SampledFunction:
        if not isinstance(other, SampledFunction):
            return NotImplemented
        _require_same_grid(self, other)
        profile = None
        if self.profile is not None and other.profile is not None:
            left, right = self.profile, other.profile
            profile = lambda *x: left(*x) + sign * right(*x)  # noqa: E731
        return SampledFunction(self.grid, self.values + sign * other.values, profile)

    def __add__(self, other: SampledFunction) -> SampledFunction:
        return self._combine(other, 1.0)

    def __sub__(self, other: SampledFunction) -> SampledFunction:
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> SampledFunction:
        if not np.isscalar(scalar):
            return NotImplemented
        profile = None
        if self.profile is not None:
            base = self.profile
            profile = lambda *x: scalar * base(*x)  # noqa: E731
        return SampledFunction(self.grid, scalar * self.values, profile)

    __rmul__ = __mul__

    def __neg__(self) -> SampledFunction:
        return self * -1.0


def _require_same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(
            f"Functions live on different grids: {f.grid.describe()} and {g.grid.describe()}."
        )


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Midpoint-rule inner product, conjugate-linear in the second slot."""
    _require_same_grid(f, g)
    return complex(np.vdot(g.values, f.values) * f.grid.cell_volume)


def fourier_transform(f: SampledFunction) -> SampledFunction:
    """Samples of the transform with kernel exp(-2 pi i xi x).

    The frequency grid has spacing 1 / (box length) per axis. The discrete
    transform is phase-corrected for the box offset and the half-cell shift
    of the midpoint convention, so for functions supported well inside the
    box the samples agree with the defining integral. Parseval holds
    exactly at grid scale.
    """
    grid = f.grid
    spectrum = np.fft.fftshift(np.fft.fftn(f.values), axes=tuple(range(grid.dimension)))
    frequency_grid = grid.frequency_grid()
    phase = np.ones(grid.shape, dtype=complex)
    for axis, (lo, step) in enumerate(zip(grid.lower, grid.spacing)):
        frequencies = np.fft.fftshift(np.fft.fftfreq(grid.points[axis], d=step))
        shape = [1] * grid.dimension
        shape[axis] = grid.points[axis]
        phase = phase * np.exp(-2j * np.pi * frequencies * (lo + step / 2)).reshape(shape)
    return SampledFunction(frequency_grid, grid.cell_volume * phase * spectrum)


def fourier_at(f: SampledFunction, xi: np.ndarray, *, chunk: int = 2048) -> np.ndarray:
    """Direct midpoint quadrature of the defining integral at given frequencies.

    One-dimensional only; used where the transform is needed off the
    frequency grid, and as the oracle for :func:`fourier_transform`.
    """
    if f.grid.dimension != 1:
        raise GridError("fourier_at evaluates one-dimensional transforms only.")
    xi = np.asarray(xi, dtype=float)
    flat = xi.ravel()
    x = f.grid.axis(0)
    result = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, chunk):
        block = flat[start:start + chunk]
        kernel = np.exp(-2j * np.pi * np.multiply.outer(block, x))
        result[start:start + chunk] = kernel @ f.values * f.grid.cell_volume
    return result.reshape(xi.shape)


class QuadratureKind(str, Enum):
    MIDPOINT = "midpoint"
    GAUSS_LEGENDRE = "gauss-legendre-composite"


@dataclass(frozen=True)
class QuadratureRule:
    """Composite rule: ``panels`` equal panels with ``nodes_per_panel`` nodes each."""

    kind: QuadratureKind = QuadratureKind.MIDPOINT
    panels: int = 1
    nodes_per_panel: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", QuadratureKind(self.kind))
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise GridError(
                f"Quadrature needs at least one node, got {self.panels} panels "
                f"x {self.nodes_per_panel} nodes."
            )

    @property
    def node_count(self) -> int:
        return self.panels * self.nodes_per_panel

    def _reference(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [-1, 1]."""
        if self.kind is QuadratureKind.GAUSS_LEGENDRE:
            nodes, weights = roots_legendre(self.nodes_per_panel)
            return np.asarray(nodes), np.asarray(weights)
        count = self.nodes_per_panel
        nodes = -1.0 + (2.0 * np.arange(count) + 1.0) / count
        return nodes, np.full(count, 2.0 / count)

    def nodes(
        self, lower: float, upper: float, breakpoints: Sequence[float] = ()
    ) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [lower, upper].

        Interior ``breakpoints`` become panel edges; the panel count is
        shared between the pieces in proportion to their length.
        """
        if not lower < upper:
            raise GridError(f"Empty integration interval [{lower}, {upper}].")
        edges = [lower] + sorted(p for p in breakpoints if lower < p < upper) + [upper]
        reference_nodes, reference_weights = self._reference()
        all_nodes, all_weights = [], []
        total = upper - lower
        for left, right in zip(edges[:-1], edges[1:]):
            panels = max(1, int(round(self.panels * (right - left) / total)))
            panel_edges = np.linspace(left, right, panels + 1)
            centers = (panel_edges[:-1] + panel_edges[1:]) / 2
            halves = (panel_edges[1:] - panel_edges[:-1]) / 2
            all_nodes.append((centers[:, None] + halves[:, None] * reference_nodes[None, :]).ravel())
            all_weights.append((halves[:, None] * reference_weights[None, :]).ravel())
        return np.concatenate(all_nodes), np.concatenate(all_weights)

    def describe(self) -> dict:
        return {"kind": self.kind.value, "panels": self.panels, "nodes_per_panel": self.nodes_per_panel}


@dataclass(frozen=True)
class ParameterAxis:
    """One truncated axis of a group-parameter box.

    Multiplicative axes (``log_scale``) are discretised uniformly in log
    space; ``reflect`` mirrors the nodes to the negative half-line, giving
    both components of the non-zero reals.
    """

    name: str
    lower: float
    upper: float
    rule: QuadratureRule = QuadratureRule()
    log_scale: bool = False
    reflect: bool = False

    def __post_init__(self):
        if not self.lower < self.upper:
            raise GridError(f"Axis {self.name}: empty range [{self.lower}, {self.upper}].")
        if (self.log_scale or self.reflect) and self.lower <= 0:
            raise GridError(f"Axis {self.name}: multiplicative axes need a positive lower bound.")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.log_scale:
            logs, weights = self.rule.nodes(np.log(self.lower), np.log(self.upper))
            nodes = np.exp(logs)
            weights = weights * nodes
        else:
            nodes, weights = self.rule.nodes(self.lower, self.upper)
        if self.reflect:
            nodes = np.concatenate([-nodes[::-1], nodes])
            weights = np.concatenate([weights[::-1], weights])
        return nodes, weights

    @property
    def size(self) -> int:
        return self.rule.node_count * (2 if self.reflect else 1)

    def scaled(self, factor: float) -> ParameterAxis:
        """Same axis with the truncation enlarged by ``factor`` at both ends."""
        if self.log_scale:
            lower, upper = self.lower / factor, self.upper * factor
            growth = np.log(upper / lower) / np.log(self.upper / self.lower)
        else:
            lower, upper = self.lower * factor, self.upper * factor
            growth = factor
        panels = int(round(self.rule.panels * growth))
        rule = QuadratureRule(self.rule.kind, panels, self.rule.nodes_per_panel)
        return ParameterAxis(self.name, lower, upper, rule, self.log_scale, self.reflect)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "lower": self.lower,
            "upper": self.upper,
            "log_scale": self.log_scale,
            "reflect": self.reflect,
            "rule": self.rule.describe(),
        }


@dataclass(frozen=True)
class ParameterBox:
    """Tensor-product quadrature over a truncated group-parameter box."""

    axes: tuple[ParameterAxis, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise GridError("A parameter box needs at least one axis.")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.size for axis in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*[axis.nodes()[0] for axis in self.axes], indexing="ij"))

    def weights(self) -> np.ndarray:
        total = np.ones(())
        for axis in self.axes:
            total = np.multiply.outer(total, axis.nodes()[1])
        return total

    def scaled(self, factor: float) -> ParameterBox:
        return ParameterBox(tuple(axis.scaled(factor) for axis in self.axes))

    def describe(self) -> dict:
        return {"axes": [axis.describe() for axis in self.axes]}


def integrate_haar(
    values: np.ndarray, box: ParameterBox, density: Callable[..., np.ndarray]
) -> float:
    """Quadrature of ``values * density`` over ``box``.

    ``values`` holds the integrand at the box nodes (shape ``box.shape``);
    ``density`` is evaluated at the node mesh and must be finite there.
    The integral must come out real: an imaginary part above
    ``IMAGINARY_TOLERANCE`` of its modulus raises :class:`GridError`.
    """
    values = np.asarray(values)
    if values.shape != box.shape:
        raise GridError(f"Integrand shape {values.shape} does not match box shape {box.shape}.")
    mesh = box.mesh()
    weights = np.broadcast_to(np.asarray(density(*mesh), dtype=float), box.shape)
    if not np.all(np.isfinite(weights)):
        raise GridError("Haar density is not finite at every node; keep a = 0 out of the box.")
    total = complex(np.sum(values * weights * box.weights()))
    logger.debug("Haar quadrature over %d nodes", box.size)
    if abs(total.imag) > IMAGINARY_TOLERANCE * max(abs(total), 1.0):
        raise GridError(f"Haar integral is not real: {total}; integrate real and imaginary parts separately.")
    return total.real
