"""Uniform 1-D grid, trapezoid quadrature, and finite-difference derivatives.

Everything else in the package is built on the three primitives here:
``quadrature`` (composite trapezoid, exact for affine integrands),
``derivative`` and ``second_derivative`` (second-order central stencils
with one-sided second-order endpoint stencils).  The schemes are kept at
second order on purpose: their error is dominated by grid resolution,
which keeps every identity check interpretable.

Fields are immutable after construction and all operations are pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np


def _readonly(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform grid of n points on [xmin, xmax], endpoints included."""

    xmin: float
    xmax: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 points, got n={self.n}")
        if not self.xmax > self.xmin:
            raise ValueError(f"need xmax > xmin, got [{self.xmin}, {self.xmax}]")

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)

    def field(self, values) -> "ScalarField":
        return ScalarField(self, values)

    def from_function(self, f) -> "ScalarField":
        return ScalarField(self, f(self.x))

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros(self.n))


@dataclass(frozen=True)
class ScalarField:
    """Real function sampled on a uniform grid.

    The universal carrier for densities, phases, potentials, heat fields
    and every other pointwise quantity in the package.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.ndim != 1 or len(self.values) != self.grid.n:
            raise ValueError(
                f"field length {self.values.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)


def quadrature(f: ScalarField) -> float:
    """Composite trapezoid approximation of the integral of f over the grid."""
    return float(np.trapezoid(f.values, dx=f.grid.dx))


def quadrature_values(values: np.ndarray, dx: float) -> float:
    """Trapezoid rule on a bare array; array-level twin of ``quadrature``."""
    return float(np.trapezoid(values, dx=dx))


def derivative_values(values: np.ndarray, dx: float) -> np.ndarray:
    """Second-order first derivative: central interior, one-sided endpoints.

    Stencils are evaluated in difference form so a constant field has an
    exactly zero derivative.
    """
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        raise ValueError("derivative needs at least 3 points")
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) * (0.5 / dx)
    out[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) * (0.5 / dx)
    out[-1] = (4.0 * (v[-1] - v[-2]) - (v[-1] - v[-3])) * (0.5 / dx)
    return out


def second_derivative_values(values: np.ndarray, dx: float) -> np.ndarray:
    """Second-order second derivative; one-sided 4-point stencils at the ends."""
    v = np.asarray(values, dtype=float)
    if len(v) < 4:
        raise ValueError("second derivative needs at least 4 points")
    inv = 1.0 / (dx * dx)
    out = np.empty_like(v)
    out[1:-1] = ((v[2:] - v[1:-1]) - (v[1:-1] - v[:-2])) * inv
    out[0] = (-5.0 * (v[1] - v[0]) + 4.0 * (v[2] - v[0]) - (v[3] - v[0])) * inv
    out[-1] = (-5.0 * (v[-2] - v[-1]) + 4.0 * (v[-3] - v[-1]) - (v[-4] - v[-1])) * inv
    return out


def derivative(f: ScalarField) -> ScalarField:
    return f.with_values(derivative_values(f.values, f.grid.dx))


def second_derivative(f: ScalarField) -> ScalarField:
    return f.with_values(second_derivative_values(f.values, f.grid.dx))
