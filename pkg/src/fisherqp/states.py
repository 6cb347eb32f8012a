"""Probability densities, Madelung states, and physical constants.

Conventions fixed here and used everywhere else:

* Densities are normalized with the grid trapezoid rule and carry a
  support mask ``P > 1e-12 * max(P)``.  All quotients of the form
  grad(P)/P are evaluated on the mask only.
* The endpoint-decay (truncation) check stands in for compact support:
  endpoint values must stay below ``1e-12 * max(P)`` unless the caller
  disables the check explicitly.
* The phase S of a Madelung state is defined up to a global constant;
  standalone constructors pin S = 0 at the center of the support.
* The letter alpha is overloaded in the underlying formalism.  Here it is
  always split into ``alpha_norm`` (normalization multiplier of the
  Fisher extremization), ``alpha_th`` (= 1/(hbar*omega)), and
  ``alpha_gibbs`` (Gibbs-exponent multiplier), so units cannot be mixed
  up silently.
* rho = mass * P is never stored; the mass factor is applied at use
  sites so there is exactly one source of truth for normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .errors import NegativeDensity, NodeOnSupport, TruncationError, ZeroMass
from .grid import Grid, ScalarField, derivative_values, quadrature, quadrature_values

SUPPORT_FLOOR = 1e-12       # mask threshold, relative to max(P)
NEGATIVE_NOISE = -1e-14     # tolerated negative noise in raw samples


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar, mass, angular frequency, Boltzmann constant and temperature.

    Derived quantities: beta = 1/(k*T), alpha_th = 1/(hbar*omega) and the
    diffusivity D = hbar/(2*mass).  ``require_thermal_equality`` enforces
    hbar*omega = k*T (to 1e-12 relative), the condition under which the
    thermal and quantum unit systems coincide.
    """

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    boltzmann_k: float = 1.0
    temperature: float = 1.0
    require_thermal_equality: bool = False

    def __post_init__(self):
        for name in ("hbar", "mass", "omega", "boltzmann_k", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.require_thermal_equality and not self.is_thermal_equilibrium:
            raise ValueError(
                "thermal equality requested but hbar*omega != k*T "
                f"({self.hbar * self.omega} vs {self.boltzmann_k * self.temperature})"
            )

    @property
    def beta(self) -> float:
        return 1.0 / (self.boltzmann_k * self.temperature)

    @property
    def alpha_th(self) -> float:
        return 1.0 / (self.hbar * self.omega)

    @property
    def diffusivity(self) -> float:
        return self.hbar / (2.0 * self.mass)

    @property
    def is_thermal_equilibrium(self) -> bool:
        lhs = self.hbar * self.omega
        rhs = self.boltzmann_k * self.temperature
        return abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


@dataclass(frozen=True)
class Density:
    """Normalized nonnegative density with its support mask."""

    field: ScalarField
    support_mask: np.ndarray = field(repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        mask = np.asarray(self.support_mask, dtype=bool).copy()
        mask.setflags(write=False)
        object.__setattr__(self, "support_mask", mask)
        if len(mask) != self.field.grid.n:
            raise ValueError("support mask length does not match grid")

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def x(self) -> np.ndarray:
        return self.field.grid.x

    def grad_log(self) -> np.ndarray:
        """grad(P)/P on the support mask, 0 elsewhere."""
        p = self.values
        out = np.zeros_like(p)
        d = derivative_values(p, self.grid.dx)
        out[self.support_mask] = d[self.support_mask] / p[self.support_mask]
        return out

    def mass_check(self) -> float:
        return quadrature(self.field)


def _endpoint_decayed(values: np.ndarray) -> bool:
    peak = float(np.max(values))
    return max(values[0], values[-1]) <= SUPPORT_FLOOR * peak


def _build_density(values: np.ndarray, grid: Grid, truncation_check: bool) -> Density:
    total = quadrature_values(values, grid.dx)
    if total <= 0.0:
        raise ZeroMass(f"density integrates to {total}")
    p = values / total
    if truncation_check and not _endpoint_decayed(p):
        raise TruncationError(
            "density does not decay at the grid endpoints; enlarge the domain "
            "or disable the truncation check"
        )
    mask = p > SUPPORT_FLOOR * float(np.max(p))
    return Density(ScalarField(grid, p), mask)


def density_from_samples(raw: ScalarField, truncation_check: bool = True) -> Density:
    """Normalize nonnegative samples into a Density.

    Values in [-1e-14, 0) are treated as roundoff noise and clamped to 0;
    anything more negative raises NegativeDensity.
    """
    v = np.array(raw.values, dtype=float)
    if np.any(v < NEGATIVE_NOISE):
        raise NegativeDensity(f"min sample {v.min()} below noise floor")
    np.clip(v, 0.0, None, out=v)
    return _build_density(v, raw.grid, truncation_check)


def gibbs_density(
    E: ScalarField, gamma: float, truncation_check: bool = True
) -> tuple[Density, float]:
    """Gibbs density P = exp(-gamma*E)/Z; returns (Density, Z).

    The exponent is shifted by min(E) internally to avoid overflow; Z is
    reported in the original gauge.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    e = E.values
    shift = float(np.min(gamma * e))
    w = np.exp(-(gamma * e - shift))
    z_shifted = quadrature_values(w, E.grid.dx)
    density = _build_density(w, E.grid, truncation_check)
    z = z_shifted * np.exp(-shift)
    return density, float(z)


def density_from_heat(
    heat: ScalarField, alpha_th: float, truncation_check: bool = True
) -> tuple[Density, float]:
    """Density induced by a heat field: P = c_hat * exp(-alpha_th * Q_heat).

    Returns (Density, c_hat) with c_hat fixed by normalization.
    """
    density, z = gibbs_density(heat, alpha_th, truncation_check)
    return density, 1.0 / z


def madelung_from_wavefunction(
    re: ScalarField,
    im: ScalarField,
    constants: PhysicalConstants,
    truncation_check: bool = True,
) -> "MadelungState":
    """Split complex wavefunction samples into density and phase.

    P = |psi|^2 normalized; S = hbar * unwrapped arg(psi) on the support,
    pinned to S = 0 at the center of the support and extended constantly
    off it.  A below-floor dip strictly inside the support is a node and
    raises NodeOnSupport.
    """
    if re.grid != im.grid:
        raise ValueError("real and imaginary parts must share a grid")
    psi = re.values + 1j * im.values
    density = density_from_samples(
        ScalarField(re.grid, np.abs(psi) ** 2), truncation_check
    )
    mask = density.support_mask
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise ZeroMass("empty support")
    if not np.all(mask[idx[0] : idx[-1] + 1]):
        raise NodeOnSupport("|psi|^2 dips below the support floor inside the support")

    phase = np.unwrap(np.angle(psi[mask]))
    anchor = (idx[-1] - idx[0]) // 2  # center of the (contiguous) support
    phase -= phase[anchor]
    s = np.empty(re.grid.n)
    s[mask] = constants.hbar * phase
    s[: idx[0]] = s[idx[0]]
    s[idx[-1] + 1 :] = s[idx[-1]]
    return MadelungState(density, ScalarField(re.grid, s), constants)


@dataclass(frozen=True)
class MadelungState:
    """Amplitude/phase representation psi = sqrt(P) * exp(i S / hbar)."""

    density: Density
    phase: ScalarField
    constants: PhysicalConstants

    def __post_init__(self):
        if self.phase.grid != self.density.grid:
            raise ValueError("phase and density must share a grid")

    @property
    def grid(self) -> Grid:
        return self.density.grid

    def wavefunction(self) -> np.ndarray:
        return np.sqrt(self.density.values) * np.exp(
            1j * self.phase.values / self.constants.hbar
        )

    def momentum_field(self) -> np.ndarray:
        """p = grad(S), finite on the support."""
        return derivative_values(self.phase.values, self.grid.dx)
