"""Subquantum heat dynamics: the heat field coupled to a density, Fick
diffusion, the classical heat equation, the thermalized quantum
potential, thermal Fisher information, and the coherence suite tying the
thermal and Gibbs pictures together.

Conventions
-----------
* The coupling between a density and its heat field is
  P = c_hat * exp(-alpha_th * Q_heat) with alpha_th = 1/(hbar*omega);
  under thermal equality hbar*omega = k*T this is the Gibbs form with
  beta = 1/kT.  ``heat_from_density`` pins the gauge Q_heat = 0 at the
  support center.
* Where an identity is exact algebra under the coupling (thermal Fisher
  route B, the kinetic-excess identity), the heat-field gradient is
  evaluated through the coupled density, grad(Q) = -(1/alpha) grad(P)/P,
  which realizes the identity discretely instead of burying it under
  stencil noise.  The raw field-gradient route is reported where the
  distinction matters.
* c_hat is a per-time normalization constant, refit at every step of a
  coupled evolution; the chain identity dP/dt = -(P/hbar omega) dQ/dt is
  checked on the ratio-law density (c_hat frozen at t=0), since refitting
  is exactly the freedom that identity does not have.
* Heat evolution holds the endpoint values of the initial field fixed
  (quadratic heat fields legitimately grow uniformly in the interior, so
  a change-based wall guard would misfire; the guard watches curvature
  arriving at the walls instead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import BoundaryContact, DecoupledInputs
from .functionals import fisher_information, fluctuation_report, quantum_potential, weighted_max_dev
from .grid import (
    Grid,
    ScalarField,
    derivative_values,
    quadrature_values,
    second_derivative_values,
)
from .states import (
    Density,
    PhysicalConstants,
    density_from_heat,
    density_from_samples,
    gibbs_density,
)

FICK_BOUNDARY_THRESHOLD = 1e-10  # relative density at first interior points
COUPLING_TOL = 1e-6              # allowed weighted deviation of P from c*exp(-aQ)


@dataclass(frozen=True)
class HeatField:
    """Heat field Q_heat (energy units) with its constants.

    The dimensionless variant Q_tilde = alpha_th * Q_heat is derived on
    demand rather than stored.
    """

    Q_heat: ScalarField
    constants: PhysicalConstants

    @property
    def grid(self) -> Grid:
        return self.Q_heat.grid

    def q_tilde(self) -> ScalarField:
        return ScalarField(self.grid, self.constants.alpha_th * self.Q_heat.values)


@dataclass(frozen=True)
class HeatTrajectory:
    """Heat field snapshots at uniform time steps."""

    times: np.ndarray
    fields: list[HeatField]
    diffusivity: float

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.fields)


def heat_from_density(density: Density, constants: PhysicalConstants) -> HeatField:
    """Invert the coupling: Q_heat = -(1/alpha_th) log(P/c_hat).

    The gauge is pinned by Q_heat = 0 at the support center.  Off the
    support the field continues linearly with the edge slope, so the
    induced density keeps decaying there and the reconstruction
    ``density_from_heat`` round-trips.
    """
    p = density.values
    mask = density.support_mask
    x = density.grid.x
    dx = density.grid.dx
    idx = np.flatnonzero(mask)
    center = idx[0] + (idx[-1] - idx[0]) // 2
    if not mask[center]:
        center = idx[np.argmax(p[idx])]
    q = np.empty_like(p)
    block = slice(idx[0], idx[-1] + 1)
    q[block] = -(np.log(np.maximum(p[block], 1e-300)) - math.log(p[center])) / (
        constants.alpha_th
    )
    slopes = derivative_values(q[block], dx)
    q[: idx[0]] = q[idx[0]] + slopes[0] * (x[: idx[0]] - x[idx[0]])
    q[idx[-1] + 1 :] = q[idx[-1]] + slopes[-1] * (x[idx[-1] + 1 :] - x[idx[-1]])
    return HeatField(ScalarField(density.grid, q), constants)


def delta_s_from_heat(hf: HeatField) -> ScalarField:
    """Action fluctuation delta_S = Q_heat / (2 omega)."""
    return ScalarField(hf.grid, hf.Q_heat.values / (2.0 * hf.constants.omega))


def coupled_grad_heat(density: Density, constants: PhysicalConstants) -> np.ndarray:
    """grad(Q_heat) evaluated through the coupled density:
    -(1/alpha_th) grad(P)/P on the support, 0 elsewhere."""
    return -density.grad_log() / constants.alpha_th


def coupling_deviation(
    density: Density, hf: HeatField, constants: PhysicalConstants
) -> float:
    """Weighted max deviation of P from c_hat * exp(-alpha_th Q_heat)."""
    q = hf.Q_heat.values
    w = np.exp(-constants.alpha_th * (q - np.min(q)))
    w /= quadrature_values(w, hf.grid.dx)
    return weighted_max_dev(density.values, w, density) / float(np.max(density.values))


def require_coupling(
    density: Density, hf: HeatField, constants: PhysicalConstants
) -> None:
    dev = coupling_deviation(density, hf, constants)
    if dev > COUPLING_TOL:
        raise DecoupledInputs(
            f"density/heat pair violates P = c*exp(-alpha*Q) by {dev:.3e}"
        )


# ---------------------------------------------------------------------------
# diffusion steppers
# ---------------------------------------------------------------------------


def _cn_step_matrixfree(u: np.ndarray, c: float) -> np.ndarray:
    """One Crank-Nicolson heat step with endpoint values held fixed.

    c = D*dt/(2*dx^2).  Solves (1+2c) u+ - c (u+_l + u+_r) = rhs on the
    interior with the fixed ends folded into the right-hand side.
    """
    n = len(u)
    rhs = (1.0 - 2.0 * c) * u[1:-1] + c * (u[2:] + u[:-2])
    rhs[0] += c * u[0]
    rhs[-1] += c * u[-1]
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :-1] = -c
    out = u.copy()
    out[1:-1] = solve_banded((1, 1), ab, rhs)
    return out


def _explicit_step(u: np.ndarray, nu: float) -> np.ndarray:
    out = u.copy()
    out[1:-1] = u[1:-1] + nu * (u[2:] - 2.0 * u[1:-1] + u[:-2])
    return out


def _diffuse(values: np.ndarray, dx: float, D: float, t_final: float, dt: float,
             scheme: str) -> list[np.ndarray]:
    if dt <= 0 or t_final <= 0:
        raise ValueError("t_final and dt must be positive")
    steps = int(round(t_final / dt))
    if abs(steps * dt - t_final) > 1e-9 * t_final:
        raise ValueError("t_final must be an integer multiple of dt")
    nu = D * dt / (dx * dx)
    if scheme == "explicit":
        if nu > 0.45:
            raise ValueError(f"explicit scheme unstable: D*dt/dx^2 = {nu:.3f} > 0.45")
        step = lambda u: _explicit_step(u, nu)
    elif scheme == "implicit":
        step = lambda u: _cn_step_matrixfree(u, 0.5 * nu)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    out = [values.copy()]
    u = values.copy()
    for _ in range(steps):
        u = step(u)
        out.append(u.copy())
    return out


@dataclass(frozen=True)
class FickTrajectory:
    """Densities under Fick diffusion, with the raw mass drift per step."""

    times: np.ndarray
    densities: list[Density]
    diffusivity: float
    mass_drift: float


def fick_diffuse(
    P0: Density, D: float, t_final: float, dt: float, scheme: str = "implicit"
) -> FickTrajectory:
    """Evolve a density under dP/dt = D d2P/dx2.

    Endpoint values are held at their (decayed) initial values; the run
    aborts with BoundaryContact once a first-interior value exceeds
    1e-10 of the current peak.
    """
    snapshots = _diffuse(
        np.array(P0.values), P0.grid.dx, D, t_final, dt, scheme
    )
    densities = []
    drift = 0.0
    for arr in snapshots:
        peak = float(np.max(arr))
        if max(arr[1], arr[-2]) > FICK_BOUNDARY_THRESHOLD * peak:
            raise BoundaryContact("diffusing density reached the wall")
        drift = max(drift, abs(quadrature_values(arr, P0.grid.dx) - 1.0))
        densities.append(
            density_from_samples(ScalarField(P0.grid, arr), truncation_check=False)
        )
    steps = len(snapshots) - 1
    times = np.arange(steps + 1) * dt
    return FickTrajectory(times=times, densities=densities, diffusivity=D,
                          mass_drift=drift)


def heat_equation_evolve(
    hf0: HeatField, t_final: float, dt: float, scheme: str = "implicit"
) -> HeatTrajectory:
    """Evolve a heat field under the classical heat equation
    d2Q/dx2 - (1/D) dQ/dt = 0 with D = hbar/2m.

    The wall guard fires when curvature at the first interior points
    grows well beyond its initial value (a spreading bump arriving at the
    wall); uniform interior growth of quadratic fields is legitimate and
    does not trip it.
    """
    D = hf0.constants.diffusivity
    dx = hf0.grid.dx
    snapshots = _diffuse(np.array(hf0.Q_heat.values), dx, D, t_final, dt, scheme)

    lap0 = second_derivative_values(snapshots[0], dx)
    edge_scale = max(abs(lap0[1]), abs(lap0[-2]))
    interior_scale = float(np.max(np.abs(lap0)))
    # below this, curvature is indistinguishable from second-difference roundoff
    noise_floor = 1e-10 * max(1.0, float(np.max(np.abs(snapshots[0])))) / (dx * dx)
    fields = []
    for arr in snapshots:
        lap = second_derivative_values(arr, dx)
        edge = max(abs(lap[1]), abs(lap[-2]))
        if interior_scale > noise_floor and edge > max(
            10.0 * edge_scale, 1e-6 * interior_scale
        ):
            raise BoundaryContact("heat-field curvature reached the wall")
        fields.append(HeatField(ScalarField(hf0.grid, arr), hf0.constants))
    steps = len(snapshots) - 1
    times = np.arange(steps + 1) * dt
    return HeatTrajectory(times=times, fields=fields, diffusivity=D)


# ---------------------------------------------------------------------------
# pointwise thermal identities
# ---------------------------------------------------------------------------


def vanishing_qp_residual(hf: HeatField) -> ScalarField:
    """Residual field of the vanishing-quantum-potential condition

        d2Q/dx2 + (1/(2 hbar omega)) (dQ/dx)^2.

    Zero (to stencil error) exactly on the family
    Q = 2 hbar omega log(a + b x).
    """
    c = hf.constants
    q = hf.Q_heat.values
    dx = hf.grid.dx
    lap = second_derivative_values(q, dx)
    grad = derivative_values(q, dx)
    res = lap + grad**2 / (2.0 * c.hbar * c.omega)
    return ScalarField(hf.grid, res)


def thermalized_qp(
    source: HeatTrajectory | HeatField, index: int = 0,
    constants: PhysicalConstants | None = None,
) -> ScalarField:
    """Quantum potential expressed through heat flow:

        Q = (hbar^2/4m) [ d2Q_tilde/dx2 - (1/D) dQ_tilde/dt ].

    For a HeatField (static input) the time term is zero.  Along a
    heat-equation trajectory the two terms cancel and the result is zero
    up to discretization error: a freely dissipating heat flow carries no
    quantum potential.
    """
    if isinstance(source, HeatField):
        hf = source
        dqt_dt = np.zeros(hf.grid.n)
    else:
        if not 1 <= index <= len(source) - 2:
            raise ValueError("index must be interior to the trajectory")
        hf = source.fields[index]
        dt = source.dt
        after = source.fields[index + 1].q_tilde().values
        before = source.fields[index - 1].q_tilde().values
        dqt_dt = (after - before) / (2.0 * dt)
    c = constants or hf.constants
    qt = hf.q_tilde().values
    lap = second_derivative_values(qt, hf.grid.dx)
    out = (c.hbar**2 / (4.0 * c.mass)) * (lap - dqt_dt / c.diffusivity)
    return ScalarField(hf.grid, out)


# ---------------------------------------------------------------------------
# thermal Fisher information
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThermalFisherResult:
    """Both formal routes to Fisher information from heat data.

    route_b (beta^2 integral P (grad Q)^2) reproduces the direct Fisher
    information exactly under the coupling.  route_a
    (-2 alpha integral P [lap Q - (2m/hbar) dQ/dt]) does not: the two
    formal expressions disagree by more than a sign on static coupled
    pairs, so the ratio is reported and flagged instead of asserted.
    """

    route_b: float
    route_a: float
    fisher_direct: float
    ratio_a_over_b: float


def thermal_fisher(
    density: Density,
    hf: HeatField,
    constants: PhysicalConstants,
    route: str = "B",
    dQ_dt: ScalarField | None = None,
) -> float:
    """Single-route thermal Fisher information (see ThermalFisherResult)."""
    report = thermal_fisher_report(density, hf, constants, dQ_dt)
    if route.upper() == "B":
        return report.route_b
    if route.upper() == "A":
        return report.route_a
    raise ValueError(f"unknown route {route!r}")


def thermal_fisher_report(
    density: Density,
    hf: HeatField,
    constants: PhysicalConstants,
    dQ_dt: ScalarField | None = None,
) -> ThermalFisherResult:
    require_coupling(density, hf, constants)
    p = density.values
    mask = density.support_mask
    dx = density.grid.dx
    beta = constants.beta
    alpha = constants.alpha_th

    grad_q = coupled_grad_heat(density, constants)
    route_b = beta**2 * quadrature_values(
        np.where(mask, p * grad_q**2, 0.0), dx
    )

    lap_q = second_derivative_values(hf.Q_heat.values, dx)
    dqdt = dQ_dt.values if dQ_dt is not None else np.zeros_like(p)
    integrand = p * (lap_q - (2.0 * constants.mass / constants.hbar) * dqdt)
    route_a = -2.0 * alpha * quadrature_values(np.where(mask, integrand, 0.0), dx)

    fisher = fisher_information(density)
    ratio = route_a / route_b if route_b != 0.0 else math.inf
    return ThermalFisherResult(
        route_b=route_b, route_a=route_a, fisher_direct=fisher,
        ratio_a_over_b=ratio,
    )


# ---------------------------------------------------------------------------
# chain identity and coupled-evolution consistency
# ---------------------------------------------------------------------------


def heat_chain_residual(traj: HeatTrajectory, index: int) -> float:
    """Residual of dP/dt = -(P/hbar omega) dQ/dt on the ratio-law density.

    P(t) = c_hat(0) exp(-alpha Q(t)) with the normalization frozen at
    t = 0; centered time differences on both sides.
    """
    if not 1 <= index <= len(traj) - 2:
        raise ValueError("index must be interior to the trajectory")
    c = traj.fields[0].constants
    dt = traj.dt
    q0 = traj.fields[0].Q_heat.values
    w0 = np.exp(-c.alpha_th * (q0 - np.min(q0)))
    chat = 1.0 / quadrature_values(w0, traj.fields[0].grid.dx)
    shift = np.min(q0)

    def ratio_law(k: int) -> np.ndarray:
        q = traj.fields[k].Q_heat.values
        return chat * np.exp(-c.alpha_th * (q - shift))

    p_before, p_now, p_after = (ratio_law(index + k) for k in (-1, 0, 1))
    dpdt = (p_after - p_before) / (2.0 * dt)
    q_before = traj.fields[index - 1].Q_heat.values
    q_after = traj.fields[index + 1].Q_heat.values
    dqdt = (q_after - q_before) / (2.0 * dt)
    rhs = -p_now * c.alpha_th * dqdt

    num = float(np.max(np.abs(dpdt - rhs)))
    den = float(np.max(np.abs(dpdt))) + 1e-2 * float(np.max(np.abs(rhs))) + 1e-300
    return num / den


def coupled_evolution_deviation(
    density0: Density, t_final: float, dt: float
) -> float:
    """Evolve P by Fick and its heat field by the heat equation; return the
    worst weighted deviation of P(t) from c_hat(t) exp(-alpha Q(t)).

    The two evolutions are consistent only to leading order (the coupling
    transports an extra (grad Q)^2 term), so this decays with the horizon;
    it quantifies how long the coupled picture survives.
    """
    constants = PhysicalConstants()
    hf0 = heat_from_density(density0, constants)
    D = constants.diffusivity
    fick = fick_diffuse(density0, D, t_final, dt)
    heat = heat_equation_evolve(hf0, t_final, dt)
    worst = 0.0
    for dens, hf in zip(fick.densities, heat.fields):
        worst = max(worst, coupling_deviation(dens, hf, constants))
    return worst


# ---------------------------------------------------------------------------
# coherence suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceItem:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass(frozen=True)
class CoherenceReport:
    items: list[CoherenceItem]

    @property
    def all_passed(self) -> bool:
        return all(item.passed for item in self.items)

    def item(self, name: str) -> CoherenceItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)


def coherence_suite(
    hf: HeatField,
    constants: PhysicalConstants,
    evolve_horizon: float = 0.004,
    evolve_dt: float = 1e-3,
) -> CoherenceReport:
    """Run the five-point coherence check between the thermal and
    probabilistic pictures, plus the Gibbs-side companion.

    1. ratio law P(t)/P(0) = exp(-beta DeltaQ) against an independently
       Fick-evolved density (short horizon),
    2. DeltaQ = 2 omega Delta(deltaS),
    3. delta_p = grad(deltaS) = -(hbar/2) grad(P)/P and
       grad(P)/P = -beta grad(Q),
    4. delta_E_kin = (hbar^2/8m)(grad P/P)^2 = (1/8 m omega^2)(grad Q)^2,
    5. log P affine in -beta Q with slope 1.
    """
    if not constants.is_thermal_equilibrium:
        raise ValueError("coherence suite assumes hbar*omega = k*T")
    density, _ = density_from_heat(hf.Q_heat, constants.alpha_th,
                                   truncation_check=False)
    p = density.values
    mask = density.support_mask
    dx = density.grid.dx
    beta = constants.beta
    items: list[CoherenceItem] = []

    # 1: evolve-and-compare (Fick for P, heat equation for Q).
    fick = fick_diffuse(density, constants.diffusivity, evolve_horizon, evolve_dt)
    heat = heat_equation_evolve(hf, evolve_horizon, evolve_dt)
    dev1 = max(
        coupling_deviation(d, h, constants)
        for d, h in zip(fick.densities, heat.fields)
    )
    items.append(CoherenceItem("ratio-law-evolution", dev1, 1e-3))

    # 2: DeltaQ = 2 omega Delta(deltaS), a definition-chain identity.
    ds0 = delta_s_from_heat(hf).values
    ds1 = delta_s_from_heat(heat.fields[-1]).values
    delta_q = heat.fields[-1].Q_heat.values - hf.Q_heat.values
    dev2 = float(np.max(np.abs(delta_q - 2.0 * constants.omega * (ds1 - ds0))))
    scale2 = float(np.max(np.abs(delta_q))) + 1e-300
    items.append(CoherenceItem("heat-action-link", dev2 / scale2, 1e-12))

    # 3: fluctuation chain through the coupling.
    rep = fluctuation_report(density, constants)
    grad_ds = derivative_values(delta_s_from_heat(hf).values, dx)
    dev3a = weighted_max_dev(grad_ds, rep.delta_p.values, density)
    grad_log = density.grad_log()
    grad_q_field = derivative_values(hf.Q_heat.values, dx)
    dev3b = weighted_max_dev(
        grad_log, np.where(mask, -beta * grad_q_field, 0.0), density
    )
    scale3 = float(np.max(np.abs(rep.delta_p.values))) + 1e-300
    items.append(CoherenceItem("fluctuation-chain", max(dev3a, dev3b) / scale3, 1e-6))

    # 4: kinetic excess two ways (exact algebra under the coupling).
    hbar, m, omega = constants.hbar, constants.mass, constants.omega
    lhs4 = (hbar**2 / (8.0 * m)) * grad_log**2
    grad_q_coupled = coupled_grad_heat(density, constants)
    rhs4 = (1.0 / (8.0 * m * omega**2)) * grad_q_coupled**2
    scale4 = float(np.max(lhs4)) + 1e-300
    items.append(
        CoherenceItem("kinetic-excess", weighted_max_dev(lhs4, rhs4, density) / scale4,
                      1e-10)
    )

    # 5: log P affine in -beta Q with unit slope.
    logp = np.log(p[mask])
    target = -beta * hf.Q_heat.values[mask]
    slope = float(np.polyfit(target, logp, 1)[0])
    items.append(CoherenceItem("gibbs-form-slope", abs(slope - 1.0), 1e-9))

    # Gibbs-side companion: route-B Fisher equals the Gibbs-form Fisher.
    report = thermal_fisher_report(density, hf, constants)
    dev6 = abs(report.route_b - report.fisher_direct) / abs(report.fisher_direct)
    items.append(CoherenceItem("thermal-equals-gibbs-fisher", dev6, 1e-8))

    return CoherenceReport(items=items)


# ---------------------------------------------------------------------------
# Gibbs-side formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GibbsFormulaCheck:
    """Quantum potential and Fisher information of a Gibbs density,
    evaluated directly and through the energy-derivative formulas."""

    qp_maxdev: float
    fisher_direct: float
    fisher_energy_route: float

    @property
    def fisher_rel_err(self) -> float:
        return abs(self.fisher_direct - self.fisher_energy_route) / abs(
            self.fisher_energy_route
        )


def gibbs_formula_check(
    E: ScalarField, gamma: float, constants: PhysicalConstants
) -> GibbsFormulaCheck:
    """For P = exp(-gamma E)/Z check

        Q = (gamma hbar^2 / 8m) [2 E'' - gamma (E')^2]      (pointwise)
        FI = gamma^2 <(E')^2>_P                              (scalar)

    The sign of the bracket follows the amplitude definition of Q; the
    printed source form carries the opposite sign and is recorded as a
    flagged discrepancy in the report layer.
    """
    density, _ = gibbs_density(E, gamma, truncation_check=False)
    hbar, m = constants.hbar, constants.mass
    dx = E.grid.dx
    mask = density.support_mask

    q_direct = quantum_potential(density, constants).values
    e1 = derivative_values(E.values, dx)
    e2 = second_derivative_values(E.values, dx)
    q_formula = (gamma * hbar**2 / (8.0 * m)) * (2.0 * e2 - gamma * e1**2)
    scale = float(np.max(np.abs(np.where(mask, q_direct, 0.0)))) + 1e-300
    qp_maxdev = weighted_max_dev(q_direct, np.where(mask, q_formula, 0.0), density) / scale

    fisher_direct = fisher_information(density)
    fisher_route = gamma**2 * quadrature_values(
        np.where(mask, density.values * e1**2, 0.0), dx
    )
    return GibbsFormulaCheck(
        qp_maxdev=qp_maxdev,
        fisher_direct=fisher_direct,
        fisher_energy_route=fisher_route,
    )
