"""Time-dependent Schroedinger evolution and dynamical identity checks.

The stepper is a Crank-Nicolson (implicit midpoint) scheme with Dirichlet
walls:

    (1 + i dt H / 2 hbar) psi^{n+1} = (1 - i dt H / 2 hbar) psi^n,
    H = -(hbar^2/2m) D2 + V,

with D2 the 3-point second difference on interior points.  The update is
a Cayley transform of a symmetric real matrix, so it preserves the
discrete l2 norm to roundoff, is unconditionally stable, and is exactly
time-reversible (stepping with -dt undoes a step).

Phase extraction along a trajectory unwraps in x on the support and then
aligns each step against the previous one at the density peak, so that
the global phase drift (and hence dS/dt) is well defined.  Dirichlet
walls stand in for an unbounded domain; a boundary-contact guard raises
instead of silently corrupting identity checks once the packet reaches
the walls.

Residual normalization: each residual is reported relative to the
magnitude of its leading term plus a floor of one twentieth of the
natural field scale, so stationary states (where both sides vanish and
only solver roundoff remains) report a near-zero residual instead of
amplified noise.  The Hamilton-Jacobi residual additionally carries the
density weight used for all log-derivative fields (see ``functionals``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import BoundaryContact
from .functionals import differential_entropy, fisher_information, quantum_potential
from .grid import Grid, ScalarField, derivative_values, quadrature_values
from .states import Density, MadelungState, PhysicalConstants, density_from_samples

BOUNDARY_THRESHOLD = 1e-10   # relative |psi|^2 at the first interior points
RESIDUAL_FLOOR = 0.05        # scale floor entering residual denominators


@dataclass(frozen=True)
class Trajectory:
    """Uniform-in-time sequence of Madelung states under a fixed potential.

    ``psis`` holds the raw complex wavefunction samples per step; the
    Madelung split in ``states`` is derived from them (and is lossy in
    the sub-floor tails, where the phase is extended rather than read
    off roundoff-level amplitudes).
    """

    times: np.ndarray
    states: list[MadelungState]
    psis: list[np.ndarray]
    potential: ScalarField
    constants: PhysicalConstants

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def grid(self) -> Grid:
        return self.potential.grid

    def __len__(self) -> int:
        return len(self.states)


def _hamiltonian_diagonals(grid: Grid, V: np.ndarray, constants: PhysicalConstants):
    """Main and off diagonal of H on the full grid (Dirichlet walls)."""
    dx = grid.dx
    kin = constants.hbar**2 / (2.0 * constants.mass * dx * dx)
    main = 2.0 * kin + V
    off = -kin * np.ones(grid.n - 1)
    return main, off


def _apply_h(psi: np.ndarray, main: np.ndarray, off: np.ndarray) -> np.ndarray:
    out = main * psi
    out[:-1] += off * psi[1:]
    out[1:] += off * psi[:-1]
    out[0] = out[-1] = 0.0  # Dirichlet: walls pinned
    return out


def _extract_phase(
    psi: np.ndarray, density: Density, constants: PhysicalConstants,
    previous: np.ndarray | None,
) -> np.ndarray:
    """Unwrapped phase * hbar, time-aligned against the previous step."""
    mask = density.support_mask
    idx = np.flatnonzero(mask)
    theta = np.unwrap(np.angle(psi[idx]))
    anchor = int(np.argmax(density.values[idx]))
    if previous is not None:
        prev_theta = previous[idx[anchor]] / constants.hbar
        k = np.round((prev_theta - theta[anchor]) / (2.0 * np.pi))
        theta += 2.0 * np.pi * k
    s = np.empty(len(psi))
    s[idx] = constants.hbar * theta
    s[: idx[0]] = s[idx[0]]
    s[idx[-1] + 1 :] = s[idx[-1]]
    return s


def _state_from_psi(
    psi: np.ndarray, grid: Grid, constants: PhysicalConstants,
    previous_phase: np.ndarray | None,
) -> MadelungState:
    density = density_from_samples(
        ScalarField(grid, np.abs(psi) ** 2), truncation_check=False
    )
    s = _extract_phase(psi, density, constants, previous_phase)
    return MadelungState(density, ScalarField(grid, s), constants)


def propagate_wavefunction(
    psi0: np.ndarray,
    grid: Grid,
    V: ScalarField,
    constants: PhysicalConstants,
    dt: float,
    steps: int,
) -> list[np.ndarray]:
    """Raw Crank-Nicolson stepping; returns all steps+1 snapshots.

    Exactly norm-preserving and exactly invertible by stepping with -dt.
    Raises BoundaryContact when the relative density at a first-interior
    point exceeds 1e-10 (the packet has reached the wall).
    """
    if dt == 0.0:
        raise ValueError("dt must be nonzero")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    psi = np.asarray(psi0, dtype=complex).copy()
    psi[0] = psi[-1] = 0.0

    main, off = _hamiltonian_diagonals(grid, V.values, constants)
    z = 1j * dt / (2.0 * constants.hbar)
    # Banded matrix for A = 1 + z H restricted to interior points.
    m = grid.n - 2
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = z * off[1:-1]
    ab[1, :] = 1.0 + z * main[1:-1]
    ab[2, :-1] = z * off[1:-1]

    psis = [psi.copy()]
    for _ in range(steps):
        hpsi = _apply_h(psi, main, off)
        rhs = (psi - z * hpsi)[1:-1]
        nxt = np.zeros_like(psi)
        nxt[1:-1] = solve_banded((1, 1), ab, rhs)
        psi = nxt
        edge = max(abs(psi[1]) ** 2, abs(psi[-2]) ** 2)
        if edge > BOUNDARY_THRESHOLD * float(np.max(np.abs(psi) ** 2)):
            raise BoundaryContact(
                f"wave packet reached the wall (relative edge density {edge:.3e})"
            )
        psis.append(psi.copy())
    return psis


def evolve(
    initial: MadelungState, V: ScalarField, dt: float, steps: int
) -> Trajectory:
    """Propagate a state with Crank-Nicolson for ``steps`` steps of size dt.

    Accuracy guard: |dt| should not exceed dx for the second-order
    truncation errors in space and time to stay balanced; stability is
    unconditional either way.
    """
    grid = initial.grid
    if V.grid != grid:
        raise ValueError("potential grid mismatch")
    constants = initial.constants

    psi = initial.wavefunction().astype(complex)
    psi[0] = psi[-1] = 0.0
    norm = np.sqrt(quadrature_values(np.abs(psi) ** 2, grid.dx))
    psi /= norm
    psis = propagate_wavefunction(psi, grid, V, constants, dt, steps)

    states: list[MadelungState] = []
    prev_phase: np.ndarray | None = initial.phase.values
    for snapshot in psis:
        state = _state_from_psi(snapshot, grid, constants, prev_phase)
        prev_phase = state.phase.values
        states.append(state)

    times = np.arange(steps + 1) * dt
    return Trajectory(
        times=times, states=states, psis=psis, potential=V, constants=constants
    )


def norm_drift(traj: Trajectory) -> float:
    """Largest relative deviation of quadrature(|psi|^2) from 1."""
    worst = 0.0
    for state in traj.states:
        worst = max(worst, abs(state.density.mass_check() - 1.0))
    return worst


def energy_expectation(traj: Trajectory, index: int) -> float:
    """<H> via the same discrete Hamiltonian the stepper uses."""
    grid = traj.grid
    main, off = _hamiltonian_diagonals(grid, traj.potential.values, traj.constants)
    psi = traj.psis[index]
    hpsi = _apply_h(psi, main, off)
    return float(np.real(quadrature_values((np.conj(psi) * hpsi).real, grid.dx)))


def _interior_index(traj: Trajectory, index: int) -> None:
    if not 1 <= index <= len(traj) - 2:
        raise ValueError(f"index {index} must be interior (1..{len(traj) - 2})")


def probability_current(traj: Trajectory, index: int) -> np.ndarray:
    """J = (hbar/m) Im(psi* psi'), the flux of the continuity equation.

    Computed from the raw wavefunction: algebraically this equals
    P S'/m, but it does not inherit the roundoff floor of the phase
    extraction (relevant for stationary states, where J ~ 0).
    """
    psi = traj.psis[index]
    dx = traj.grid.dx
    dpsi = derivative_values(psi.real, dx) + 1j * derivative_values(psi.imag, dx)
    c = traj.constants
    return c.hbar / c.mass * np.imag(np.conj(psi) * dpsi)


def continuity_residual(traj: Trajectory, index: int) -> float:
    """max |dP/dt + div J| over the mask, relative to max|dP/dt|.

    Time derivative by centered difference at an interior index; the
    denominator carries the scale floor described in the module docstring.
    """
    _interior_index(traj, index)
    dt = traj.dt
    dx = traj.grid.dx
    before, now, after = (traj.states[index + k] for k in (-1, 0, 1))

    dpdt = (after.density.values - before.density.values) / (2.0 * dt)
    div = derivative_values(probability_current(traj, index), dx)
    mask = now.density.support_mask

    num = float(np.max(np.abs(dpdt[mask] + div[mask])))
    den = float(np.max(np.abs(dpdt[mask]))) + RESIDUAL_FLOOR * float(
        np.max(now.density.values)
    )
    return num / den


def hj_residual(traj: Trajectory, index: int) -> float:
    """Density-weighted residual of dS/dt + (S')^2/2m + V + Q = 0."""
    _interior_index(traj, index)
    dt = traj.dt
    m = traj.constants.mass
    before, now, after = (traj.states[index + k] for k in (-1, 0, 1))

    dsdt = (after.phase.values - before.phase.values) / (2.0 * dt)
    grad_s = now.momentum_field()
    q = quantum_potential(now.density, traj.constants).values
    r = dsdt + grad_s**2 / (2.0 * m) + traj.potential.values + q

    p = now.density.values
    mask = now.density.support_mask
    weight = p / float(np.max(p))
    num = float(np.max(weight[mask] * np.abs(r[mask])))
    scale = np.abs(traj.potential.values[mask] + q[mask])
    den = float(np.max(np.abs(dsdt[mask]))) + RESIDUAL_FLOOR * float(np.max(scale))
    return num / den


def entropy_rate_check(
    traj: Trajectory, index: int, use_rho: bool = False
) -> tuple[float, float]:
    """(lhs, rhs) of the entropy production identity.

    lhs is the centered time difference of the differential entropy; rhs
    is -integral(S' P') for the rho variant and -(1/m) of that for the
    plain-P variant.
    """
    _interior_index(traj, index)
    dt = traj.dt
    dx = traj.grid.dx
    m = traj.constants.mass
    before, now, after = (traj.states[index + k] for k in (-1, 0, 1))

    h_plus = differential_entropy(after.density, use_rho=use_rho, mass=m)
    h_minus = differential_entropy(before.density, use_rho=use_rho, mass=m)
    lhs = (h_plus - h_minus) / (2.0 * dt)

    grad_s = now.momentum_field()
    dp = derivative_values(now.density.values, dx)
    mask = now.density.support_mask
    integrand = np.where(mask, grad_s * dp, 0.0)
    rhs = -quadrature_values(integrand, dx)
    if not use_rho:
        rhs /= m
    return lhs, rhs


def osmotic_entropy_rate(density: Density, constants: PhysicalConstants) -> float:
    """Entropy production rate of the synthetic osmotic state.

    Builds S with S' = -(hbar/2m) P'/P by cumulative integration and
    evaluates rhs = -integral(S' P') directly (rho variant).  Equals
    +(hbar/2m) * FI, hence is nonnegative: pure diffusion only ever
    produces entropy.
    """
    g = density.grid
    w = density.grad_log()
    sprime_target = -(constants.hbar / (2.0 * constants.mass)) * w
    s = np.concatenate(
        ([0.0], np.cumsum((sprime_target[1:] + sprime_target[:-1]) * 0.5 * g.dx))
    )
    grad_s = derivative_values(s, g.dx)
    dp = derivative_values(density.values, g.dx)
    integrand = np.where(density.support_mask, grad_s * dp, 0.0)
    return -quadrature_values(integrand, g.dx)


def osmotic_rate_reference(density: Density, constants: PhysicalConstants) -> float:
    """(hbar/2m) * FI, the closed-form value of ``osmotic_entropy_rate``."""
    return constants.hbar / (2.0 * constants.mass) * fisher_information(density)
