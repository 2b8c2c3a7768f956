"""Fixed-step integrators for the Schroedinger and Lindblad equations.

Unitary dynamics use a piecewise-constant midpoint rule: each step applies
exp(-i H(t_mid) dt) computed by scaling-and-squaring.  Open dynamics use
classical RK4 on the Lindblad right-hand side with the Hamiltonian held at
its mid-step value.  Both integrators are deterministic and validate their
conservation laws (norm, trace, positivity) as they run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .spin import check_density_matrix, check_pure_state, is_hermitian

__all__ = [
    "IntegrationError",
    "DecoherenceSpec",
    "TimeGrid",
    "Trajectory",
    "propagator",
    "evolve_unitary",
    "evolve_lindblad",
    "reference_final_state",
]

#: Default integrator steps: lab-frame runs must resolve the Larmor scale and
#: match the 1 ns waveform-generator resolution; rotating/effective-frame runs
#: have the fast scale removed and may step much coarser.
LAB_FRAME_DT = 1e-9
ROTATING_FRAME_DT = 1e-7

NORM_ABORT_TOL = 1e-6
TRACE_ABORT_TOL = 1e-8
POSITIVITY_FLOOR = -1e-7


class IntegrationError(RuntimeError):
    """Raised when an integration violates a conservation-law tolerance."""


@dataclass(frozen=True)
class DecoherenceSpec:
    """Dephasing rates in 1/s: magnetic (jump operator Iz) and electric
    (jump operator Iz^2) field fluctuations."""

    gamma_m: float = 0.0
    gamma_e: float = 0.0

    def __post_init__(self):
        if self.gamma_m < 0 or self.gamma_e < 0:
            raise ValueError("decoherence rates must be >= 0")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid on [t_start, t_end] with step ~dt.

    The span is divided into an integer number of equal steps no longer than
    ``dt``; every ``output_stride``-th state (plus the final one) is stored.
    """

    t_start: float
    t_end: float
    dt: float
    output_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end <= self.t_start:
            raise ValueError("need t_end > t_start")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    @property
    def n_steps(self) -> int:
        return max(1, int(np.ceil(self.span / self.dt - 1e-9)))

    @property
    def step(self) -> float:
        return self.span / self.n_steps


@dataclass
class Trajectory:
    """Sampled states on a time grid, tagged with the frame they live in."""

    times: np.ndarray
    states: list
    frame: str = "effective"

    @property
    def final_state(self):
        return self.states[-1]

    def expectations(self, op: np.ndarray) -> np.ndarray:
        """Expectation value of ``op`` at every sample (pure or mixed)."""
        out = np.empty(len(self.states))
        for k, state in enumerate(self.states):
            if state.ndim == 1:
                out[k] = np.vdot(state, op @ state).real
            else:
                out[k] = np.trace(state @ op).real
        return out


def propagator(h: np.ndarray, dt: float) -> np.ndarray:
    """Unitary short-time propagator exp(-i H dt) for Hermitian H."""
    h = np.asarray(h)
    if not is_hermitian(h):
        raise ValueError("propagator requires a Hermitian generator")
    return scipy.linalg.expm(-1j * h * dt)


def _hamiltonian_source(h_of_t):
    """Normalize a Hamiltonian source to (callable, is_constant)."""
    if callable(h_of_t):
        return h_of_t, False
    h = np.asarray(h_of_t, dtype=complex)
    return (lambda t: h), True


def evolve_unitary(h_of_t, psi0, grid: TimeGrid, frame: str = "effective") -> Trajectory:
    """Integrate the Schroedinger equation over the grid.

    ``h_of_t`` is either a constant matrix or a callable t -> matrix sampled
    at step midpoints.  The state norm is monitored at every output sample
    and a drift beyond 1e-6 aborts with a step-size diagnostic.
    """
    psi = np.array(check_pure_state(psi0), dtype=complex)
    hfun, constant = _hamiltonian_source(h_of_t)
    dt = grid.step
    n = grid.n_steps
    u_const = propagator(hfun(grid.t_start), dt) if constant else None

    times = [grid.t_start]
    states = [psi.copy()]

    def record(t, psi):
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_ABORT_TOL:
            raise IntegrationError(
                f"norm drifted to {norm} at t = {t}; reduce dt (currently {dt})"
            )
        times.append(t)
        states.append(psi.copy())

    for k in range(n):
        if constant:
            psi = u_const @ psi
        else:
            t_mid = grid.t_start + (k + 0.5) * dt
            h = hfun(t_mid)
            if not is_hermitian(h):
                raise ValueError(f"Hamiltonian is not Hermitian at t = {t_mid}")
            psi = scipy.linalg.expm(-1j * h * dt) @ psi
        if (k + 1) % grid.output_stride == 0 or k == n - 1:
            record(grid.t_start + (k + 1) * dt, psi)

    return Trajectory(times=np.array(times), states=states, frame=frame)


def _lindblad_rhs(h, rho, jumps):
    """Right-hand side of the Lindblad master equation (hbar = 1)."""
    out = -1j * (h @ rho - rho @ h)
    for gamma, l_op, l2 in jumps:
        out += gamma * (l_op @ rho @ l_op.conj().T - 0.5 * (l2 @ rho + rho @ l2))
    return out


def evolve_lindblad(
    h_of_t, rho0, dec: DecoherenceSpec, grid: TimeGrid, frame: str = "effective"
) -> Trajectory:
    """Integrate the Lindblad master equation with dephasing jump operators
    L_m = Iz (rate gamma_m) and L_e = Iz^2 (rate gamma_e).

    RK4 with the Hamiltonian held piecewise-constant at each step midpoint.
    Sampled states are symmetrized; trace drift beyond 1e-8 or an eigenvalue
    below -1e-7 aborts with a step-size diagnostic.
    """
    rho = np.array(check_density_matrix(rho0), dtype=complex)
    d = rho.shape[0]
    m = (d - 1 - 2 * np.arange(d)) / 2  # m ladder inferred from dimension
    jumps = []
    if dec.gamma_m > 0:
        l_m = np.diag(m).astype(complex)
        jumps.append((dec.gamma_m, l_m, l_m @ l_m))
    if dec.gamma_e > 0:
        l_e = np.diag(m ** 2).astype(complex)
        jumps.append((dec.gamma_e, l_e, l_e @ l_e))

    hfun, constant = _hamiltonian_source(h_of_t)
    dt = grid.step
    n = grid.n_steps
    h_const = hfun(grid.t_start) if constant else None

    times = [grid.t_start]
    states = [rho.copy()]

    def record(t, rho):
        rho_s = (rho + rho.conj().T) / 2
        tr = np.trace(rho_s).real
        if abs(tr - 1.0) > TRACE_ABORT_TOL:
            raise IntegrationError(
                f"trace drifted to {tr} at t = {t}; reduce dt (currently {dt})"
            )
        lo = np.linalg.eigvalsh(rho_s).min()
        if lo < POSITIVITY_FLOOR:
            raise IntegrationError(
                f"eigenvalue {lo} below {POSITIVITY_FLOOR} at t = {t}; "
                f"reduce dt (currently {dt})"
            )
        times.append(t)
        states.append(rho_s)
        return rho  # integration continues on the unsymmetrized state

    for k in range(n):
        h = h_const if constant else hfun(grid.t_start + (k + 0.5) * dt)
        k1 = _lindblad_rhs(h, rho, jumps)
        k2 = _lindblad_rhs(h, rho + 0.5 * dt * k1, jumps)
        k3 = _lindblad_rhs(h, rho + 0.5 * dt * k2, jumps)
        k4 = _lindblad_rhs(h, rho + dt * k3, jumps)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % grid.output_stride == 0 or k == n - 1:
            record(grid.t_start + (k + 1) * dt, rho)

    return Trajectory(times=np.array(times), states=states, frame=frame)


def reference_final_state(h_of_t, psi0, grid: TimeGrid, refine: int = 100) -> np.ndarray:
    """Dense brute-force unitary oracle: plain midpoint stepping at dt/refine.

    Serves as the independent check on production runs; it never takes the
    constant-Hamiltonian shortcut and returns only the final state.
    """
    psi = np.array(check_pure_state(psi0), dtype=complex)
    hfun, _ = _hamiltonian_source(h_of_t)
    n = grid.n_steps * refine
    dt = grid.span / n
    for k in range(n):
        h = hfun(grid.t_start + (k + 0.5) * dt)
        psi = scipy.linalg.expm(-1j * h * dt) @ psi
    return psi
