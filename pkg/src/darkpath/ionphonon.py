"""Spin-phonon sideband model and the two-qubit controlled-phase proposal.

A single driven ion couples its internal qubit to one motional mode.  The
lab-frame sideband Hamiltonian validates the physics (carrier and blue
sideband rates); the controlled-phase gate itself is simulated on the
effective three-level coupling that the two sideband tones produce inside
the joint subspace {|11,0_p>, |a,0_p>, |2,0_p>}, driven by the same theta=0
dark-path schedules as the single-qubit gates.  Spectator computational
states are never coupled, so the gate is diag(1, 1, 1, e^{i gamma}).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import curve_fit

from .core import Operator
from .dynamics import DEFAULT_UNITARY_TOL, converged_propagator
from .pulses import LoopSchedule, control_amplitudes, solve_duration

DEFAULT_LAMB_DICKE = 0.1
DEFAULT_TRAP_FREQ = 2.0 * np.pi * 2.4e6


@dataclass(frozen=True)
class SpinPhononModel:
    """One driven spin transition coupled to a truncated phonon mode."""

    rabi: float
    detuning: float = 0.0
    lamb_dicke: float = DEFAULT_LAMB_DICKE
    trap_freq: float = DEFAULT_TRAP_FREQ
    phase: float = 0.0
    n_fock: int = 5

    def __post_init__(self):
        if self.lamb_dicke <= 0:
            raise ValueError("lamb_dicke must be positive")
        if self.n_fock < 2:
            raise ValueError("need at least two Fock levels")
        if self.rabi <= 0 or self.trap_freq <= 0:
            raise ValueError("rabi and trap_freq must be positive")

    @property
    def dim(self):
        return 2 * self.n_fock

    def matrices(self, times):
        """H(t) on the spin (slow index) x phonon space, one per time."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        n = self.n_fock
        lower = np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)
        raising = lower.conj().T
        eye_p = np.eye(n, dtype=complex)

        drive = np.exp(1j * (self.phase - self.detuning * times))
        trap_wave = np.exp(1j * self.trap_freq * times)
        phonon = (eye_p
                  + 1j * self.lamb_dicke * lower * trap_wave.conj()[:, None, None]
                  + 1j * self.lamb_dicke * raising * trap_wave[:, None, None])
        # sigma_+ = |e><g| occupies the lower-left spin block
        block = 0.5 * self.rabi * drive[:, None, None] * phonon
        out = np.zeros((times.size, self.dim, self.dim), dtype=complex)
        out[:, n:, :n] = block
        out[:, :n, n:] = block.conj().transpose(0, 2, 1)
        return out


def sideband_hamiltonian(model, t):
    """The lab-frame sideband Hamiltonian at one time, as an Operator."""
    return Operator(model.matrices(t)[0])


class SidebandFit(NamedTuple):
    frequency: float
    contrast: float
    max_top_fock: float


def blue_sideband_frequency(model, tol=1e-7):
    """Effective |g,0> -> |e,1> oscillation rate under blue-sideband drive.

    Simulates the full Hamiltonian (model.detuning should equal the trap
    frequency), records the |e,1> population on a fine grid, and fits
    A sin^2(omega t / 2); the fit averages over the fast carrier ripple.
    Raises if the truncated top Fock level becomes populated.
    """
    rate = model.lamb_dicke * model.rabi
    t_max = 1.3 * np.pi / rate
    n_grid = 2048
    prefix, _ = converged_propagator(model.matrices, t_max, tol=tol,
                                     n_start=n_grid, sample_every=1)
    times = np.linspace(0.0, t_max, n_grid + 1)
    psi0 = np.zeros(model.dim, dtype=complex)
    psi0[0] = 1.0  # |g, 0>
    states = prefix @ psi0
    target = model.n_fock + 1  # |e, 1>
    pops = np.abs(states[:, target]) ** 2

    top_fock = np.abs(states[:, [model.n_fock - 1, 2 * model.n_fock - 1]]) ** 2
    max_top = float(top_fock.max())
    if max_top > 1e-6:
        raise ValueError(f"top Fock level reached population {max_top:.2e}; "
                         "increase n_fock")

    def shape(t, amp, omega):
        return amp * np.sin(omega * t / 2.0) ** 2

    popt, _ = curve_fit(shape, times, pops, p0=(1.0, rate))
    return SidebandFit(float(abs(popt[1])), float(popt[0]), max_top)


@dataclass(frozen=True)
class CZSubspace:
    """Joint spin-spin-phonon basis used by the effective gate."""

    labels: tuple = ("00", "01", "10", "11", "a0", "20")

    @property
    def computational(self):
        return self.labels[:4]

    @property
    def auxiliary(self):
        return self.labels[4:]

    @property
    def dim(self):
        return len(self.labels)


def effective_cz_matrices(loop, times):
    """Effective Hamiltonians on the CZSubspace basis, one per time.

    Active couplings: (Omega_1/2) e^{-i phi0(t)} |11><a0| and
    (Omega_2/2) |20><a0| plus conjugates; the computational spectators
    |00>, |01>, |10> are never coupled.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    omega, omega2 = control_amplitudes(times, loop.duration, loop.eta)
    out = np.zeros((times.size, 6, 6), dtype=complex)
    coupling = 0.5 * omega * np.exp(-1j * np.asarray(loop.phi0_at(times), dtype=float))
    out[:, 3, 4] = coupling
    out[:, 4, 3] = np.conj(coupling)
    out[:, 5, 4] = 0.5 * omega2
    out[:, 4, 5] = 0.5 * omega2
    return out


def effective_cz_hamiltonian(loop, t):
    """The effective controlled-phase Hamiltonian at one time, as an Operator."""
    return Operator(effective_cz_matrices(loop, t)[0])


def _active_cz_matrices(loop, times):
    """The coupled 3x3 block {|11>, |a0>, |20>} of the effective Hamiltonian."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    omega, omega2 = control_amplitudes(times, loop.duration, loop.eta)
    out = np.zeros((times.size, 3, 3), dtype=complex)
    coupling = 0.5 * omega * np.exp(-1j * np.asarray(loop.phi0_at(times), dtype=float))
    out[:, 0, 1] = coupling
    out[:, 1, 0] = np.conj(coupling)
    out[:, 2, 1] = 0.5 * omega2
    out[:, 1, 2] = 0.5 * omega2
    return out


class CZResult(NamedTuple):
    block: np.ndarray
    leakage: float
    duration: float
    full: np.ndarray
    subspace: CZSubspace


def controlled_phase_gate(gamma, peak_rabi=None, duration=None, eta=4.0,
                          tol=DEFAULT_UNITARY_TOL):
    """Simulate the two-interval loop on the effective coupling.

    Exactly one of peak_rabi/duration fixes the loop length.  Returns the
    4x4 computational block (diag(1, 1, 1, e^{i gamma}) for an ideal run),
    the |11> leakage, and the full 6x6 propagator.
    """
    if (duration is None) == (peak_rabi is None):
        raise ValueError("set exactly one of peak_rabi or duration")
    if duration is None:
        duration = solve_duration(peak_rabi, eta)
    loop = LoopSchedule(duration, eta, gamma)
    # Only {|11>, |a0>, |20>} couple; propagating that block and embedding it
    # in the identity keeps the spectator states exactly invariant.
    u3, _ = converged_propagator(lambda ts: _active_cz_matrices(loop, ts),
                                 duration, tol=tol, n_start=512)
    u = np.eye(6, dtype=complex)
    u[3:, 3:] = u3
    block = u[:4, :4].copy()
    leakage = float(max(0.0, 1.0 - abs(u[3, 3]) ** 2))
    return CZResult(block, leakage, duration, u, CZSubspace())
