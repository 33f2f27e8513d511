"""Time-dependent Hamiltonian assembly, propagation, and the dark-path frame.

The propagator uses a fourth-order commutator-free scheme: per step, the
Hamiltonian is sampled at the two Gauss-Legendre nodes and two weighted
combinations are exponentiated, so each step is a product of exact unitary
exponentials and the total propagator is unitary by construction.  Accuracy
is certified by step-halving: the step count doubles until two consecutive
results agree to the requested tolerance.

Open-system evolution uses Strang splitting between the unitary step and
the exact exponential of the (time-independent) dissipator, which preserves
trace and Hermiticity structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from . import _engine
from .core import STRUCT_ATOL, FOUR_LEVEL_LABELS, DensityMatrix, Operator, StateVector
from .pulses import _check_range

# Gauss nodes and weights of the 4th-order commutator-free exponential step.
_SQ3 = np.sqrt(3.0)
CF4_NODES = (0.5 - _SQ3 / 6.0, 0.5 + _SQ3 / 6.0)
CF4_WEIGHTS = (0.25 + _SQ3 / 6.0, 0.25 - _SQ3 / 6.0)

DEFAULT_UNITARY_TOL = 1e-9
DEFAULT_LINDBLAD_TOL = 1e-8
_MAX_STEPS = 2 ** 22


class HamiltonianModel:
    """Four-level drive Hamiltonian built from a pulse schedule.

    H(t) couples each of |0>, |1>, |2> to the shared excited level |a| with
    matrix element Omega_j(t) e^{-i phi_j} / 2; the diagonal vanishes in the
    resonant rotating frame.
    """

    dim = 4

    def __init__(self, schedule):
        self.schedule = schedule

    @property
    def duration(self):
        return self.schedule.duration

    def matrices(self, times):
        times = np.atleast_1d(np.asarray(times, dtype=float))
        c = self.schedule.complex_envelopes(times)
        h = np.zeros((times.size, 4, 4), dtype=complex)
        h[:, 0:3, 3] = c / 2.0
        h[:, 3, 0:3] = c.conj() / 2.0
        return h


def hamiltonian_at(model, t):
    """H(t) as an Operator; t must lie within the schedule."""
    _check_range(t, model.duration)
    return Operator(model.matrices(t)[0])


def _cf4_factors(h_of_ts, duration, n_steps):
    """Interleaved step factors: 2 Hermitian generators per step, scaled by dt."""
    dt = duration / n_steps
    starts = np.arange(n_steps) * dt
    h1 = h_of_ts(starts + CF4_NODES[0] * dt)
    h2 = h_of_ts(starts + CF4_NODES[1] * dt)
    a1, a2 = CF4_WEIGHTS
    gens = np.empty((2 * n_steps,) + h1.shape[1:], dtype=complex)
    gens[0::2] = a1 * h1 + a2 * h2
    gens[1::2] = a2 * h1 + a1 * h2
    return _engine.expi_herm(gens, -dt)


def cf4_propagator(h_of_ts, duration, n_steps):
    """Single fixed-step propagator over [0, duration] (no convergence check)."""
    return _engine.chain(_cf4_factors(h_of_ts, duration, n_steps))


def converged_propagator(h_of_ts, duration, tol=DEFAULT_UNITARY_TOL,
                         n_start=512, sample_every=None):
    """Step-halved CF4 propagator for an arbitrary Hermitian h_of_ts.

    Doubles the step count until two consecutive total propagators agree
    entrywise within tol.  With sample_every=k (n_start a multiple of k),
    returns the cumulative propagators at every k-th coarse checkpoint,
    i.e. an array of n_start/k + 1 propagators including identity; otherwise
    returns the final propagator only.
    """
    n = n_start
    prev = None
    while n <= _MAX_STEPS:
        factors = _cf4_factors(h_of_ts, duration, n)
        if sample_every is None:
            result = _engine.chain(factors)
            final = result
        else:
            result = _engine.chain_prefix(factors, 2 * (n * sample_every // n_start))
            final = result[-1]
        if prev is not None and np.abs(final - prev).max() < tol:
            return result, n
        prev = final
        n *= 2
    raise RuntimeError(f"propagator did not converge to {tol} within {_MAX_STEPS} steps")


def _model_steps(model, n_start):
    """Starting step count: schedule-aligned for sampled-only schedules."""
    if model.schedule.envelope is None:
        return model.schedule.n_samples
    return min(max(n_start, 128), model.schedule.n_samples)


def propagate_unitary(model, tol=DEFAULT_UNITARY_TOL):
    """Converged total propagator U(T, 0) for the schedule."""
    u, _ = converged_propagator(model.matrices, model.duration, tol=tol,
                                n_start=_model_steps(model, 512))
    return Operator(u)


def propagate_unitary_samples(model, tol=DEFAULT_UNITARY_TOL):
    """Converged propagators U(t_k, 0) at every schedule sample time."""
    n_samples = model.schedule.n_samples
    us, _ = converged_propagator(model.matrices, model.duration, tol=tol,
                                 n_start=n_samples, sample_every=1)
    return model.schedule.times.copy(), us


@dataclass(frozen=True)
class NoiseModel:
    """Markovian collapse operators with rates (1/s) for Lindblad evolution."""

    collapse: tuple

    def __post_init__(self):
        for op, rate in self.collapse:
            if rate < 0:
                raise ValueError("collapse rates must be >= 0")
            mat = np.asarray(op)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("collapse operators must be square")

    @classmethod
    def dephasing(cls, t2, dim=4, levels=(1, 2, 3)):
        """Independent pure dephasing of each level in `levels`.

        Projector collapse operators |j><j| at rate 2/T2 make the coherence
        between |0> and any dephased level decay as e^{-t/T2} (the
        operational T2); coherences between two dephased levels decay twice
        as fast.
        """
        if t2 <= 0:
            raise ValueError("t2 must be positive")
        ops = []
        for j in levels:
            proj = np.zeros((dim, dim), dtype=complex)
            proj[j, j] = 1.0
            ops.append((proj, 2.0 / t2))
        return cls(tuple(ops))

    def dissipator(self, dim):
        """Superoperator D with d(vec rho)/dt = D vec(rho), row-major vec."""
        eye = np.eye(dim, dtype=complex)
        d_mat = np.zeros((dim * dim, dim * dim), dtype=complex)
        for op, rate in self.collapse:
            l_op = np.asarray(op, dtype=complex)
            if l_op.shape != (dim, dim):
                raise ValueError(f"collapse operator shape {l_op.shape} != ({dim},{dim})")
            ll = l_op.conj().T @ l_op
            d_mat += rate * (np.kron(l_op, l_op.conj())
                             - 0.5 * np.kron(ll, eye) - 0.5 * np.kron(eye, ll.T))
        return d_mat


class LindbladResult(NamedTuple):
    final: DensityMatrix
    times: np.ndarray
    states: np.ndarray


def _lindblad_trajectory(rhos0, model, noise, tol):
    """Open-system trajectories for a batch of initial density matrices.

    Returns (times, traj) with traj shaped (n_samples + 1, batch, d, d),
    checkpointed at the schedule sample times.
    """
    n_samples = model.schedule.n_samples
    duration = model.duration
    dim = model.dim
    dissipator = None if noise is None else noise.dissipator(dim)
    n = n_samples
    prev = None
    while n <= _MAX_STEPS:
        factors = _cf4_factors(model.matrices, duration, n)
        step_us = factors[1::2] @ factors[0::2]
        e_half = None
        if dissipator is not None:
            e_half = expm(dissipator * (duration / n / 2.0))
        traj = _engine.lindblad_run(step_us, e_half, rhos0, n // n_samples)
        if prev is not None and np.abs(traj[-1] - prev).max() < tol:
            return model.schedule.times.copy(), traj
        prev = traj[-1]
        n *= 2
    raise RuntimeError(f"Lindblad propagation did not converge to {tol}")


def propagate_lindblad(rho0, model, noise, tol=DEFAULT_LINDBLAD_TOL):
    """Evolve rho0 under the schedule Hamiltonian plus collapse operators."""
    rho_mat = rho0.entries if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    times, traj = _lindblad_trajectory(rho_mat[None], model, noise, tol)
    states = traj[:, 0]
    return LindbladResult(DensityMatrix(states[-1]), times, states)


@dataclass(frozen=True)
class FrameStates:
    """Bright/dark qubit frame set by the tone ratio and relative phase."""

    bright: StateVector
    dark1: StateVector
    theta: float
    phi: float

    def __post_init__(self):
        if abs(self.dark1.overlap(self.bright)) > 100 * STRUCT_ATOL:
            raise ValueError("frame states must be orthogonal")


def frame_states(theta, phi):
    """|b> and |d1> on the four-level space for given (theta, phi)."""
    half = theta / 2.0
    bright = np.zeros(4, dtype=complex)
    bright[0] = np.sin(half)
    bright[1] = -np.exp(1j * phi) * np.cos(half)
    dark = np.zeros(4, dtype=complex)
    dark[0] = -np.cos(half) * np.exp(-1j * phi)
    dark[1] = -np.sin(half)
    return FrameStates(StateVector(bright, labels=FOUR_LEVEL_LABELS),
                       StateVector(dark, labels=FOUR_LEVEL_LABELS), theta, phi)


def dark_path_state(t, loop, frame):
    """The driven dark state |d2(t)> of the loop.

    |d2> = cos(alpha) (cos(beta) e^{-i phi0} |b> - sin(beta) |2>)
           - i sin(alpha) |a>, with the interval-resolved phi0.
    """
    a = float(loop.alpha(t))
    b = float(loop.beta(t))
    phi0 = float(loop.phi0_at(t))
    amps = np.cos(a) * np.cos(b) * np.exp(-1j * phi0) * frame.bright.amplitudes
    amps = amps.copy()
    amps[2] += -np.cos(a) * np.sin(b)
    amps[3] += -1j * np.sin(a)
    return StateVector(amps, labels=FOUR_LEVEL_LABELS)


def population_trace(psi0, model, noise=None, tol=None):
    """Level populations at every schedule sample time, shape (n+1, 4)."""
    amps = psi0.amplitudes if isinstance(psi0, StateVector) else np.asarray(psi0)
    if noise is None:
        times, us = propagate_unitary_samples(
            model, tol=DEFAULT_UNITARY_TOL if tol is None else tol)
        pops = np.abs(us @ amps) ** 2
    else:
        rho0 = np.outer(amps, amps.conj())
        times, traj = _lindblad_trajectory(
            rho0[None], model, noise, DEFAULT_LINDBLAD_TOL if tol is None else tol)
        pops = np.real(np.einsum("tkii->tki", traj)[:, 0])
    return times, pops


def sampled_population_trace(pops, shots, seed):
    """Finite-shot estimate of a population trace (multinomial per sample)."""
    pops = np.asarray(pops, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    clipped = np.clip(pops, 0.0, None)
    out = np.empty_like(clipped)
    for k, row in enumerate(clipped):
        out[k] = rng.multinomial(shots, row / row.sum()) / shots
    return out


def write_trajectory_csv(path, times, pops):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_s", "p0", "p1", "p2", "pa"])
        for t, row in zip(times, pops):
            writer.writerow([f"{v:.12g}" for v in (t, *row)])
