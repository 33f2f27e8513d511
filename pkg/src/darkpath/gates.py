"""Holonomic gate realization and gate-level metrics.

A loop with angles (theta, phi, gamma) acts on the qubit block as
U = |d1><d1| + e^{i gamma} |b><b|, which equals the axis-angle closed form
e^{i gamma/2} e^{-i (gamma/2) n.sigma} up to a global phase.  This module
simulates the loop end to end, restricts to the qubit block, and scores
fidelity and leakage; with noise it returns the full channel instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Operator, PAULI_X, PAULI_Y, PAULI_Z, operator_fidelity
from .dynamics import (DEFAULT_LINDBLAD_TOL, DEFAULT_UNITARY_TOL,
                       HamiltonianModel, _lindblad_trajectory, propagate_unitary)
from .pulses import DEFAULT_N_SAMPLES, GateSpec, synthesize

NAMED_GATE_ANGLES = {
    "X": (np.pi / 2.0, 0.0, np.pi),
    "H": (np.pi / 4.0, 0.0, np.pi),
    "T": (0.0, 0.0, np.pi / 4.0),
    "S": (0.0, 0.0, np.pi / 2.0),
}


def target_unitary(theta, phi, gamma):
    """Closed-form qubit target e^{i gamma/2} e^{-i (gamma/2) n.sigma}."""
    axis = np.array([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)])
    n_sigma = axis[0] * PAULI_X + axis[1] * PAULI_Y + axis[2] * PAULI_Z
    half = gamma / 2.0
    u = np.exp(1j * half) * (np.cos(half) * np.eye(2) - 1j * np.sin(half) * n_sigma)
    return Operator(u)


def named_gate(name, eta, duration=None, peak_rabi=None):
    """GateSpec for one of the named gates X, H, T, S."""
    try:
        theta, phi, gamma = NAMED_GATE_ANGLES[name]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; expected one of X, H, T, S") from None
    return GateSpec(theta, phi, gamma, eta, duration=duration, peak_rabi=peak_rabi)


@dataclass(frozen=True)
class RealizedGate:
    """Noiseless loop outcome: qubit block of the propagator plus leakage."""

    qubit_block: np.ndarray
    leakage: float
    full_propagator: Operator
    spec: GateSpec
    duration: float

    def qubit_channel(self):
        return QubitChannel(np.kron(self.qubit_block, self.qubit_block.conj()))


@dataclass(frozen=True)
class QubitChannel:
    """Linear map on qubit density matrices, as a superoperator on vec(rho).

    Row-major vectorization; trace-decreasing maps (leakage) are allowed.
    """

    superop: np.ndarray

    @classmethod
    def from_unitary(cls, u):
        u = u.entries if isinstance(u, Operator) else np.asarray(u, dtype=complex)
        return cls(np.kron(u, u.conj()))

    @classmethod
    def depolarizing(cls, p):
        """rho -> (1-p) rho + p I/2."""
        v = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
        return cls((1.0 - p) * np.eye(4, dtype=complex) + (p / 2.0) * np.outer(v, v))

    def then(self, other):
        """Composite channel: self first, then other."""
        return QubitChannel(other.superop @ self.superop)

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        return (self.superop @ rho.reshape(4)).reshape(2, 2)


@dataclass(frozen=True)
class GateChannel:
    """Noisy loop outcome: the full channel on the four-level space."""

    superop: np.ndarray
    spec: GateSpec
    duration: float
    dim: int = field(default=4)

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        d = self.dim
        return (self.superop @ rho.reshape(d * d)).reshape(d, d)

    def apply_qubit(self, rho2):
        """Embed a qubit state, run the channel, restrict to the qubit block."""
        d = self.dim
        rho = np.zeros((d, d), dtype=complex)
        rho[:2, :2] = np.asarray(rho2, dtype=complex)
        return self.apply(rho)[:2, :2]

    def qubit_channel(self):
        s = np.empty((4, 4), dtype=complex)
        for k in range(2):
            for l in range(2):
                unit = np.zeros((2, 2), dtype=complex)
                unit[k, l] = 1.0
                s[:, 2 * k + l] = self.apply_qubit(unit).reshape(4)
        return QubitChannel(s)


def realize_schedule(schedule, tol=None, noise=None):
    """Simulate an already-synthesized (possibly error-injected) schedule.

    Returns a RealizedGate for noiseless evolution, or a GateChannel (the
    16x16 superoperator obtained by propagating all matrix units through the
    Lindblad equation) when a NoiseModel is given.
    """
    model = HamiltonianModel(schedule)
    if noise is None:
        u = propagate_unitary(model, tol=DEFAULT_UNITARY_TOL if tol is None else tol)
        block = u.entries[:2, :2]
        smin = np.linalg.svd(block, compute_uv=False).min()
        leakage = float(max(0.0, 1.0 - smin * smin))
        return RealizedGate(block, leakage, u, schedule.spec, schedule.duration)
    units = np.zeros((16, 4, 4), dtype=complex)
    for k in range(4):
        for l in range(4):
            units[4 * k + l, k, l] = 1.0
    _, traj = _lindblad_trajectory(units, model, noise,
                                   DEFAULT_LINDBLAD_TOL if tol is None else tol)
    superop = traj[-1].reshape(16, 16).T
    return GateChannel(superop, schedule.spec, schedule.duration)


def realize(spec, tol=None, noise=None, n_samples=DEFAULT_N_SAMPLES):
    """Synthesize and simulate the full loop for `spec`; see realize_schedule."""
    return realize_schedule(synthesize(spec, n_samples=n_samples),
                            tol=tol, noise=noise)


def gate_fidelity(gate, target):
    """Fidelity of a realized gate or channel against a qubit target unitary.

    Unitary case: global-phase-insensitive operator fidelity of the qubit
    block.  Channel case: average fidelity <psi_t| E(psi) |psi_t> over the
    six axis states.
    """
    t = target.entries if isinstance(target, Operator) else np.asarray(target)
    if isinstance(gate, RealizedGate):
        return operator_fidelity(gate.qubit_block, t)
    if isinstance(gate, GateChannel):
        gate = gate.qubit_channel()
    if not isinstance(gate, QubitChannel):
        raise TypeError(f"cannot score {type(gate).__name__}")
    from .tomography import basis_states

    total = 0.0
    for psi in basis_states():
        out = gate.apply(np.outer(psi.amplitudes, psi.amplitudes.conj()))
        tpsi = t @ psi.amplitudes
        total += float(np.real(tpsi.conj() @ out @ tpsi))
    return min(1.0, total / 6.0)
