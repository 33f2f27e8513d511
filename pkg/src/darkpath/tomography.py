"""Simulated quantum process tomography with finite shots and MLE.

The protocol mirrors a standard single-qubit experiment: prepare the six
axis states, run each through the channel, measure along x, y, z with a
finite shot budget, reconstruct each output state by iterative maximum
likelihood, then invert the linear map to a Pauli-basis chi matrix and
project it onto the physical (Hermitian, PSD, trace-one) set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (DensityMatrix, Operator, PAULIS, PAULI_X, PAULI_Y, PAULI_Z,
                   StateVector, pauli_decompose)

_AXES = ("x", "y", "z")
_AXIS_OPS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

MLE_GAIN_TOL = 1e-10
MLE_MAX_ITERS = 10_000


@dataclass(frozen=True)
class ShotConfig:
    """Shots per measurement setting plus the master seed."""

    shots: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")

    def rng(self, *stream_key):
        """Deterministic per-stream generator derived from the master seed."""
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=tuple(stream_key)))


@dataclass(frozen=True)
class ProcessMatrix:
    """Pauli-basis chi matrix, trace-normalized to 1."""

    chi: np.ndarray

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=complex)
        if chi.shape != (4, 4):
            raise ValueError("chi must be 4x4")
        if np.abs(chi - chi.conj().T).max() > 1e-8:
            raise ValueError("chi must be Hermitian within 1e-8")
        if abs(chi.trace().real - 1.0) > 1e-8:
            raise ValueError("chi must have trace 1 within 1e-8")
        if np.linalg.eigvalsh(chi).min() < -1e-8:
            raise ValueError("chi must be positive semidefinite within 1e-8")
        object.__setattr__(self, "chi", chi)

    def apply(self, rho):
        """Channel action E(rho) = sum_mn chi_mn P_m rho P_n."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros((2, 2), dtype=complex)
        for m, pm in enumerate(PAULIS):
            for n, pn in enumerate(PAULIS):
                out += self.chi[m, n] * (pm @ rho @ pn)
        return out


def basis_states():
    """The six axis states |0>, |1>, |+>, |->, |+i>, |-i>."""
    s = 1.0 / np.sqrt(2.0)
    vecs = [(1, 0), (0, 1), (s, s), (s, -s), (s, 1j * s), (s, -1j * s)]
    return tuple(StateVector(np.array(v, dtype=complex)) for v in vecs)


def sample_measurement(rho, axis, cfg, stream_key=()):
    """Projective measurement counts along one Bloch axis.

    Returns (n_plus, n_minus) drawn from a binomial with p = Tr(Pi_+ rho);
    identical stream keys under the same seed give identical counts.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    try:
        pauli = _AXIS_OPS[axis]
    except KeyError:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}") from None
    p_plus = float(np.real(np.trace((np.eye(2) + pauli) / 2.0 @ mat)))
    p_plus = min(1.0, max(0.0, p_plus))
    n_plus = int(cfg.rng(*stream_key).binomial(cfg.shots, p_plus))
    return np.array([n_plus, cfg.shots - n_plus])


def exact_probabilities(rho):
    """Infinite-shot 'counts': exact (p_plus, p_minus) per axis, shape (3, 2)."""
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    out = np.empty((3, 2))
    for k, axis in enumerate(_AXES):
        p = float(np.real(np.trace((np.eye(2) + _AXIS_OPS[axis]) / 2.0 @ mat)))
        p = min(1.0, max(0.0, p))
        out[k] = (p, 1.0 - p)
    return out


def state_mle(counts):
    """Iterative (R rho R) maximum-likelihood qubit state reconstruction.

    `counts` holds the (+, -) outcomes for the x, y, z axes in order, as a
    (3, 2) array (floats are fine, so exact probabilities can stand in for
    the infinite-shot limit).  Iterates until the normalized log-likelihood
    gains less than 1e-10 or 10^4 iterations are reached; the output is
    physical by construction.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (3, 2) or counts.min() < 0:
        raise ValueError("counts must be a nonnegative (3, 2) array")
    total = counts.sum()
    if total <= 0:
        raise ValueError("all-zero counts cannot be inverted")
    freqs = (counts / total).reshape(6)

    povm = []
    for axis in _AXES:
        pauli = _AXIS_OPS[axis]
        povm.append((np.eye(2) + pauli) / 6.0)
        povm.append((np.eye(2) - pauli) / 6.0)

    def log_likelihood(mat):
        probs = np.array([max(np.real(np.trace(e @ mat)), 1e-15) for e in povm])
        return float(np.dot(freqs, np.log(probs))), probs

    rho = np.eye(2, dtype=complex) / 2.0
    last_ll = -np.inf
    for _ in range(MLE_MAX_ITERS):
        ll, probs = log_likelihood(rho)
        if ll - last_ll < MLE_GAIN_TOL and np.isfinite(last_ll):
            break
        last_ll = ll
        r_op = sum(f / p * e for f, p, e in zip(freqs, probs, povm))
        rho = r_op @ rho @ r_op
        rho /= np.trace(rho).real
    rho = _project_physical(rho)

    # The iteration approaches boundary (low-rank) optima only sublinearly.
    # When the direct Pauli inversion of the frequencies is itself physical
    # it reproduces them exactly, which is the global likelihood maximum, so
    # prefer it whenever it scores at least as well as the fixed point.
    axis_sums = counts.sum(axis=1)
    if axis_sums.min() > 0:
        expect = (counts[:, 0] - counts[:, 1]) / axis_sums
        linear = 0.5 * (np.eye(2, dtype=complex)
                        + expect[0] * _AXIS_OPS["x"]
                        + expect[1] * _AXIS_OPS["y"]
                        + expect[2] * _AXIS_OPS["z"])
        if np.linalg.eigvalsh(linear).min() >= -1e-10:
            linear = _project_physical(linear)
            if log_likelihood(linear)[0] >= log_likelihood(rho)[0]:
                rho = linear
    return DensityMatrix(rho)


def _project_physical(rho):
    """Hermitize, clip negative eigenvalues, renormalize the trace."""
    rho = (rho + rho.conj().T) / 2.0
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * (w / w.sum())) @ v.conj().T


def _simplex_spectrum(w):
    """Euclidean projection of a spectrum onto {w >= 0, sum w = 1}.

    Uniformly shifting the retained eigenvalues is the true closest-point
    projection in Frobenius norm; clipping then rescaling is not, and at
    finite shots the difference costs measurable process fidelity.  A
    spectrum already on the simplex is returned unchanged.
    """
    u = np.sort(w)[::-1]
    cumulative = np.cumsum(u)
    ks = np.arange(1, len(u) + 1)
    k = ks[u + (1.0 - cumulative) / ks > 0][-1]
    tau = (cumulative[k - 1] - 1.0) / k
    return np.clip(w - tau, 0.0, None)


def _as_qubit_map(channel):
    if isinstance(channel, (Operator, np.ndarray)):
        u = channel.entries if isinstance(channel, Operator) else channel
        if u.shape != (2, 2):
            raise ValueError("unitary probes must be 2x2")
        return lambda rho: u @ rho @ u.conj().T
    if callable(channel) and not hasattr(channel, "apply_qubit") \
            and not hasattr(channel, "apply"):
        return channel
    if hasattr(channel, "apply_qubit"):
        return channel.apply_qubit
    if hasattr(channel, "qubit_block"):
        block = channel.qubit_block
        return lambda rho: block @ rho @ block.conj().T
    if hasattr(channel, "apply"):
        return channel.apply
    raise TypeError(f"cannot interpret {type(channel).__name__} as a qubit channel")


def chi_of_unitary(u):
    """The rank-one chi matrix of a qubit unitary (global phase drops out)."""
    c = pauli_decompose(u)
    c = c / np.linalg.norm(c)
    return ProcessMatrix(np.outer(c, c.conj()))


class QPTResult(NamedTuple):
    chi: ProcessMatrix
    fidelity: float | None
    output_states: tuple


def qpt(channel, cfg=None, target=None):
    """Process tomography of a qubit channel.

    With a ShotConfig, measurement counts are sampled (streams keyed by
    probe-state and axis index); with cfg=None the infinite-shot limit runs
    exact probabilities through the same MLE pipeline.  If `target` (a qubit
    unitary) is given, the returned fidelity is |Tr(chi_exp chi_target)|.
    """
    apply = _as_qubit_map(channel)
    probes = basis_states()
    outputs = []
    for k, psi in enumerate(probes):
        rho_out = apply(np.outer(psi.amplitudes, psi.amplitudes.conj()))
        if cfg is None:
            counts = exact_probabilities(rho_out)
        else:
            counts = np.array([sample_measurement(rho_out, axis, cfg, (k, a))
                               for a, axis in enumerate(_AXES)])
        outputs.append(state_mle(counts))

    coeffs = np.empty((24, 16), dtype=complex)
    rhs = np.empty(24, dtype=complex)
    row = 0
    for psi, rho_hat in zip(probes, outputs):
        rho_in = np.outer(psi.amplitudes, psi.amplitudes.conj())
        vec_out = rho_hat.entries.reshape(4)
        for entry in range(4):
            for m, pm in enumerate(PAULIS):
                for n, pn in enumerate(PAULIS):
                    coeffs[row, 4 * m + n] = (pm @ rho_in @ pn).reshape(4)[entry]
            rhs[row] = vec_out[entry]
            row += 1
    chi_vec, *_ = np.linalg.lstsq(coeffs, rhs, rcond=None)
    chi = chi_vec.reshape(4, 4)
    chi = (chi + chi.conj().T) / 2.0
    w, v = np.linalg.eigh(chi)
    chi = (v * _simplex_spectrum(w)) @ v.conj().T
    process = ProcessMatrix(chi)

    fid = None
    if target is not None:
        chi_the = chi_of_unitary(target).chi
        fid = min(1.0, float(abs(np.trace(process.chi @ chi_the.conj().T))))
    return QPTResult(process, fid, tuple(outputs))


def write_qpt_csv(path, chi, fidelity):
    """chi as two labeled 4x4 blocks (real, imag) plus the fidelity scalar."""
    import csv

    mat = chi.chi if isinstance(chi, ProcessMatrix) else np.asarray(chi)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["block", "row", "c0", "c1", "c2", "c3"])
        for name, part in (("chi_real", mat.real), ("chi_imag", mat.imag)):
            for r in range(4):
                writer.writerow([name, r] + [f"{v:.12g}" for v in part[r]])
        writer.writerow(["fidelity", "", f"{fidelity:.12g}", "", "", ""])
