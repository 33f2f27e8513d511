"""Dense complex linear algebra and quantum-information primitives.

Everything here operates on small Hilbert spaces (dimension <= ~16) with
plain numpy arrays under the hood.  The four-level basis ordering is fixed
package-wide as (|0>, |1>, |2>, |a>); the computational qubit lives on
indices 0 and 1.
"""

from __future__ import annotations

import numpy as np

STRUCT_ATOL = 1e-10

FOUR_LEVEL_LABELS = ("0", "1", "2", "a")

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class StateVector:
    """Unit-norm pure state on a small Hilbert space."""

    def __init__(self, amplitudes, labels=None, normalize=False):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size == 0:
            raise ValueError("state needs at least one amplitude")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > STRUCT_ATOL:
            raise ValueError(f"state norm {norm!r} differs from 1 beyond {STRUCT_ATOL}")
        amps.flags.writeable = False
        self.amplitudes = amps
        self.dim = amps.size
        if labels is None:
            labels = tuple(str(i) for i in range(self.dim))
        if len(labels) != self.dim:
            raise ValueError("label count must match dimension")
        self.labels = tuple(labels)

    @classmethod
    def basis(cls, dim, index, labels=None):
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, labels=labels)

    def overlap(self, other):
        """<self|other> as a complex number."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def populations(self):
        return np.abs(self.amplitudes) ** 2

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    def __init__(self, entries):
        rho = np.asarray(entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if np.abs(rho - rho.conj().T).max() > STRUCT_ATOL:
            raise ValueError("density matrix must be Hermitian within 1e-10")
        tr = rho.trace().real
        if abs(tr - 1.0) > STRUCT_ATOL:
            raise ValueError(f"trace {tr!r} differs from 1 beyond {STRUCT_ATOL}")
        eigmin = np.linalg.eigvalsh(rho).min()
        if eigmin < -1e-9:
            raise ValueError(f"negative eigenvalue {eigmin!r} below -1e-9")
        rho = rho.copy()
        rho.flags.writeable = False
        self.entries = rho
        self.dim = rho.shape[0]

    def populations(self):
        return np.real(np.diag(self.entries))

    def expectation(self, op):
        mat = op.entries if isinstance(op, Operator) else np.asarray(op)
        return complex(np.trace(mat @ self.entries))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class Operator:
    """Square complex matrix; unitarity is checked by callers when required."""

    def __init__(self, entries):
        mat = np.asarray(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator must be square")
        mat = mat.copy()
        mat.flags.writeable = False
        self.entries = mat
        self.dim = mat.shape[0]

    def dagger(self):
        return Operator(self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.entries @ other.entries)
        return NotImplemented

    def apply(self, state):
        return StateVector(self.entries @ state.amplitudes, labels=state.labels,
                           normalize=True)

    def unitarity_defect(self):
        return float(np.linalg.norm(
            self.entries.conj().T @ self.entries - np.eye(self.dim)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"Operator(dim={self.dim})"


def _raw(x):
    if isinstance(x, (StateVector,)):
        return x.amplitudes
    if isinstance(x, (DensityMatrix, Operator)):
        return x.entries
    return np.asarray(x, dtype=complex)


def tensor(a, b):
    """Kronecker product of two same-kind values; `a` is the slow index."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        labels = tuple(f"{la}{lb}" for la in a.labels for lb in b.labels)
        return StateVector(np.kron(a.amplitudes, b.amplitudes), labels=labels)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.entries, b.entries))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries))
    raise TypeError("tensor requires two values of the same kind")


def operator_fidelity(u, v):
    """Global-phase-insensitive overlap |Tr(U^dag V)| / d in [0, 1].

    Inputs are expected to be unitary or near-unitary (for example a qubit
    block of a larger unitary, where leakage makes the block slightly
    subunitary); grossly non-unitary inputs are rejected.
    """
    mu, mv = _raw(u), _raw(v)
    if mu.shape != mv.shape:
        raise ValueError(f"dimension mismatch: {mu.shape} vs {mv.shape}")
    d = mu.shape[0]
    eye = np.eye(d)
    for m in (mu, mv):
        if np.linalg.norm(m.conj().T @ m - eye) > 0.2:
            raise ValueError("operator_fidelity expects (near-)unitary inputs")
    return min(1.0, abs(np.trace(mu.conj().T @ mv)) / d)


def _psd_sqrt(mat):
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def state_fidelity(rho, sigma):
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    For pure sigma = |psi><psi| this reduces to <psi|rho|psi>.
    """
    r, s = _raw(rho), _raw(sigma)
    if r.shape != s.shape:
        raise ValueError("dimension mismatch")
    for m in (r, s):
        if np.linalg.eigvalsh(m).min() < -1e-8:
            raise ValueError("state_fidelity requires positive semidefinite inputs")
    sr = _psd_sqrt(r)
    inner = _psd_sqrt(sr @ s @ sr)
    f = np.trace(inner).real ** 2
    return float(min(1.0, max(0.0, f)))


def pauli_decompose(m):
    """Coefficients c with M = sum_k c_k P_k over {I, X, Y, Z}."""
    mat = _raw(m)
    if mat.shape != (2, 2):
        raise ValueError("pauli_decompose requires a 2x2 matrix")
    return np.array([np.trace(p @ mat) / 2.0 for p in PAULIS])


def pauli_reconstruct(coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    return sum(c * p for c, p in zip(coeffs, PAULIS))


def partial_trace(rho, dims, keep):
    """Trace out one factor of a bipartite state.

    dims is (dim_A, dim_B) with A the slow Kronecker index; keep selects the
    remaining subsystem, 0/"A" or 1/"B".
    """
    mat = _raw(rho)
    da, db = dims
    if da * db != mat.shape[0]:
        raise ValueError(f"dims {dims} do not factor dimension {mat.shape[0]}")
    keep = {"A": 0, "B": 1, 0: 0, 1: 1}.get(keep)
    if keep is None:
        raise ValueError("keep must be 0/'A' or 1/'B'")
    t = mat.reshape(da, db, da, db)
    reduced = np.einsum("ijkj->ik", t) if keep == 0 else np.einsum("ijil->jl", t)
    return DensityMatrix(reduced)
