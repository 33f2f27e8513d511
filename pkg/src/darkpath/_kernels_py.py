"""Pure-numpy propagation kernels.

Fallback implementation of the hot loops used by the integrators: batched
Hermitian matrix exponentials, ordered products of step unitaries, and the
split-step Lindblad update.  The compiled module `_kernels` exposes the same
functions; `_engine` picks one at import time.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def expi_herm(mats, factor):
    """exp(1j * factor * H) for a stack of Hermitian matrices (m, d, d)."""
    mats = np.ascontiguousarray(mats, dtype=complex)
    w, v = np.linalg.eigh(mats)
    phases = np.exp(1j * factor * w)
    return (v * phases[:, None, :]) @ v.conj().transpose(0, 2, 1)


def chain(mats):
    """Ordered product mats[m-1] @ ... @ mats[0] by pairwise reduction."""
    m = np.ascontiguousarray(mats, dtype=complex)
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    while m.shape[0] > 1:
        if m.shape[0] % 2:
            last = m[-1:]
            m = np.concatenate([m[1:-1:2] @ m[0:-1:2], last])
        else:
            m = m[1::2] @ m[0::2]
    return m[0]


def chain_states(mats, psi0):
    """States after each factor: out[k] = mats[k-1] @ ... @ mats[0] @ psi0."""
    mats = np.asarray(mats, dtype=complex)
    n, d = mats.shape[0], mats.shape[1]
    out = np.empty((n + 1, d), dtype=complex)
    out[0] = psi0
    psi = np.asarray(psi0, dtype=complex)
    for k in range(n):
        psi = mats[k] @ psi
        out[k + 1] = psi
    return out


def chain_prefix(mats, every):
    """Cumulative products sampled every `every` factors (includes identity)."""
    mats = np.asarray(mats, dtype=complex)
    n, d = mats.shape[0], mats.shape[1]
    if n % every:
        raise ValueError("factor count must be a multiple of `every`")
    out = np.empty((n // every + 1, d, d), dtype=complex)
    acc = np.eye(d, dtype=complex)
    out[0] = acc
    for k in range(n):
        acc = mats[k] @ acc
        if (k + 1) % every == 0:
            out[(k + 1) // every] = acc
    return out


def lindblad_run(step_unitaries, e_half, rhos0, every):
    """Strang-split open-system evolution for a batch of initial states.

    Per step: rho <- E_half(U E_half(rho) U^dag), with E_half the exact
    exponential of half a step of the dissipator acting on row-major
    vectorized density matrices.  Pass e_half=None for purely unitary
    propagation of the batch.  Returns checkpoints every `every` steps,
    shape (n_checkpoints, batch, d, d), including the initial state.
    """
    us = np.asarray(step_unitaries, dtype=complex)
    n, d = us.shape[0], us.shape[1]
    if n % every:
        raise ValueError("step count must be a multiple of `every`")
    rhos = np.array(rhos0, dtype=complex)
    batch = rhos.shape[0]
    out = np.empty((n // every + 1, batch, d, d), dtype=complex)
    out[0] = rhos
    eh_t = None if e_half is None else np.ascontiguousarray(e_half.T)
    for k in range(n):
        if eh_t is not None:
            rhos = (rhos.reshape(batch, d * d) @ eh_t).reshape(batch, d, d)
        u = us[k]
        rhos = u @ rhos @ u.conj().T
        if eh_t is not None:
            rhos = (rhos.reshape(batch, d * d) @ eh_t).reshape(batch, d, d)
        if (k + 1) % every == 0:
            out[(k + 1) // every] = rhos
    return out
