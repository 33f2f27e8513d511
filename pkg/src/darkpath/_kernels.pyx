# cython: language_level=3
"""Compiled propagation kernels.

Same contract as `_kernels_py`: batched Hermitian exponentials via LAPACK
zheev, ordered products of step unitaries, and the split-step Lindblad
update.  `_engine` selects this module when the build produced it.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sin
from scipy.linalg.cython_lapack cimport zheev

BACKEND_NAME = "compiled"


cdef inline void _matmul(double complex *c, double complex *a,
                         double complex *b, int d) noexcept nogil:
    # c = a @ b, row-major d x d; c must not alias a or b
    cdef int i, j, k
    cdef double complex s
    for i in range(d):
        for j in range(d):
            s = 0
            for k in range(d):
                s = s + a[i * d + k] * b[k * d + j]
            c[i * d + j] = s


cdef inline void _matmul_ct(double complex *c, double complex *a,
                            double complex *b, int d) noexcept nogil:
    # c = a @ b^dagger, row-major d x d; c must not alias a or b
    cdef int i, j, k
    cdef double complex s
    for i in range(d):
        for j in range(d):
            s = 0
            for k in range(d):
                s = s + a[i * d + k] * b[j * d + k].conjugate()
            c[i * d + j] = s


@cython.boundscheck(False)
@cython.wraparound(False)
def expi_herm(mats, double factor):
    """exp(1j * factor * H) for a stack of Hermitian matrices (m, d, d)."""
    a_np = np.array(mats, dtype=np.complex128, order="C", copy=True)
    if a_np.ndim != 3 or a_np.shape[1] != a_np.shape[2]:
        raise ValueError("expected a stack of square matrices")
    cdef double complex[:, :, ::1] a = a_np
    cdef int m = a.shape[0]
    cdef int d = a.shape[1]
    out_np = np.zeros((m, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_np
    if m == 0:
        return out_np

    cdef double[::1] w = np.empty(d, dtype=np.float64)
    cdef double[::1] rwork = np.empty(max(1, 3 * d - 2), dtype=np.float64)
    cdef char jobz = b"V"
    cdef char uplo = b"L"
    cdef int n = d, lda = d, info = 0, lwork = -1
    cdef double complex wkopt

    # workspace query on the first matrix
    zheev(&jobz, &uplo, &n, &a[0, 0, 0], &lda, &w[0], &wkopt, &lwork,
          &rwork[0], &info)
    if info != 0:
        raise RuntimeError(f"zheev workspace query failed (info={info})")
    lwork = max(2 * d - 1, <int>wkopt.real)
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)

    # A C-order Hermitian H reads column-major as conj(H), whose eigenvector
    # columns a_k satisfy H conj(a_k) = w_k conj(a_k); hence
    # U[r, c] = sum_k conj(a_k[r]) e^{i f w_k} a_k[c] with a_k[r] = a[i, k, r].
    cdef int i, k, r, c, bad = 0
    cdef double x
    cdef double complex ph, t
    with nogil:
        for i in range(m):
            zheev(&jobz, &uplo, &n, &a[i, 0, 0], &lda, &w[0], &work[0],
                  &lwork, &rwork[0], &info)
            if info != 0:
                bad = info
                break
            for k in range(d):
                x = factor * w[k]
                ph = cos(x) + 1j * sin(x)
                for r in range(d):
                    t = a[i, k, r].conjugate() * ph
                    for c in range(d):
                        out[i, r, c] = out[i, r, c] + t * a[i, k, c]
    if bad != 0:
        raise RuntimeError(f"zheev failed to converge (info={bad})")
    return out_np


@cython.boundscheck(False)
@cython.wraparound(False)
def chain(mats):
    """Ordered product mats[m-1] @ ... @ mats[0]."""
    m_np = np.ascontiguousarray(mats, dtype=np.complex128)
    if m_np.ndim != 3 or m_np.shape[1] != m_np.shape[2]:
        raise ValueError("expected a stack of square matrices")
    cdef double complex[:, :, ::1] ms = m_np
    cdef int n = ms.shape[0]
    cdef int d = ms.shape[1]
    if n == 0:
        return np.eye(d, dtype=np.complex128)
    acc_np = np.array(m_np[0], copy=True)
    tmp_np = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] acc = acc_np
    cdef double complex[:, ::1] tmp = tmp_np
    cdef int k
    with nogil:
        for k in range(1, n):
            _matmul(&tmp[0, 0], &ms[k, 0, 0], &acc[0, 0], d)
            acc[:, :] = tmp
    return acc_np


@cython.boundscheck(False)
@cython.wraparound(False)
def chain_states(mats, psi0):
    """States after each factor: out[k] = mats[k-1] @ ... @ mats[0] @ psi0."""
    m_np = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef double complex[:, :, ::1] ms = m_np
    cdef int n = ms.shape[0]
    cdef int d = ms.shape[1]
    out_np = np.empty((n + 1, d), dtype=np.complex128)
    out_np[0] = np.asarray(psi0, dtype=np.complex128)
    cdef double complex[:, ::1] out = out_np
    cdef int k, i, j
    cdef double complex s
    with nogil:
        for k in range(n):
            for i in range(d):
                s = 0
                for j in range(d):
                    s = s + ms[k, i, j] * out[k, j]
                out[k + 1, i] = s
    return out_np


@cython.boundscheck(False)
@cython.wraparound(False)
def chain_prefix(mats, every):
    """Cumulative products sampled every `every` factors (includes identity)."""
    m_np = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef double complex[:, :, ::1] ms = m_np
    cdef int n = ms.shape[0]
    cdef int d = ms.shape[1]
    cdef int ev = every
    if n % ev:
        raise ValueError("factor count must be a multiple of `every`")
    out_np = np.empty((n // ev + 1, d, d), dtype=np.complex128)
    acc_np = np.eye(d, dtype=np.complex128)
    tmp_np = np.empty((d, d), dtype=np.complex128)
    out_np[0] = acc_np
    cdef double complex[:, :, ::1] out = out_np
    cdef double complex[:, ::1] acc = acc_np
    cdef double complex[:, ::1] tmp = tmp_np
    cdef int k
    with nogil:
        for k in range(n):
            _matmul(&tmp[0, 0], &ms[k, 0, 0], &acc[0, 0], d)
            acc[:, :] = tmp
            if (k + 1) % ev == 0:
                out[(k + 1) // ev, :, :] = acc
    return out_np


@cython.boundscheck(False)
@cython.wraparound(False)
def lindblad_run(step_unitaries, e_half, rhos0, every):
    """Strang-split open-system evolution for a batch of initial states.

    Per step: rho <- E_half(U E_half(rho) U^dag); e_half=None gives purely
    unitary batch propagation.  Checkpoints every `every` steps, including
    the initial state.
    """
    us_np = np.ascontiguousarray(step_unitaries, dtype=np.complex128)
    cdef double complex[:, :, ::1] us = us_np
    cdef int n = us.shape[0]
    cdef int d = us.shape[1]
    cdef int ev = every
    if n % ev:
        raise ValueError("step count must be a multiple of `every`")
    rhos_np = np.array(rhos0, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, :, ::1] rhos = rhos_np
    cdef int batch = rhos.shape[0]
    out_np = np.empty((n // ev + 1, batch, d, d), dtype=np.complex128)
    cdef double complex[:, :, :, ::1] out = out_np
    out_np[0] = rhos_np

    cdef bint with_noise = e_half is not None
    eh_np = np.ascontiguousarray(e_half, dtype=np.complex128) if with_noise \
        else np.empty((0, 0), dtype=np.complex128)
    cdef double complex[:, ::1] eh = eh_np
    cdef int dd = d * d

    tmp_np = np.empty((d, d), dtype=np.complex128)
    vec_np = np.empty(dd, dtype=np.complex128)
    cdef double complex[:, ::1] tmp = tmp_np
    cdef double complex[::1] vec = vec_np

    cdef int k, b, i, j
    cdef double complex s
    with nogil:
        for k in range(n):
            for b in range(batch):
                if with_noise:
                    for i in range(dd):
                        s = 0
                        for j in range(dd):
                            s = s + eh[i, j] * (&rhos[b, 0, 0])[j]
                        vec[i] = s
                    for i in range(dd):
                        (&rhos[b, 0, 0])[i] = vec[i]
                _matmul(&tmp[0, 0], &us[k, 0, 0], &rhos[b, 0, 0], d)
                _matmul_ct(&rhos[b, 0, 0], &tmp[0, 0], &us[k, 0, 0], d)
                if with_noise:
                    for i in range(dd):
                        s = 0
                        for j in range(dd):
                            s = s + eh[i, j] * (&rhos[b, 0, 0])[j]
                        vec[i] = s
                    for i in range(dd):
                        (&rhos[b, 0, 0])[i] = vec[i]
            if (k + 1) % ev == 0:
                out[(k + 1) // ev, :, :, :] = rhos
    return out_np
