# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled gate kernels: dense statevector updates, Pauli expectations, and
the parameter-shift gradient loop.

Same call signatures as the pure NumPy module ``_kernels_py``.  Qubit 0 is
the most significant bit of the basis index.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

ctypedef double complex cplx

DEF K_H = 0
DEF K_RX = 1
DEF K_RY = 2
DEF K_RZ = 3
DEF K_CZ = 4
DEF K_CNOT = 5
DEF K_ZZ = 6


cdef void _apply_1q(cplx* st, int n, int q, cplx u00, cplx u01, cplx u10, cplx u11) nogil:
    cdef int64_t t = n - 1 - q
    cdef int64_t stride = <int64_t>1 << t
    cdef int64_t half = <int64_t>1 << (n - 1)
    cdef int64_t g, i0, i1
    cdef cplx a, b
    for g in range(half):
        i0 = ((g >> t) << (t + 1)) | (g & (stride - 1))
        i1 = i0 | stride
        a = st[i0]
        b = st[i1]
        st[i0] = u00 * a + u01 * b
        st[i1] = u10 * a + u11 * b


cdef void _apply_diag_1q(cplx* st, int n, int q, cplx d0, cplx d1) nogil:
    cdef int64_t t = n - 1 - q
    cdef int64_t stride = <int64_t>1 << t
    cdef int64_t half = <int64_t>1 << (n - 1)
    cdef int64_t g, i0
    for g in range(half):
        i0 = ((g >> t) << (t + 1)) | (g & (stride - 1))
        st[i0] = d0 * st[i0]
        st[i0 | stride] = d1 * st[i0 | stride]


cdef void _apply_cz(cplx* st, int n, int qa, int qb) nogil:
    cdef int64_t ma = <int64_t>1 << (n - 1 - qa)
    cdef int64_t mb = <int64_t>1 << (n - 1 - qb)
    cdef int64_t dim = <int64_t>1 << n
    cdef int64_t i
    for i in range(dim):
        if (i & ma) and (i & mb):
            st[i] = -st[i]


cdef void _apply_cnot(cplx* st, int n, int qc, int qt) nogil:
    cdef int64_t mc = <int64_t>1 << (n - 1 - qc)
    cdef int64_t mt = <int64_t>1 << (n - 1 - qt)
    cdef int64_t dim = <int64_t>1 << n
    cdef int64_t i, j
    cdef cplx tmp
    for i in range(dim):
        if (i & mc) and not (i & mt):
            j = i | mt
            tmp = st[i]
            st[i] = st[j]
            st[j] = tmp


cdef void _apply_zz(cplx* st, int n, int qa, int qb, double angle) nogil:
    cdef int64_t ma = <int64_t>1 << (n - 1 - qa)
    cdef int64_t mb = <int64_t>1 << (n - 1 - qb)
    cdef int64_t dim = <int64_t>1 << n
    cdef int64_t i
    cdef double half = angle / 2.0
    cdef cplx p_eq = cos(half) - 1j * sin(half)
    cdef cplx p_ne = cos(half) + 1j * sin(half)
    cdef bint ba, bb
    for i in range(dim):
        ba = (i & ma) != 0
        bb = (i & mb) != 0
        if ba == bb:
            st[i] = p_eq * st[i]
        else:
            st[i] = p_ne * st[i]


cdef void _apply_gates(
    cplx* st,
    int n,
    Py_ssize_t n_gates,
    const int32_t* kinds,
    const int32_t* q0,
    const int32_t* q1,
    const double* angles,
    const uint8_t* enabled,
) nogil:
    cdef Py_ssize_t g
    cdef int kind
    cdef double c, s, half
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)
    for g in range(n_gates):
        if not enabled[g]:
            continue
        kind = kinds[g]
        if kind == K_H:
            _apply_1q(st, n, q0[g], inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2)
        elif kind == K_RX:
            c = cos(angles[g] / 2.0)
            s = sin(angles[g] / 2.0)
            _apply_1q(st, n, q0[g], c, -1j * s, -1j * s, c)
        elif kind == K_RY:
            c = cos(angles[g] / 2.0)
            s = sin(angles[g] / 2.0)
            _apply_1q(st, n, q0[g], c, -s, s, c)
        elif kind == K_RZ:
            half = angles[g] / 2.0
            _apply_diag_1q(st, n, q0[g], cos(half) - 1j * sin(half), cos(half) + 1j * sin(half))
        elif kind == K_CZ:
            _apply_cz(st, n, q0[g], q1[g])
        elif kind == K_CNOT:
            _apply_cnot(st, n, q0[g], q1[g])
        else:
            _apply_zz(st, n, q0[g], q1[g], angles[g])


cdef double _expect_one(const cplx* st, int64_t dim, int64_t flip, int64_t phase, int ny) nogil:
    cdef cplx acc = 0
    cdef cplx term
    cdef int64_t i
    cdef double re, im
    for i in range(dim):
        term = st[i ^ flip].conjugate() * st[i]
        if __builtin_popcountll(<unsigned long long>(i & phase)) & 1:
            acc = acc - term
        else:
            acc = acc + term
    re = acc.real
    im = acc.imag
    ny = ny & 3
    if ny == 0:
        return re
    elif ny == 1:
        return -im
    elif ny == 2:
        return -re
    return im


cdef void _expect_all(
    const cplx* st,
    int64_t dim,
    Py_ssize_t n_obs,
    const int64_t* flips,
    const int64_t* phases,
    const int32_t* ycounts,
    const double* coeffs,
    double* out,
) nogil:
    cdef Py_ssize_t k
    for k in range(n_obs):
        out[k] = coeffs[k] * _expect_one(st, dim, flips[k], phases[k], ycounts[k])


def apply_circuit_inplace(
    cplx[::1] state,
    int n_qubits,
    int32_t[::1] kinds,
    int32_t[::1] q0,
    int32_t[::1] q1,
    double[::1] angles,
    uint8_t[::1] enabled,
):
    cdef Py_ssize_t n_gates = kinds.shape[0]
    if n_gates == 0:
        return
    with nogil:
        _apply_gates(&state[0], n_qubits, n_gates, &kinds[0], &q0[0], &q1[0], &angles[0], &enabled[0])


def run_circuit(
    int n_qubits,
    int32_t[::1] kinds,
    int32_t[::1] q0,
    int32_t[::1] q1,
    double[::1] angles,
    uint8_t[::1] enabled,
):
    out = np.zeros(1 << n_qubits, dtype=np.complex128)
    cdef cplx[::1] st = out
    st[0] = 1.0
    cdef Py_ssize_t n_gates = kinds.shape[0]
    if n_gates:
        with nogil:
            _apply_gates(&st[0], n_qubits, n_gates, &kinds[0], &q0[0], &q1[0], &angles[0], &enabled[0])
    return out


def expectations(
    cplx[::1] state,
    int n_qubits,
    int64_t[::1] flip_masks,
    int64_t[::1] phase_masks,
    int32_t[::1] y_counts,
    double[::1] coeffs,
):
    cdef Py_ssize_t n_obs = coeffs.shape[0]
    out = np.empty(n_obs, dtype=np.float64)
    cdef double[::1] ov = out
    cdef int64_t dim = <int64_t>1 << n_qubits
    if n_obs:
        with nogil:
            _expect_all(&state[0], dim, n_obs, &flip_masks[0], &phase_masks[0], &y_counts[0], &coeffs[0], &ov[0])
    return out


def parameter_shift(
    int n_qubits,
    int32_t[::1] kinds,
    int32_t[::1] q0,
    int32_t[::1] q1,
    double[::1] angles,
    uint8_t[::1] enabled,
    int32_t[::1] param_idx,
    double[::1] param_mult,
    int n_params,
    int64_t[::1] flip_masks,
    int64_t[::1] phase_masks,
    int32_t[::1] y_counts,
    double[::1] coeffs,
):
    """Gradient of every observable w.r.t. every trainable parameter.

    Returns (grad matrix of shape (n_observables, n_params), executions).
    """
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t n_obs = coeffs.shape[0]
    cdef int64_t dim = <int64_t>1 << n_qubits
    grad = np.zeros((n_obs, n_params), dtype=np.float64)
    cdef double[:, ::1] gv = grad
    work_arr = np.array(angles, dtype=np.float64, copy=True)
    cdef double[::1] work = work_arr
    scratch_arr = np.empty(dim, dtype=np.complex128)
    cdef cplx[::1] scratch = scratch_arr
    ep_arr = np.empty(n_obs, dtype=np.float64)
    em_arr = np.empty(n_obs, dtype=np.float64)
    cdef double[::1] ep = ep_arr
    cdef double[::1] em = em_arr
    cdef Py_ssize_t g, k
    cdef int j
    cdef double base, half_pi = np.pi / 2.0
    cdef int runs = 0
    if n_gates == 0 or n_obs == 0:
        return grad, 0
    with nogil:
        for g in range(n_gates):
            j = param_idx[g]
            if j < 0 or not enabled[g]:
                continue
            base = work[g]

            work[g] = base + half_pi
            for k in range(dim):
                scratch[k] = 0
            scratch[0] = 1.0
            _apply_gates(&scratch[0], n_qubits, n_gates, &kinds[0], &q0[0], &q1[0], &work[0], &enabled[0])
            _expect_all(&scratch[0], dim, n_obs, &flip_masks[0], &phase_masks[0], &y_counts[0], &coeffs[0], &ep[0])

            work[g] = base - half_pi
            for k in range(dim):
                scratch[k] = 0
            scratch[0] = 1.0
            _apply_gates(&scratch[0], n_qubits, n_gates, &kinds[0], &q0[0], &q1[0], &work[0], &enabled[0])
            _expect_all(&scratch[0], dim, n_obs, &flip_masks[0], &phase_masks[0], &y_counts[0], &coeffs[0], &em[0])

            work[g] = base
            runs += 2
            for k in range(n_obs):
                gv[k, j] += param_mult[g] * 0.5 * (ep[k] - em[k])
    return grad, runs
