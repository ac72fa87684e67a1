"""Pure NumPy gate kernels; fallback when the compiled extension is absent.

Same call signatures as the Cython module ``_kernels``.  Gate kinds arrive as
the integer codes from ``gates.KIND_CODES``; qubit 0 is the most significant
bit of the basis index, which makes axis q of the ``(2,)*n`` reshaped state
correspond directly to qubit q.
"""

from __future__ import annotations

import math

import numpy as np

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

K_H, K_RX, K_RY, K_RZ, K_CZ, K_CNOT, K_ZZ = range(7)


def _apply_one(psi: np.ndarray, n: int, kind: int, qa: int, qb: int, angle: float) -> None:
    if kind <= K_RZ:
        sl0 = [slice(None)] * n
        sl1 = [slice(None)] * n
        sl0[qa] = 0
        sl1[qa] = 1
        i0, i1 = tuple(sl0), tuple(sl1)
        a = psi[i0]
        b = psi[i1]
        if kind == K_H:
            na = (a + b) * _INV_SQRT2
            nb = (a - b) * _INV_SQRT2
        elif kind == K_RX:
            c = math.cos(angle / 2.0)
            s = math.sin(angle / 2.0)
            na = c * a - 1j * s * b
            nb = -1j * s * a + c * b
        elif kind == K_RY:
            c = math.cos(angle / 2.0)
            s = math.sin(angle / 2.0)
            na = c * a - s * b
            nb = s * a + c * b
        else:  # K_RZ
            half = angle / 2.0
            na = a * complex(math.cos(half), -math.sin(half))
            nb = b * complex(math.cos(half), math.sin(half))
        psi[i0] = na
        psi[i1] = nb
        return

    sl = [slice(None)] * n
    if kind == K_CZ:
        sl[qa] = 1
        sl[qb] = 1
        psi[tuple(sl)] *= -1.0
    elif kind == K_CNOT:
        sl[qa] = 1
        sl[qb] = 0
        i0 = tuple(sl)
        sl[qb] = 1
        i1 = tuple(sl)
        tmp = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = tmp
    else:  # K_ZZ: exp(-i angle/2 Z@Z), phase by parity of the two bits
        half = angle / 2.0
        p_eq = complex(math.cos(half), -math.sin(half))
        p_ne = complex(math.cos(half), math.sin(half))
        for va in (0, 1):
            for vb in (0, 1):
                sl[qa] = va
                sl[qb] = vb
                psi[tuple(sl)] *= p_eq if va == vb else p_ne


def apply_circuit_inplace(state, n_qubits, kinds, q0, q1, angles, enabled) -> None:
    psi = state.reshape((2,) * n_qubits)
    for g in range(len(kinds)):
        if enabled[g]:
            _apply_one(psi, n_qubits, int(kinds[g]), int(q0[g]), int(q1[g]), float(angles[g]))


def run_circuit(n_qubits, kinds, q0, q1, angles, enabled) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=np.complex128)
    state[0] = 1.0
    apply_circuit_inplace(state, n_qubits, kinds, q0, q1, angles, enabled)
    return state


def expectations(state, n_qubits, flip_masks, phase_masks, y_counts, coeffs) -> np.ndarray:
    dim = state.size
    idx = np.arange(dim, dtype=np.uint64)
    out = np.empty(len(coeffs), dtype=np.float64)
    probs = None
    for k in range(len(coeffs)):
        flip = int(flip_masks[k])
        phase = int(phase_masks[k])
        if phase:
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(phase)) & np.uint64(1)).astype(np.float64)
        else:
            signs = None
        if flip == 0:
            if probs is None:
                probs = np.abs(state) ** 2
            acc = complex(np.sum(probs * signs) if signs is not None else np.sum(probs))
        else:
            bra = np.conj(state[idx ^ np.uint64(flip)])
            terms = bra * state
            acc = complex(np.sum(terms * signs) if signs is not None else np.sum(terms))
        acc *= 1j ** int(y_counts[k])
        out[k] = coeffs[k] * acc.real
    return out


def parameter_shift(
    n_qubits,
    kinds,
    q0,
    q1,
    angles,
    enabled,
    param_idx,
    param_mult,
    n_params,
    flip_masks,
    phase_masks,
    y_counts,
    coeffs,
):
    """Gradient of every observable w.r.t. every trainable parameter.

    Returns (grad matrix of shape (n_observables, n_params), executions).
    Each trainable gate occurrence costs two circuit runs, shifted by +-pi/2
    in the resolved gate angle and weighted by the chain-rule multiplier.
    """
    n_obs = len(coeffs)
    grad = np.zeros((n_obs, n_params), dtype=np.float64)
    work = np.array(angles, dtype=np.float64, copy=True)
    runs = 0
    for g in range(len(kinds)):
        j = int(param_idx[g])
        if j < 0 or not enabled[g]:
            continue
        base = work[g]
        work[g] = base + math.pi / 2.0
        sp = run_circuit(n_qubits, kinds, q0, q1, work, enabled)
        ep = expectations(sp, n_qubits, flip_masks, phase_masks, y_counts, coeffs)
        work[g] = base - math.pi / 2.0
        sm = run_circuit(n_qubits, kinds, q0, q1, work, enabled)
        em = expectations(sm, n_qubits, flip_masks, phase_masks, y_counts, coeffs)
        work[g] = base
        runs += 2
        grad[:, j] += param_mult[g] * 0.5 * (ep - em)
    return grad, runs
