"""Hot inner loops: exhaustive polynomial evaluation and statevector updates.

Every kernel exists twice: a loop version compiled by numba (``*_jit``) and a
vectorised numpy version (``*_numpy``).  The un-suffixed names are bound to
the jitted variant when numba is enabled and to the numpy variant otherwise;
both produce bitwise-identical results.

Statevectors are stored as a C-contiguous ``(2**n, 2**m)`` complex128 array:
row index = key-register basis state (bit ``j`` is variable ``x_j``), column
index = value-register integer (most-significant bit is the sign qubit).
"""
from __future__ import annotations

import numpy as np

from ._jit import NUMBA_AVAILABLE, njit

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


# --------------------------------------------------------------------------
# exhaustive evaluation


def eval_all_numpy(num_vars, pos_masks, neg_masks, coeffs, constant):
    xs = np.arange(1 << num_vars, dtype=np.int64)
    out = np.full(xs.shape, constant, dtype=np.int64)
    for pos, neg, c in zip(pos_masks.tolist(), neg_masks.tolist(), coeffs.tolist()):
        hit = (xs & pos) == pos
        if neg:
            hit &= (xs & neg) == 0
        out[hit] += c
    return out


@njit
def eval_all_jit(num_vars, pos_masks, neg_masks, coeffs, constant):
    size = 1 << num_vars
    out = np.empty(size, dtype=np.int64)
    nterms = coeffs.shape[0]
    for x in range(size):
        acc = constant
        for t in range(nterms):
            if (x & pos_masks[t]) == pos_masks[t] and (x & neg_masks[t]) == 0:
                acc += coeffs[t]
        out[x] = acc
    return out


# --------------------------------------------------------------------------
# statevector updates (all in place)


def hadamard_rows_numpy(state, bit):
    k, mdim = state.shape
    view = state.reshape(k // (2 * bit), 2, bit, mdim)
    lo = view[:, 0].copy()
    hi = view[:, 1]
    view[:, 0] = (lo + hi) * _INV_SQRT2
    view[:, 1] = (lo - hi) * _INV_SQRT2


@njit
def hadamard_rows_jit(state, bit):
    k, mdim = state.shape
    for a in range(k):
        if a & bit:
            continue
        b = a | bit
        for v in range(mdim):
            lo = state[a, v]
            hi = state[b, v]
            state[a, v] = (lo + hi) * _INV_SQRT2
            state[b, v] = (lo - hi) * _INV_SQRT2


def hadamard_cols_numpy(state, bit):
    k, mdim = state.shape
    view = state.reshape(k, mdim // (2 * bit), 2, bit)
    lo = view[:, :, 0].copy()
    hi = view[:, :, 1]
    view[:, :, 0] = (lo + hi) * _INV_SQRT2
    view[:, :, 1] = (lo - hi) * _INV_SQRT2


@njit
def hadamard_cols_jit(state, bit):
    k, mdim = state.shape
    for a in range(k):
        for v in range(mdim):
            if v & bit:
                continue
            w = v | bit
            lo = state[a, v]
            hi = state[a, w]
            state[a, v] = (lo + hi) * _INV_SQRT2
            state[a, w] = (lo - hi) * _INV_SQRT2


def flip_rows_numpy(state, bit):
    k, mdim = state.shape
    view = state.reshape(k // (2 * bit), 2, bit, mdim)
    view[:] = view[:, ::-1].copy()


@njit
def flip_rows_jit(state, bit):
    k, mdim = state.shape
    for a in range(k):
        if a & bit:
            continue
        b = a | bit
        for v in range(mdim):
            tmp = state[a, v]
            state[a, v] = state[b, v]
            state[b, v] = tmp


def flip_cols_numpy(state, bit):
    k, mdim = state.shape
    view = state.reshape(k, mdim // (2 * bit), 2, bit)
    view[:] = view[:, :, ::-1].copy()


@njit
def flip_cols_jit(state, bit):
    k, mdim = state.shape
    for a in range(k):
        for v in range(mdim):
            if v & bit:
                continue
            w = v | bit
            tmp = state[a, v]
            state[a, v] = state[a, w]
            state[a, w] = tmp


def phase_rows_numpy(state, mask, phases):
    rows = np.arange(state.shape[0], dtype=np.int64)
    sel = np.flatnonzero((rows & mask) == mask)
    state[sel] *= phases


@njit
def phase_rows_jit(state, mask, phases):
    k, mdim = state.shape
    for a in range(k):
        if (a & mask) == mask:
            for v in range(mdim):
                state[a, v] *= phases[v]


if NUMBA_AVAILABLE:
    eval_all = eval_all_jit
    hadamard_rows = hadamard_rows_jit
    hadamard_cols = hadamard_cols_jit
    flip_rows = flip_rows_jit
    flip_cols = flip_cols_jit
    phase_rows = phase_rows_jit
else:
    eval_all = eval_all_numpy
    hadamard_rows = hadamard_rows_numpy
    hadamard_cols = hadamard_cols_numpy
    flip_rows = flip_rows_numpy
    flip_cols = flip_cols_numpy
    phase_rows = phase_rows_numpy
