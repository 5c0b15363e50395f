"""Hot numeric kernels, each with a numba path and a pure-numpy path.

Both implementations are always importable (``*_numba`` / ``*_numpy``) so they
can be cross-checked and benchmarked; the unsuffixed names are bound to the
backend chosen in :mod:`meanspin._accel`.

Index convention: qubit ``q`` of an ``n``-qubit register sits at bit
``n - 1 - q`` of the amplitude index (qubit 0 is the most significant bit).
"""

import numpy as np

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# gate application
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _apply_unitary_nb(state, mat, shifts):
    k = shifts.shape[0]
    dim = 1 << k
    mask = 0
    for j in range(k):
        mask |= 1 << shifts[j]
    offsets = np.zeros(dim, dtype=np.int64)
    for a in range(dim):
        off = 0
        for j in range(k):
            if (a >> (k - 1 - j)) & 1:
                off |= 1 << shifts[j]
        offsets[a] = off
    out = state.copy()
    buf = np.empty(dim, dtype=np.complex128)
    for base in range(state.shape[0]):
        if base & mask:
            continue
        for a in range(dim):
            buf[a] = state[base | offsets[a]]
        for r in range(dim):
            acc = 0j
            for c in range(dim):
                acc += mat[r, c] * buf[c]
            out[base | offsets[r]] = acc
    return out


def apply_unitary_numba(state, mat, qubits, n):
    shifts = np.array([n - 1 - q for q in qubits], dtype=np.int64)
    return _apply_unitary_nb(
        np.ascontiguousarray(state, dtype=np.complex128),
        np.ascontiguousarray(mat, dtype=np.complex128),
        shifts,
    )


def apply_unitary_numpy(state, mat, qubits, n):
    k = len(qubits)
    psi = np.asarray(state, dtype=np.complex128).reshape((2,) * n)
    gate = np.asarray(mat, dtype=np.complex128).reshape((2,) * (2 * k))
    psi = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return np.ascontiguousarray(psi).reshape(-1)


# ---------------------------------------------------------------------------
# marginal probabilities
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _marginal_nb(probs, shifts):
    m = shifts.shape[0]
    out = np.zeros(1 << m, dtype=np.float64)
    for i in range(probs.shape[0]):
        idx = 0
        for j in range(m):
            idx = (idx << 1) | ((i >> shifts[j]) & 1)
        out[idx] += probs[i]
    return out


def marginal_probabilities_numba(probs, qubits, n):
    shifts = np.array([n - 1 - q for q in qubits], dtype=np.int64)
    return _marginal_nb(np.ascontiguousarray(probs, dtype=np.float64), shifts)


def marginal_probabilities_numpy(probs, qubits, n):
    qubits = list(qubits)
    arr = np.asarray(probs, dtype=np.float64).reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in qubits)
    if others:
        arr = arr.sum(axis=others)
    kept = sorted(qubits)
    arr = np.transpose(arr, [kept.index(q) for q in qubits])
    return np.ascontiguousarray(arr).reshape(-1)


# ---------------------------------------------------------------------------
# inverse-CDF sampling and readout flips
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _inverse_cdf_nb(cdf, uniforms):
    out = np.empty(uniforms.shape[0], dtype=np.int64)
    last = cdf.shape[0] - 1
    for s in range(uniforms.shape[0]):
        u = uniforms[s]
        lo = 0
        hi = cdf.shape[0]
        # first index with cdf[idx] > u (searchsorted side="right")
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] <= u:
                lo = mid + 1
            else:
                hi = mid
        out[s] = lo if lo <= last else last
    return out


def inverse_cdf_numba(cdf, uniforms):
    return _inverse_cdf_nb(
        np.ascontiguousarray(cdf, dtype=np.float64),
        np.ascontiguousarray(uniforms, dtype=np.float64),
    )


def inverse_cdf_numpy(cdf, uniforms):
    idx = np.searchsorted(cdf, uniforms, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.int64)


@njit(cache=True, nogil=True)
def _readout_flips_nb(outcomes, flip_probs, uniforms):
    m = flip_probs.shape[0]
    out = outcomes.copy()
    for s in range(outcomes.shape[0]):
        for j in range(m):
            if uniforms[s, j] < flip_probs[j]:
                out[s] ^= 1 << (m - 1 - j)
    return out


def readout_flips_numba(outcomes, flip_probs, uniforms):
    return _readout_flips_nb(
        np.ascontiguousarray(outcomes, dtype=np.int64),
        np.ascontiguousarray(flip_probs, dtype=np.float64),
        np.ascontiguousarray(uniforms, dtype=np.float64),
    )


def readout_flips_numpy(outcomes, flip_probs, uniforms):
    m = len(flip_probs)
    flips = (np.asarray(uniforms) < np.asarray(flip_probs)[None, :]).astype(np.int64)
    weights = np.left_shift(1, np.arange(m - 1, -1, -1, dtype=np.int64))
    return np.bitwise_xor(np.asarray(outcomes, dtype=np.int64), flips @ weights)


if USE_NUMBA:
    apply_unitary = apply_unitary_numba
    marginal_probabilities = marginal_probabilities_numba
    inverse_cdf = inverse_cdf_numba
    readout_flips = readout_flips_numba
else:
    apply_unitary = apply_unitary_numpy
    marginal_probabilities = marginal_probabilities_numpy
    inverse_cdf = inverse_cdf_numpy
    readout_flips = readout_flips_numpy
