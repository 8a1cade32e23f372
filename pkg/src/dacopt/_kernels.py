"""Hot inner loops with a numba path and a pure-numpy fallback.

Set ``DACOPT_DISABLE_NUMBA=1`` to force the numpy implementations (also used
automatically when numba cannot be imported). The descent kernels perform the
same floating-point operations in the same order on both paths, so their
results are bit-identical. The Monte Carlo error power is a dense matrix
product, which BLAS does faster than a compiled loop, so it has one
implementation.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("DACOPT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by DACOPT_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED

# chunk size for the numpy error-power path, bounds peak memory
_MC_CHUNK = 4096


# ---------------------------------------------------------------------------
# coordinate descent over representation sets
# ---------------------------------------------------------------------------

def _initial_means_numpy(weights, probs, masks, choice):
    L = weights.size
    shifts = np.arange(L, dtype=np.int64)
    means = np.zeros(L)
    for x in range(probs.size):
        bits = (masks[choice[x]] >> shifts) & 1
        means = means + probs[x] * bits
    return means


def _objective_numpy(weights, means):
    obj = 0.0
    for i in range(weights.size):
        obj += weights[i] * means[i] * (1.0 - means[i])
    return obj


def descend_numpy(weights, probs, offsets, masks, choice, max_sweeps, tol):
    """Numpy reference for :func:`descend`; see that function for the contract."""
    L = weights.size
    shifts = np.arange(L, dtype=np.int64)
    choice = choice.copy()
    means = _initial_means_numpy(weights, probs, masks, choice)
    trace = np.empty(max_sweeps + 1)
    changes = np.zeros(max_sweeps, dtype=np.int64)
    trace[0] = _objective_numpy(weights, means)
    n_sweeps = 0
    for sweep in range(max_sweeps):
        n_changed = 0
        for y in range(probs.size):
            p = probs[y]
            lo, hi = offsets[y], offsets[y + 1]
            if p == 0.0 or hi - lo < 2:
                continue
            cur_bits = (masks[choice[y]] >> shifts) & 1
            cand_bits = (masks[lo:hi, None] >> shifts[None, :]) & 1
            m = means[None, :] + p * (cand_bits - cur_bits[None, :])
            obj = np.zeros(hi - lo)
            for i in range(L):
                obj = obj + weights[i] * m[:, i] * (1.0 - m[:, i])
            best_k = choice[y]
            best = obj[best_k - lo]
            for j in range(hi - lo):
                if lo + j != choice[y] and obj[j] < best - tol:
                    best = obj[j]
                    best_k = lo + j
            if best_k != choice[y]:
                new_bits = cand_bits[best_k - lo]
                means = means + p * (new_bits - cur_bits)
                choice[y] = best_k
                n_changed += 1
        n_sweeps = sweep + 1
        changes[sweep] = n_changed
        trace[sweep + 1] = _objective_numpy(weights, means)
        if n_changed == 0:
            break
    return choice, means, trace[: n_sweeps + 1], changes[:n_sweeps]


def error_power(centered, probs, deltas):
    """Per-realization error power ``sum_x P(x) * (centered[x] . delta)^2``."""
    centered = np.ascontiguousarray(centered, dtype=np.float64)
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    deltas = np.ascontiguousarray(deltas, dtype=np.float64)
    out = np.empty(deltas.shape[0])
    for start in range(0, deltas.shape[0], _MC_CHUNK):
        block = deltas[start:start + _MC_CHUNK]
        err = block @ centered.T
        out[start:start + block.shape[0]] = (err * err) @ probs
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _objective_nb(weights, means):
        obj = 0.0
        for i in range(weights.size):
            obj += weights[i] * means[i] * (1.0 - means[i])
        return obj

    @njit(cache=True)
    def descend_numba(weights, probs, offsets, masks, choice, max_sweeps, tol):
        L = weights.size
        choice = choice.copy()
        means = np.zeros(L)
        for x in range(probs.size):
            cur = masks[choice[x]]
            for i in range(L):
                means[i] = means[i] + probs[x] * ((cur >> i) & 1)
        trace = np.empty(max_sweeps + 1)
        changes = np.zeros(max_sweeps, dtype=np.int64)
        trace[0] = _objective_nb(weights, means)
        n_sweeps = 0
        for sweep in range(max_sweeps):
            n_changed = 0
            for y in range(probs.size):
                p = probs[y]
                lo = offsets[y]
                hi = offsets[y + 1]
                if p == 0.0 or hi - lo < 2:
                    continue
                cur = masks[choice[y]]
                best_k = choice[y]
                best = _objective_nb(weights, means)
                for k in range(lo, hi):
                    if k == choice[y]:
                        continue
                    cand = masks[k]
                    obj = 0.0
                    for i in range(L):
                        m = means[i] + p * (((cand >> i) & 1) - ((cur >> i) & 1))
                        obj += weights[i] * m * (1.0 - m)
                    if obj < best - tol:
                        best = obj
                        best_k = k
                if best_k != choice[y]:
                    new = masks[best_k]
                    for i in range(L):
                        means[i] = means[i] + p * (((new >> i) & 1) - ((cur >> i) & 1))
                    choice[y] = best_k
                    n_changed += 1
            n_sweeps = sweep + 1
            changes[sweep] = n_changed
            trace[sweep + 1] = _objective_nb(weights, means)
            if n_changed == 0:
                break
        return choice, means, trace[: n_sweeps + 1], changes[:n_sweeps]

else:  # pragma: no cover - exercised only without numba
    descend_numba = None


def descend(weights, probs, offsets, masks, choice, max_sweeps, tol):
    """Run coordinate-descent sweeps over representation choices.

    Args:
        weights: float64 basis weights, length L.
        probs: float64 input pmf, length 2^N.
        offsets: int64 CSR offsets into ``masks``, length 2^N + 1.
        masks: int64 subset masks bucketed by codeword, ascending within a bucket.
        choice: int64 index into ``masks`` of the current row for each codeword.
        max_sweeps: sweep budget.
        tol: minimum objective decrease for a move to be accepted.

    Returns:
        ``(choice, means, trace, changes)``: final choices, activation means,
        objective before sweep 1 and after every sweep, changed rows per sweep.
    """
    args = (
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(probs, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(masks, dtype=np.int64),
        np.ascontiguousarray(choice, dtype=np.int64),
        int(max_sweeps),
        float(tol),
    )
    if USE_NUMBA:
        return descend_numba(*args)
    return descend_numpy(*args)
