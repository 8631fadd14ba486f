"""numba versions of the kernels in :mod:`opconvex._kernels`.

Kept at module level so numba can reuse its on-disk cache across processes.
Importing this module fails with ImportError when numba is missing.
"""
import math

import numpy as np
from numba import njit

from ._codes import (
    DECREASING_MIXTURE,
    LOG,
    MONOTONE_MIXTURE,
    NEG_INVERSE,
    NEG_RESOLVENT,
    POWER,
    RESOLVENT,
)


@njit(cache=True)
def scalar(x, code, params):
    if code == POWER:
        return x ** params[0]
    if code == LOG:
        return math.log(x) if x > 0.0 else math.nan
    if code == NEG_INVERSE:
        return -1.0 / x
    if code == RESOLVENT:
        return 1.0 / (params[0] + x)
    if code == NEG_RESOLVENT:
        return -1.0 / (params[0] + x)
    if code == MONOTONE_MIXTURE:
        acc = params[0] + params[1] * x
        for j in range(2, params.shape[0], 2):
            acc += params[j] * x / (params[j + 1] + x)
        return acc
    if code == DECREASING_MIXTURE:
        acc = params[0]
        for j in range(1, params.shape[0], 2):
            acc += params[j] / (params[j + 1] + x)
        return acc
    return math.nan

@njit(cache=True)
def eval_scalar(x, code, params):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = scalar(x[i], code, params)
    return out

@njit(cache=True)
def eigh(H):
    return np.linalg.eigh(H)

@njit(cache=True)
def eigvalsh(H):
    return np.linalg.eigvalsh(H)

@njit(cache=True)
def spectral_apply(H, code, params):
    w, V = np.linalg.eigh(H)
    n = w.shape[0]
    W = np.empty_like(V)
    for j in range(n):
        fj = scalar(w[j], code, params)
        for i in range(n):
            W[i, j] = V[i, j] * fj
    out = W @ V.conj().T
    res = np.empty_like(out)
    for i in range(n):
        for j in range(n):
            res[i, j] = 0.5 * (out[i, j] + np.conj(out[j, i]))
    return res, w[0]

@njit(cache=True)
def loewner_margins(A, B):
    d = np.linalg.eigvalsh(B - A)
    wa = np.linalg.eigvalsh(A)
    wb = np.linalg.eigvalsh(B)
    scale = max(abs(wa[0]), abs(wa[-1]), abs(wb[0]), abs(wb[-1]))
    return d[0], -d[-1], scale

@njit(cache=True)
def congruence_sum(X, Ks):
    dout = Ks.shape[2]
    out = np.zeros((dout, dout), dtype=np.complex128)
    for k in range(Ks.shape[0]):
        K = np.ascontiguousarray(Ks[k])
        out += K.conj().T @ X @ K
    res = np.empty_like(out)
    for i in range(dout):
        for j in range(dout):
            res[i, j] = 0.5 * (out[i, j] + np.conj(out[j, i]))
    return res
