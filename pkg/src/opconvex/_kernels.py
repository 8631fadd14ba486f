"""Hot numeric kernels for small dense Hermitian matrices.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics. The active backend is chosen at import
time; set ``OPCONVEX_DISABLE_NUMBA=1`` to force the numpy path (also used
automatically when numba is not importable).

Scalar functions are passed to the kernels as an integer code plus a flat
float64 parameter vector, see :func:`opconvex.funcalc.ScalarFunctionSpec.kernel_args`.
"""
import os
from types import SimpleNamespace

import numpy as np

from ._codes import (  # noqa: F401
    DECREASING_MIXTURE,
    LOG,
    MONOTONE_MIXTURE,
    NEG_INVERSE,
    NEG_RESOLVENT,
    POWER,
    RESOLVENT,
)


# ---------------------------------------------------------------------------
# pure numpy backend
# ---------------------------------------------------------------------------

def _np_eval(x, code, params):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        if code == POWER:
            return np.power(x, params[0])
        if code == LOG:
            return np.log(x)
        if code == NEG_INVERSE:
            return -1.0 / x
        if code == RESOLVENT:
            return 1.0 / (params[0] + x)
        if code == NEG_RESOLVENT:
            return -1.0 / (params[0] + x)
        if code == MONOTONE_MIXTURE:
            out = params[0] + params[1] * x
            for j in range(2, params.shape[0], 2):
                out = out + params[j] * x / (params[j + 1] + x)
            return out
        if code == DECREASING_MIXTURE:
            out = np.full_like(x, params[0])
            for j in range(1, params.shape[0], 2):
                out = out + params[j] / (params[j + 1] + x)
            return out
    raise ValueError(f"unknown function code {code}")


def _np_eigh(H):
    return np.linalg.eigh(H)


def _np_eigvalsh(H):
    return np.linalg.eigvalsh(H)


def _np_spectral_apply(H, code, params):
    w, V = np.linalg.eigh(H)
    fw = _np_eval(w, code, params)
    out = (V * fw) @ V.conj().T
    out = 0.5 * (out + out.conj().T)
    return out, w[0]


def _np_loewner_margins(A, B):
    d = np.linalg.eigvalsh(B - A)
    wa = np.linalg.eigvalsh(A)
    wb = np.linalg.eigvalsh(B)
    scale = max(abs(wa[0]), abs(wa[-1]), abs(wb[0]), abs(wb[-1]))
    return d[0], -d[-1], scale


def _np_congruence_sum(X, Ks):
    # Ks has shape (k, in_dim, out_dim); returns sum_i K_i^* X K_i
    out = (Ks.conj().transpose(0, 2, 1) @ X @ Ks).sum(axis=0)
    return 0.5 * (out + out.conj().T)


numpy_backend = SimpleNamespace(
    name="numpy",
    eval_scalar=_np_eval,
    eigh=_np_eigh,
    eigvalsh=_np_eigvalsh,
    spectral_apply=_np_spectral_apply,
    loewner_margins=_np_loewner_margins,
    congruence_sum=_np_congruence_sum,
)


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

def _build_numba_backend():
    from . import _numba_kernels as nk

    def _spectral_apply(H, code, params):
        return nk.spectral_apply(np.ascontiguousarray(H, dtype=np.complex128), code, params)

    def _eigh(H):
        return nk.eigh(np.ascontiguousarray(H, dtype=np.complex128))

    def _eigvalsh(H):
        return nk.eigvalsh(np.ascontiguousarray(H, dtype=np.complex128))

    def _loewner_margins(A, B):
        return nk.loewner_margins(
            np.ascontiguousarray(A, dtype=np.complex128),
            np.ascontiguousarray(B, dtype=np.complex128),
        )

    def _congruence_sum(X, Ks):
        return nk.congruence_sum(
            np.ascontiguousarray(X, dtype=np.complex128),
            np.ascontiguousarray(Ks, dtype=np.complex128),
        )

    def _eval_scalar(x, code, params):
        x = np.asarray(x, dtype=np.float64)
        return nk.eval_scalar(x.ravel(), code, params).reshape(x.shape)

    return SimpleNamespace(
        name="numba",
        eval_scalar=_eval_scalar,
        eigh=_eigh,
        eigvalsh=_eigvalsh,
        spectral_apply=_spectral_apply,
        loewner_margins=_loewner_margins,
        congruence_sum=_congruence_sum,
    )


def _numba_disabled():
    return os.environ.get("OPCONVEX_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


try:
    numba_backend = _build_numba_backend()
except ImportError:
    numba_backend = None

if numba_backend is None or _numba_disabled():
    active = numpy_backend
else:
    active = numba_backend

USING_NUMBA = active is numba_backend
