"""Arithmetic, harmonic and geometric means of positive definite matrices."""
import numpy as np

from .core import as_matrix, check_same_dim, eigh, loewner_compare, LOEWNER_TOL
from .errors import SelfCheckError, UnknownMeanError
from .funcalc import SQRT, apply, invm

HARMONIC_SELFCHECK_TOL = 1e-10
GEOMETRIC_SELFCHECK_TOL = 1e-9

MEAN_NAMES = ("arithmetic", "harmonic", "geometric")


def _herm(M):
    return 0.5 * (M + M.conj().T)


def _maxabs(*mats):
    return max(float(np.max(np.abs(M))) for M in mats)


def arithmetic_mean(X, Y):
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    return 0.5 * (X + Y)


def parallel_sum_form(X, Y):
    """2 (X - X (X + Y)^-1 X), the harmonic mean without inverting X or Y."""
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    return _herm(2.0 * (X - X @ np.linalg.solve(X + Y, X)))


def harmonic_discrepancy(X, Y):
    """Return (inverse-formula mean, relative gap to the parallel-sum form)."""
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    H = invm(0.5 * (invm(X) + invm(Y)))
    P = parallel_sum_form(X, Y)
    return H, float(np.max(np.abs(H - P))) / _maxabs(X, Y)


def harmonic_mean(X, Y, selfcheck_tol=HARMONIC_SELFCHECK_TOL):
    """((X^-1 + Y^-1) / 2)^-1, cross-checked against the parallel-sum form.

    Pass ``selfcheck_tol=None`` to skip raising on disagreement.
    """
    H, gap = harmonic_discrepancy(X, Y)
    if selfcheck_tol is not None and gap > selfcheck_tol:
        raise SelfCheckError(f"harmonic mean formulas disagree by {gap:.3e} (relative)")
    return H


def _geometric_one_sided(X, Y):
    w, V = eigh(X)
    if not w[0] > 0.0:
        raise SelfCheckError("geometric mean needs a positive definite left argument")
    root = np.sqrt(w)
    Xh = (V * root) @ V.conj().T
    Xih = (V / root) @ V.conj().T
    inner = apply(SQRT, _herm(Xih @ Y @ Xih))
    return _herm(Xh @ inner @ Xh)


def geometric_discrepancy(X, Y):
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    G = _geometric_one_sided(X, Y)
    G_rev = _geometric_one_sided(Y, X)
    return G, float(np.max(np.abs(G - G_rev))) / _maxabs(X, Y)


def geometric_mean(X, Y, selfcheck_tol=GEOMETRIC_SELFCHECK_TOL):
    """X^1/2 (X^-1/2 Y X^-1/2)^1/2 X^1/2, checked for symmetry in X and Y."""
    G, gap = geometric_discrepancy(X, Y)
    if selfcheck_tol is not None and gap > selfcheck_tol:
        raise SelfCheckError(f"geometric mean is not symmetric: gap {gap:.3e} (relative)")
    return G


def mean(name, X, Y, selfcheck=True):
    if name == "arithmetic":
        return arithmetic_mean(X, Y)
    if name == "harmonic":
        return harmonic_mean(X, Y, HARMONIC_SELFCHECK_TOL if selfcheck else None)
    if name == "geometric":
        return geometric_mean(X, Y, GEOMETRIC_SELFCHECK_TOL if selfcheck else None)
    raise UnknownMeanError(f"unknown mean {name!r}; expected one of {MEAN_NAMES}")


def geometric_block(X, Y, Z):
    X, Y, Z = as_matrix(X), as_matrix(Y), as_matrix(Z)
    return np.block([[X, Z], [Z, Y]])


def check_geometric_block(X, Y, tol=LOEWNER_TOL, perturbation=0.0):
    """Compare [[X, Z], [Z, Y]] against 0 for Z = X # Y (+ perturbation * I).

    With ``perturbation == 0`` the verdict is GreaterEqual up to rounding;
    any positive perturbation must break positivity.
    """
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    Z = geometric_mean(X, Y)
    if perturbation:
        Z = Z + perturbation * np.eye(Z.shape[0])
    block = geometric_block(X, Y, Z)
    return loewner_compare(block, np.zeros_like(block), tol)
