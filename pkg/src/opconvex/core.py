"""Hermitian / positive definite matrix types, spectral decomposition, the
Loewner order and seeded random instance generation.

Operations accept anything ``np.asarray`` understands (including the wrapper
types defined here) and return plain complex ``ndarray`` objects; the
wrappers exist to validate data at the boundary of the library.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatchError,
    EigensolverFailure,
    ExcessAsymmetryError,
    NonSquareError,
    NotPositiveDefiniteError,
)

ASYM_TOL = 1e-10
REL_TOL_RECONSTRUCT = 1e-12
LOEWNER_TOL = 1e-9


def _square(raw):
    arr = np.asarray(raw, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NonSquareError(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def symmetrize(raw):
    """Return ``(raw + raw^*) / 2``, the max-entry asymmetry of ``raw`` and
    its max-entry magnitude."""
    arr = _square(raw)
    adj = arr.conj().T
    asym = float(np.max(np.abs(arr - adj)))
    return 0.5 * (arr + adj), asym, float(np.max(np.abs(arr)))


class HermitianMatrix:
    """Immutable d x d complex Hermitian matrix.

    The stored entries are the symmetrization of the input, so Hermitian
    symmetry holds exactly. Inputs whose asymmetry exceeds
    ``asym_tol * max|entry|`` are rejected.
    """

    __slots__ = ("_entries", "asymmetry")

    def __init__(self, raw, asym_tol=ASYM_TOL):
        entries, asym, magnitude = symmetrize(raw)
        bound = asym_tol * magnitude
        if asym > bound:
            raise ExcessAsymmetryError(
                f"input asymmetry {asym:.3e} exceeds tolerance {bound:.3e}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "_entries", entries)
        object.__setattr__(self, "asymmetry", asym)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def entries(self):
        return self._entries

    @property
    def dim(self):
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self._entries, precision=6)})"


class PositiveDefiniteMatrix(HermitianMatrix):
    """Hermitian matrix whose smallest eigenvalue is strictly positive."""

    __slots__ = ("min_eigenvalue",)

    def __init__(self, raw, asym_tol=ASYM_TOL):
        super().__init__(raw, asym_tol=asym_tol)
        lo = float(eigvalsh(self._entries)[0])
        if not lo > 0.0:
            raise NotPositiveDefiniteError(f"smallest eigenvalue {lo:.3e} is not positive")
        object.__setattr__(self, "min_eigenvalue", lo)


def make_hermitian(raw, asym_tol=ASYM_TOL):
    return HermitianMatrix(raw, asym_tol=asym_tol)


def as_matrix(X):
    """Coerce to a complex square ndarray without copying wrapper data."""
    return _square(X)


def check_same_dim(*mats):
    dims = {np.shape(m)[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # unitary, eigenvectors in columns

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def eigh(H):
    H = as_matrix(H)
    try:
        w, V = _kernels.active.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    return w, V


def eigvalsh(H):
    try:
        w = _kernels.active.eigvalsh(as_matrix(H))
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    return w


def spectral_decompose(H):
    w, V = eigh(H)
    return SpectralDecomposition(eigenvalues=np.asarray(w, dtype=np.float64), eigenvectors=V)


def min_eigenvalue(H):
    return float(eigvalsh(H)[0])


def operator_norm(H):
    w = eigvalsh(H)
    return float(max(abs(w[0]), abs(w[-1])))


class Relation(Enum):
    LESS_EQUAL = "LessEqual"
    GREATER_EQUAL = "GreaterEqual"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of comparing ``A`` and ``B`` in the Loewner order.

    ``forward_margin`` is min-eig(B - A) (the margin of the claim A <= B),
    ``backward_margin`` is min-eig(A - B). ``margin`` is the margin of the
    relation that was established; for ``INCOMPARABLE`` it is the (negative)
    forward margin.
    """

    relation: Relation
    margin: float
    tolerance: float
    scale: float
    forward_margin: float
    backward_margin: float

    @property
    def holds_le(self):
        return self.relation in (Relation.LESS_EQUAL, Relation.EQUAL)

    @property
    def holds_ge(self):
        return self.relation in (Relation.GREATER_EQUAL, Relation.EQUAL)


def loewner_compare(A, B, tol=LOEWNER_TOL):
    A = as_matrix(A)
    B = as_matrix(B)
    check_same_dim(A, B)
    try:
        fwd, bwd, scale = _kernels.active.loewner_margins(A, B)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    fwd, bwd, scale = float(fwd), float(bwd), float(scale)
    slack = -tol * scale
    le = fwd >= slack
    ge = bwd >= slack
    if le and ge:
        relation, margin = Relation.EQUAL, fwd
    elif le:
        relation, margin = Relation.LESS_EQUAL, fwd
    elif ge:
        relation, margin = Relation.GREATER_EQUAL, bwd
    else:
        relation, margin = Relation.INCOMPARABLE, fwd
    return LoewnerVerdict(relation, margin, tol, scale, fwd, bwd)


def haar_unitary(dim, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pd_array(dim, cond_max, rng):
    """Random PD matrix with log-uniform spectrum in [cond^-1/2, cond^1/2]."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if cond_max < 1:
        raise ValueError("cond_max must be >= 1")
    half = 0.5 * np.log(cond_max)
    w = np.exp(rng.uniform(-half, half, size=dim))
    U = haar_unitary(dim, rng)
    if cond_max == 1:
        return np.eye(dim, dtype=np.complex128)
    M = (U * w) @ U.conj().T
    return 0.5 * (M + M.conj().T)


def random_pd(dim, cond_max, seed):
    return PositiveDefiniteMatrix(random_pd_array(dim, cond_max, _rng(seed)))


def random_hermitian_array(dim, norm_bound, rng):
    if norm_bound <= 0:
        raise ValueError("norm_bound must be positive")
    w = rng.uniform(-norm_bound, norm_bound, size=dim)
    U = haar_unitary(dim, rng)
    M = (U * w) @ U.conj().T
    return 0.5 * (M + M.conj().T)


def random_hermitian(dim, norm_bound, seed):
    return HermitianMatrix(random_hermitian_array(dim, norm_bound, _rng(seed)))


def random_matrix(rows, cols, rng, min_singular=None):
    """Complex Gaussian matrix; optionally floor the singular values."""
    Z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    if min_singular is None:
        return Z
    U, s, Vh = np.linalg.svd(Z, full_matrices=False)
    return (U * np.maximum(s, min_singular)) @ Vh
