"""Positive linear maps between full matrix algebras.

Maps are immutable descriptors that are also callables on ndarrays::

    phi = CongruenceSum.random(in_dim=3, k=2, seed=9)
    phi(X)                         # sum_i K_i^* X K_i
    apply_map(phi, X)              # same, with a dimension check

Seeded maps remember a recipe so that ``parse_map(render_map(phi), phi.in_dim)``
rebuilds an equal map. Recognised encodings::

    identity:3   state:uniform   state:seed=5   congruence_sum:k=2;seed=9
    pinching:2+2   trace:c=1.0   direct_sum(identity:2,state:seed=1;d=2)
"""
from functools import cached_property

import numpy as np

from . import _kernels
from .core import as_matrix, eigh, eigvalsh, random_matrix, random_pd_array
from .errors import DimensionMismatchError, NotStrictlyPositiveError, ParseError, SelfCheckError

STRICT_TOL = 1e-8
UNITAL_TOL = 1e-10
DIRECT_SUM_OFFDIAG_TOL = 1e-10


def _herm(M):
    return 0.5 * (M + M.conj().T)


def _psd_power(M, p):
    w, V = eigh(M)
    if not w[0] > 0.0:
        raise NotStrictlyPositiveError(f"expected a positive definite matrix, min eigenvalue {w[0]:.3e}")
    return _herm((V * w ** p) @ V.conj().T)


class PositiveMap:
    """Base class; subclasses implement ``_apply`` and the dimension attributes."""

    in_dim: int
    out_dim: int
    recipe = None

    def __call__(self, X):
        return self._apply(X)

    def _apply(self, X):
        raise NotImplementedError

    @cached_property
    def unit_image(self):
        return self._apply(np.eye(self.in_dim, dtype=np.complex128))

    @cached_property
    def _unit_spectrum(self):
        return eigvalsh(self.unit_image)

    @property
    def strict_margin(self):
        """Smallest eigenvalue of the image of the identity."""
        return float(self._unit_spectrum[0])

    @property
    def is_strict(self):
        w = self._unit_spectrum
        return bool(w[0] > STRICT_TOL * max(abs(w[0]), abs(w[-1])))

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return _keys_equal(self._key(), other._key())

    def __hash__(self):
        return hash((type(self).__name__, self.in_dim, self.out_dim))

    def __repr__(self):
        text = self.recipe or render_map(self, strict=False)
        return f"<{type(self).__name__} {text} ({self.in_dim}->{self.out_dim})>"


def _keys_equal(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and np.array_equal(a, b)
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_keys_equal(x, y) for x, y in zip(a, b))
    return a == b


class Identity(PositiveMap):
    def __init__(self, d):
        self.in_dim = self.out_dim = int(d)

    def _apply(self, X):
        return X

    def _key(self):
        return (self.in_dim,)


class CongruenceSum(PositiveMap):
    """T -> sum_i K_i^* T K_i with each K_i of shape (in_dim, out_dim)."""

    def __init__(self, Ks, recipe=None):
        Ks = np.asarray(Ks, dtype=np.complex128)
        if Ks.ndim == 2:
            Ks = Ks[None]
        if Ks.ndim != 3 or Ks.shape[0] < 1:
            raise ValueError("expected a non-empty stack of matrices")
        Ks = np.ascontiguousarray(Ks)
        Ks.setflags(write=False)
        self.Ks = Ks
        self.in_dim, self.out_dim = Ks.shape[1], Ks.shape[2]
        self.recipe = recipe

    @classmethod
    def random(cls, in_dim, k, seed, out_dim=None, min_singular=0.1):
        out_dim = in_dim if out_dim is None else out_dim
        rng = np.random.default_rng(seed)
        Ks = np.stack([random_matrix(in_dim, out_dim, rng, min_singular) for _ in range(k)])
        recipe = f"congruence_sum:k={k};seed={seed}"
        if out_dim != in_dim:
            recipe += f";out={out_dim}"
        return cls(Ks, recipe=recipe)

    def _apply(self, X):
        return _kernels.active.congruence_sum(X, self.Ks)

    def _key(self):
        return (self.Ks,)


class State(PositiveMap):
    """T -> Tr(rho T) as a 1x1 matrix, rho a positive definite density matrix."""

    def __init__(self, rho, recipe=None):
        rho = _herm(as_matrix(rho))
        if not abs(np.trace(rho).real - 1.0) <= 1e-10:
            raise ValueError("a state needs a density matrix of unit trace")
        if not eigvalsh(rho)[0] > 0.0:
            raise ValueError("state density matrix must be positive definite")
        rho.setflags(write=False)
        self.rho = rho
        self.in_dim, self.out_dim = rho.shape[0], 1
        self.recipe = recipe

    @classmethod
    def uniform(cls, d):
        return cls(np.eye(d) / d, recipe="state:uniform")

    @classmethod
    def random(cls, d, seed):
        rng = np.random.default_rng(seed)
        rho = random_pd_array(d, 1e2, rng)
        return cls(rho / np.trace(rho).real, recipe=f"state:seed={seed}")

    def _apply(self, X):
        # Tr(rho X) = sum_ij rho_ji X_ij
        return np.array([[np.sum(self.rho.T * X).real]], dtype=np.complex128)

    def _key(self):
        return (self.rho,)


class Pinching(PositiveMap):
    """Keep the diagonal blocks of a fixed partition, zero the rest."""

    def __init__(self, blocks):
        blocks = tuple(int(b) for b in blocks)
        if not blocks or min(blocks) < 1:
            raise ValueError("pinching blocks must be positive integers")
        self.blocks = blocks
        self.in_dim = self.out_dim = sum(blocks)
        mask = np.zeros((self.in_dim, self.in_dim), dtype=bool)
        start = 0
        for b in blocks:
            mask[start:start + b, start:start + b] = True
            start += b
        self._mask = mask

    def _apply(self, X):
        return np.where(self._mask, X, 0.0).astype(np.complex128)

    def _key(self):
        return (self.blocks,)


class TraceCompose(PositiveMap):
    """T -> c Tr(T) as a 1x1 matrix."""

    def __init__(self, c, d):
        if not c >= 0.0:
            raise ValueError("trace weight must be nonnegative")
        self.c = float(c)
        self.in_dim, self.out_dim = int(d), 1

    def _apply(self, X):
        return np.array([[self.c * np.trace(X).real]], dtype=np.complex128)

    def _key(self):
        return (self.c, self.in_dim)


class Conjugated(PositiveMap):
    """T -> post . inner(pre T pre^*) . post^*.

    ``pre`` has shape (inner.in_dim, new_in) and ``post`` shape
    (new_out, inner.out_dim); either may be None (identity).
    """

    def __init__(self, inner, post=None, pre=None):
        self.inner = inner
        self.post = None if post is None else as_matrix_rect(post)
        self.pre = None if pre is None else as_matrix_rect(pre)
        if self.pre is not None and self.pre.shape[0] != inner.in_dim:
            raise DimensionMismatchError("pre factor does not match the inner map's domain")
        if self.post is not None and self.post.shape[1] != inner.out_dim:
            raise DimensionMismatchError("post factor does not match the inner map's range")
        self.in_dim = inner.in_dim if self.pre is None else self.pre.shape[1]
        self.out_dim = inner.out_dim if self.post is None else self.post.shape[0]

    def _apply(self, X):
        if self.pre is not None:
            X = self.pre @ X @ self.pre.conj().T
        out = self.inner(X)
        if self.post is not None:
            out = self.post @ out @ self.post.conj().T
        return _herm(out)

    def _key(self):
        return (self.inner._key(), self.post, self.pre)


def as_matrix_rect(M):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError("expected a 2-d array")
    M.setflags(write=False)
    return M


class DirectSum(PositiveMap):
    """Block-diagonal X (+) Y  ->  diag(first(X), second(Y)).

    The domain is encoded as (m + n) x (m + n) matrices whose off-diagonal
    blocks vanish.
    """

    def __init__(self, first, second):
        self.first, self.second = first, second
        self.in_dim = first.in_dim + second.in_dim
        self.out_dim = first.out_dim + second.out_dim

    def split(self, X):
        m = self.first.in_dim
        off = np.abs(X[:m, m:])
        if off.size and float(np.max(off)) > DIRECT_SUM_OFFDIAG_TOL * max(float(np.max(np.abs(X))), 1e-300):
            raise DimensionMismatchError("direct-sum input has nonzero off-diagonal blocks")
        return X[:m, :m], X[m:, m:]

    def _apply(self, X):
        A, B = self.split(X)
        out = np.zeros((self.out_dim, self.out_dim), dtype=np.complex128)
        k = self.first.out_dim
        out[:k, :k] = self.first(A)
        out[k:, k:] = self.second(B)
        return out

    def _key(self):
        return (self.first._key(), self.second._key())


class TracialFunctional:
    """tau = c * Tr on a full matrix algebra."""

    def __init__(self, c=1.0):
        if not c >= 0.0:
            raise ValueError("tracial functional weight must be nonnegative")
        self.c = float(c)

    def __call__(self, M):
        return self.c * complex(np.trace(M))

    def __eq__(self, other):
        return isinstance(other, TracialFunctional) and other.c == self.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"TracialFunctional(c={self.c!r})"


def apply_map(phi, X):
    X = as_matrix(X)
    if X.shape[0] != phi.in_dim:
        raise DimensionMismatchError(f"map expects dimension {phi.in_dim}, got {X.shape[0]}")
    return phi(X)


def unitalize(phi, anchor):
    """T -> phi(P)^-1/2 phi(P^1/2 T P^1/2) phi(P)^-1/2 for the anchor P."""
    P = as_matrix(anchor)
    if P.shape[0] != phi.in_dim:
        raise DimensionMismatchError("anchor dimension does not match the map's domain")
    if not phi.is_strict:
        raise NotStrictlyPositiveError("unitalization needs a strictly positive map")
    post = _psd_power(phi(P), -0.5)
    result = Conjugated(phi, post=post, pre=_psd_power(P, 0.5))
    gap = float(np.max(np.abs(result.unit_image - np.eye(result.out_dim))))
    if gap > UNITAL_TOL:
        raise SelfCheckError(f"unitalized map sends I to a matrix {gap:.3e} away from I")
    return result


def two_var_freeze(phi, f1_of_X, psi):
    """T -> phi(f1(X))^1/2 psi(T) phi(f1(X))^1/2."""
    if phi.out_dim != psi.out_dim:
        raise DimensionMismatchError("phi and psi must share their output dimension")
    root = _psd_power(apply_map(phi, f1_of_X), 0.5)
    return Conjugated(psi, post=root)


def direct_sum_map(phi, psi):
    return DirectSum(phi, psi)


# ---------------------------------------------------------------------------
# text encoding
# ---------------------------------------------------------------------------

def _intrinsic_dim(m):
    if isinstance(m, (Identity, Pinching)):
        return True
    if isinstance(m, DirectSum):
        return _intrinsic_dim(m.first) and _intrinsic_dim(m.second)
    return False


def render_map(phi, with_dim=False, strict=True):
    """Canonical text for a map built from a recipe.

    Maps constructed from explicit matrices have no canonical text; with
    ``strict=True`` they raise ``ValueError``.
    """
    if isinstance(phi, Identity):
        return f"identity:{phi.in_dim}"
    if isinstance(phi, Pinching):
        return "pinching:" + "+".join(str(b) for b in phi.blocks)
    if isinstance(phi, TraceCompose):
        text = f"trace:c={phi.c!r}"
    elif isinstance(phi, DirectSum):
        return f"direct_sum({render_map(phi.first, True, strict)},{render_map(phi.second, True, strict)})"
    elif phi.recipe is not None:
        text = phi.recipe
    elif strict:
        raise ValueError(f"{type(phi).__name__} built from explicit data has no text encoding")
    else:
        return f"{type(phi).__name__.lower()}:<explicit>"
    if with_dim:
        text += f";d={phi.in_dim}"
    return text


def _split_top(text):
    depth, cut = 0, None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            cut = i
            break
    if cut is None:
        raise ParseError(f"direct_sum needs two comma-separated maps: {text!r}")
    return text[:cut], text[cut + 1:]


def _declared_dim(text):
    text = text.strip()
    if text.startswith("identity:"):
        return int(text.split(":", 1)[1])
    if text.startswith("pinching:"):
        return sum(int(b) for b in text.split(":", 1)[1].split("+"))
    if text.startswith("direct_sum("):
        a, b = _split_top(text[len("direct_sum("):-1])
        da, db = _declared_dim(a), _declared_dim(b)
        return None if da is None or db is None else da + db
    for part in text.partition(":")[2].split(";"):
        if part.startswith("d="):
            return int(part[2:])
    return None


def parse_map(text, dim=None):
    """Parse a map encoding; ``dim`` supplies the input dimension when the
    text does not fix it."""
    raw = text.strip()
    try:
        if raw.startswith("direct_sum(") and raw.endswith(")"):
            a, b = _split_top(raw[len("direct_sum("):-1])
            da, db = _declared_dim(a), _declared_dim(b)
            if da is None and db is None:
                if dim is None or dim % 2:
                    raise ParseError(f"cannot infer component dimensions of {text!r}")
                da = db = dim // 2
            elif da is None:
                da = None if dim is None else dim - db
            elif db is None:
                db = None if dim is None else dim - da
            return DirectSum(parse_map(a, da), parse_map(b, db))
        name, _, arg = raw.partition(":")
        if name == "identity":
            return Identity(int(arg) if arg else _need(dim, text))
        if name == "pinching":
            return Pinching(int(b) for b in arg.split("+"))
        fields = {}
        for part in filter(None, arg.split(";")):
            if part == "uniform":
                fields["uniform"] = True
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise ParseError(f"expected key=value in {text!r}")
            fields[key.strip()] = value.strip()
        d = int(fields.pop("d")) if "d" in fields else _need(dim, text)
        if name == "state":
            if fields.pop("uniform", False):
                phi = State.uniform(d)
            else:
                phi = State.random(d, int(fields.pop("seed")))
        elif name == "congruence_sum":
            out = int(fields.pop("out")) if "out" in fields else None
            phi = CongruenceSum.random(d, int(fields.pop("k")), int(fields.pop("seed")), out_dim=out)
        elif name == "trace":
            phi = TraceCompose(float(fields.pop("c", 1.0)), d)
        else:
            raise ParseError(f"unknown map {text!r}")
        if fields:
            raise ParseError(f"unexpected fields {sorted(fields)} in {text!r}")
        return phi
    except ParseError:
        raise
    except (KeyError, ValueError) as exc:
        raise ParseError(f"invalid map {text!r}: {exc}") from exc


def _need(dim, text):
    if dim is None:
        raise ParseError(f"{text!r} needs an input dimension")
    return int(dim)
