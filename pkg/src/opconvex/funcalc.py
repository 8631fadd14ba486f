"""Scalar functions on (0, inf) with declared operator-monotonicity class,
matrix functional calculus and resolvent derivatives.

Functions are immutable descriptors (:class:`ScalarFunctionSpec`) with a
canonical text encoding::

    power:0.5   log   neg_inverse   resolvent:2.0   neg_resolvent:0.5
    mono_mixture:a=0.0;b=1.0;w=2.0,l=3.0
    dec_mixture:g=1.0;w=2.0,l=3.0|w=0.5,l=0.1

A power whose declared class differs from the one implied by its exponent
carries a suffix, e.g. ``power:0.5@none``.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from . import _kernels
from .core import (
    as_matrix,
    check_same_dim,
    loewner_compare,
    random_pd_array,
    LOEWNER_TOL,
)
from .errors import ClassViolationError, DomainViolationError, EigensolverFailure, ParseError
from .outcomes import CheckOutcome, CheckSummary


class FunctionClass(Enum):
    OM = "OM"
    OMD_POS = "OMDPos"
    NONE = "None"


@dataclass(frozen=True)
class Power:
    p: float


@dataclass(frozen=True)
class Log:
    pass


@dataclass(frozen=True)
class NegInverse:
    pass


@dataclass(frozen=True)
class Resolvent:
    lam: float


@dataclass(frozen=True)
class NegResolvent:
    lam: float


@dataclass(frozen=True)
class MonotoneMixture:
    """alpha + beta*x + sum_i w_i * x / (lam_i + x)"""

    alpha: float
    beta: float
    terms: tuple = ()


@dataclass(frozen=True)
class DecreasingMixture:
    """gamma + sum_i w_i / (lam_i + x)"""

    gamma: float
    terms: tuple = ()


_FIXED_CLASS = {
    Log: FunctionClass.OM,
    NegInverse: FunctionClass.OM,
    NegResolvent: FunctionClass.OM,
    MonotoneMixture: FunctionClass.OM,
    Resolvent: FunctionClass.OMD_POS,
    DecreasingMixture: FunctionClass.OMD_POS,
}


def _power_classes(p):
    allowed = {FunctionClass.NONE}
    if 0.0 <= p <= 1.0:
        allowed.add(FunctionClass.OM)
    if -1.0 <= p <= 0.0:
        allowed.add(FunctionClass.OMD_POS)
    return allowed


def default_class(form):
    if isinstance(form, Power):
        if 0.0 <= form.p <= 1.0:
            return FunctionClass.OM
        if -1.0 <= form.p < 0.0:
            return FunctionClass.OMD_POS
        return FunctionClass.NONE
    return _FIXED_CLASS[type(form)]


def _check_terms(terms):
    out = []
    for term in terms:
        w, lam = (float(v) for v in term)
        if not w > 0.0:
            raise ValueError(f"mixture weight must be > 0, got {w}")
        if not lam >= 0.0:
            raise ValueError(f"mixture pole must be >= 0, got {lam}")
        out.append((w, lam))
    return tuple(out)


@dataclass(frozen=True)
class ScalarFunctionSpec:
    form: object
    declared_class: FunctionClass = None

    def __post_init__(self):
        form = self.form
        if isinstance(form, (MonotoneMixture, DecreasingMixture)):
            object.__setattr__(self, "form", _normalize_mixture(form))
            form = self.form
        if isinstance(form, (Resolvent, NegResolvent)) and not form.lam >= 0.0:
            raise ValueError(f"resolvent parameter must be >= 0, got {form.lam}")
        if isinstance(form, DecreasingMixture) and form.gamma == 0.0 and not form.terms:
            raise ValueError("decreasing mixture must have gamma > 0 or at least one term")
        if self.declared_class is None:
            object.__setattr__(self, "declared_class", default_class(form))
        if isinstance(form, Power):
            allowed = _power_classes(form.p)
        elif type(form) in _FIXED_CLASS:
            allowed = {_FIXED_CLASS[type(form)]}
        else:
            raise TypeError(f"unknown function form {form!r}")
        if self.declared_class not in allowed:
            raise ClassViolationError(
                f"{form!r} cannot declare class {self.declared_class.value}"
            )

    @property
    def is_om(self):
        return self.declared_class is FunctionClass.OM

    @property
    def is_omd_pos(self):
        return self.declared_class is FunctionClass.OMD_POS

    @cached_property
    def kernel_args(self):
        """(code, params) pair understood by :mod:`opconvex._kernels`."""
        form = self.form
        if isinstance(form, Power):
            return _kernels.POWER, np.array([form.p])
        if isinstance(form, Log):
            return _kernels.LOG, np.zeros(1)
        if isinstance(form, NegInverse):
            return _kernels.NEG_INVERSE, np.zeros(1)
        if isinstance(form, Resolvent):
            return _kernels.RESOLVENT, np.array([form.lam])
        if isinstance(form, NegResolvent):
            return _kernels.NEG_RESOLVENT, np.array([form.lam])
        if isinstance(form, MonotoneMixture):
            flat = [form.alpha, form.beta] + [v for t in form.terms for v in t]
            return _kernels.MONOTONE_MIXTURE, np.array(flat, dtype=np.float64)
        flat = [form.gamma] + [v for t in form.terms for v in t]
        return _kernels.DECREASING_MIXTURE, np.array(flat, dtype=np.float64)

    def __call__(self, x):
        return eval_scalar(self, x)

    def __str__(self):
        return render(self)


def _normalize_mixture(form):
    if isinstance(form, MonotoneMixture):
        if not form.beta >= 0.0:
            raise ValueError(f"mixture slope must be >= 0, got {form.beta}")
        return MonotoneMixture(float(form.alpha), float(form.beta), _check_terms(form.terms))
    if not form.gamma >= 0.0:
        raise ValueError(f"mixture constant must be >= 0, got {form.gamma}")
    return DecreasingMixture(float(form.gamma), _check_terms(form.terms))


# convenience constructors

def power(p, declared_class=None):
    return ScalarFunctionSpec(Power(float(p)), declared_class)


def log():
    return ScalarFunctionSpec(Log())


def neg_inverse():
    return ScalarFunctionSpec(NegInverse())


def resolvent(lam):
    return ScalarFunctionSpec(Resolvent(float(lam)))


def neg_resolvent(lam):
    return ScalarFunctionSpec(NegResolvent(float(lam)))


def monotone_mixture(alpha, beta, terms=()):
    return ScalarFunctionSpec(MonotoneMixture(alpha, beta, tuple(terms)))


def decreasing_mixture(gamma, terms=()):
    return ScalarFunctionSpec(DecreasingMixture(gamma, tuple(terms)))


SQRT = ScalarFunctionSpec(Power(0.5))
INV_SQRT = ScalarFunctionSpec(Power(-0.5))
INVERSE = ScalarFunctionSpec(Power(-1.0))


# ---------------------------------------------------------------------------
# text encoding
# ---------------------------------------------------------------------------

_CLASS_SUFFIX = {FunctionClass.OM: "om", FunctionClass.OMD_POS: "omdpos", FunctionClass.NONE: "none"}
_SUFFIX_CLASS = {v: k for k, v in _CLASS_SUFFIX.items()}


def _num(x):
    return repr(float(x))


def _render_terms(terms):
    return "|".join(f"w={_num(w)},l={_num(lam)}" for w, lam in terms)


def render(spec):
    form = spec.form
    if isinstance(form, Power):
        text = f"power:{_num(form.p)}"
    elif isinstance(form, Log):
        text = "log"
    elif isinstance(form, NegInverse):
        text = "neg_inverse"
    elif isinstance(form, Resolvent):
        text = f"resolvent:{_num(form.lam)}"
    elif isinstance(form, NegResolvent):
        text = f"neg_resolvent:{_num(form.lam)}"
    elif isinstance(form, MonotoneMixture):
        text = f"mono_mixture:a={_num(form.alpha)};b={_num(form.beta)}"
        if form.terms:
            text += ";" + _render_terms(form.terms)
    else:
        text = f"dec_mixture:g={_num(form.gamma)}"
        if form.terms:
            text += ";" + _render_terms(form.terms)
    if spec.declared_class is not default_class(form):
        text += "@" + _CLASS_SUFFIX[spec.declared_class]
    return text


def _float(token, text):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad number {token!r} in {text!r}") from None


def _parse_terms(chunk, text):
    terms = []
    for item in chunk.split("|"):
        fields = dict(_kv(part, text) for part in item.split(","))
        if set(fields) != {"w", "l"}:
            raise ParseError(f"mixture term needs w= and l= in {text!r}")
        terms.append((_float(fields["w"], text), _float(fields["l"], text)))
    return tuple(terms)


def _kv(part, text):
    if "=" not in part:
        raise ParseError(f"expected key=value, got {part!r} in {text!r}")
    key, value = part.split("=", 1)
    return key.strip(), value.strip()


def parse(text):
    """Inverse of :func:`render`."""
    raw = text.strip()
    declared = None
    if "@" in raw:
        raw, suffix = raw.rsplit("@", 1)
        if suffix not in _SUFFIX_CLASS:
            raise ParseError(f"unknown class suffix {suffix!r}")
        declared = _SUFFIX_CLASS[suffix]
    name, _, arg = raw.partition(":")
    try:
        if name == "power":
            form = Power(_float(arg, text))
        elif name == "log" and not arg:
            form = Log()
        elif name == "neg_inverse" and not arg:
            form = NegInverse()
        elif name == "resolvent":
            form = Resolvent(_float(arg, text))
        elif name == "neg_resolvent":
            form = NegResolvent(_float(arg, text))
        elif name in ("mono_mixture", "dec_mixture"):
            params, terms = {}, ()
            for part in arg.split(";"):
                if part.startswith("w="):
                    terms = _parse_terms(part, text)
                else:
                    key, value = _kv(part, text)
                    params[key] = _float(value, text)
            if name == "mono_mixture":
                if set(params) != {"a", "b"}:
                    raise ParseError(f"mono_mixture needs a= and b= in {text!r}")
                form = MonotoneMixture(params["a"], params["b"], terms)
            else:
                if set(params) != {"g"}:
                    raise ParseError(f"dec_mixture needs g= in {text!r}")
                form = DecreasingMixture(params["g"], terms)
        else:
            raise ParseError(f"unknown function {text!r}")
        return ScalarFunctionSpec(form, declared)
    except (ValueError, ClassViolationError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid function {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_scalar(f, x):
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(~(x_arr > 0.0)):
        raise DomainViolationError(f"{render(f)} evaluated at non-positive argument")
    code, params = f.kernel_args
    out = _kernels.active.eval_scalar(x_arr, code, params)
    return float(out) if np.ndim(out) == 0 else out


def apply(f, X):
    """Functional calculus ``U diag(f(w)) U^*`` for a positive definite X."""
    X = as_matrix(X)
    code, params = f.kernel_args
    try:
        out, wmin = _kernels.active.spectral_apply(X, code, params)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not wmin > 0.0:
        raise DomainViolationError(
            f"{render(f)} applied to a matrix with eigenvalue {float(wmin):.3e}"
        )
    if not np.all(np.isfinite(out)):
        raise EigensolverFailure("functional calculus produced non-finite entries")
    return out


def sqrtm(X):
    return apply(SQRT, X)


def inv_sqrtm(X):
    return apply(INV_SQRT, X)


def invm(X):
    return apply(INVERSE, X)


def _resolvent_of(lam, X):
    return apply(resolvent(lam), X)


def resolvent_first_derivative(lam, X, Y):
    """d/dt (lam + X + tY)^-1 at t = 0, i.e. -R Y R with R = (lam + X)^-1."""
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    R = _resolvent_of(lam, X)
    out = -(R @ Y @ R)
    return 0.5 * (out + out.conj().T)


def resolvent_second_derivative(lam, X, Y):
    """d^2/dt^2 (lam + X + tY)^-1 at t = 0, i.e. 2 R Y R Y R."""
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    R = _resolvent_of(lam, X)
    RY = R @ Y
    out = 2.0 * (RY @ RY @ R)
    return 0.5 * (out + out.conj().T)


def _psd_increment(dim, rng):
    rank = int(rng.integers(1, dim + 1))
    B = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2 * rank)
    return B @ B.conj().T * float(np.exp(rng.uniform(np.log(1e-2), np.log(1e1))))


def monotonicity_outcome(f, X, P, tol=LOEWNER_TOL, seed=0):
    """Check f(X) <= f(X + P) (OM) or f(X) >= f(X + P) (OMDPos)."""
    lo, hi = apply(f, X), apply(f, as_matrix(X) + P)
    if f.is_om:
        verdict = loewner_compare(lo, hi, tol)
    else:
        verdict = loewner_compare(hi, lo, tol)
    return CheckOutcome.from_loewner(f"monotonicity[{render(f)}]", verdict, seed=seed)


def check_monotonicity_sample(f, dim, trials, seed, tol=LOEWNER_TOL, cond_max=1e4):
    """Randomized monotonicity probe; returns a :class:`CheckSummary`."""
    if f.declared_class is FunctionClass.NONE:
        raise ClassViolationError(f"{render(f)} declares no monotonicity class")
    summary = CheckSummary(f"monotonicity[{render(f)}]")
    seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    for s in seeds:
        rng = np.random.default_rng(int(s))
        X = random_pd_array(dim, cond_max, rng)
        P = _psd_increment(dim, rng)
        summary.add(monotonicity_outcome(f, X, P, tol, seed=int(s)))
    return summary
