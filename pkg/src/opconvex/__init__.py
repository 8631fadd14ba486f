"""Operator means, positive maps and numerical verification of operator
convexity inequalities for functions of positive definite matrices."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    HermitianMatrix,
    LoewnerVerdict,
    PositiveDefiniteMatrix,
    Relation,
    SpectralDecomposition,
    loewner_compare,
    make_hermitian,
    random_hermitian,
    random_pd,
    spectral_decompose,
)
from .funcalc import FunctionClass, ScalarFunctionSpec, apply, eval_scalar  # noqa: F401
from .means import arithmetic_mean, geometric_mean, harmonic_mean  # noqa: F401
from .outcomes import CheckOutcome, CheckSummary, Verdict  # noqa: F401
