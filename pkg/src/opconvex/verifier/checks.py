"""Single-instance checks of the operator inequalities.

Every check evaluates a claim ``lhs <= rhs`` (Loewner order for matrices,
ordinary order for traces) and returns a :class:`CheckOutcome`.
"""
from dataclasses import dataclass

import numpy as np

from ..core import as_matrix, check_same_dim, eigvalsh, loewner_compare, LOEWNER_TOL
from ..errors import (
    ClassViolationError,
    DimensionMismatchError,
    NotStrictlyPositiveError,
    SelfCheckError,
)
from ..funcalc import (
    FunctionClass,
    INVERSE,
    Resolvent,
    SQRT,
    apply,
    eval_scalar,
    monotonicity_outcome,
    render,
    resolvent_first_derivative,
    resolvent_second_derivative,
)
from ..means import (
    GEOMETRIC_SELFCHECK_TOL,
    HARMONIC_SELFCHECK_TOL,
    MEAN_NAMES,
    arithmetic_mean,
    check_geometric_block,
    geometric_discrepancy,
    geometric_mean,
    harmonic_discrepancy,
    harmonic_mean,
    mean,
)
from ..outcomes import CheckOutcome, worst_of
from ..posmaps import DirectSum, TracialFunctional, two_var_freeze

GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
TRACE_SWITCH_TOL = 1e-9
FD_STEP = 1e-4
FD_REL_TOL = 1e-4
EMBEDDING_AGREEMENT_TOL = 1e-8


def _herm(M):
    return 0.5 * (M + M.conj().T)


def _require_class(f, wanted, role):
    if f.declared_class is not wanted:
        raise ClassViolationError(
            f"{role} = {render(f)} must be declared {wanted.value}, got {f.declared_class.value}"
        )


def _require_strict(phi):
    if not phi.is_strict:
        raise NotStrictlyPositiveError(f"{phi!r} is not strictly positive")


def _require_theorem_hypotheses(g, f, phi):
    _require_class(f, FunctionClass.OMD_POS, "f")
    _require_class(g, FunctionClass.OM, "g")
    _require_strict(phi)


def _pair(X, Y, phi=None):
    X, Y = as_matrix(X), as_matrix(Y)
    check_same_dim(X, Y)
    if phi is not None and X.shape[0] != phi.in_dim:
        raise DimensionMismatchError(f"map expects dimension {phi.in_dim}, got {X.shape[0]}")
    return X, Y


# ---------------------------------------------------------------------------
# main inequality and its proof chain
# ---------------------------------------------------------------------------

def composed(g, phi, f, X):
    """X -> g(phi(f(X)))."""
    return apply(g, phi(apply(f, X)))


@dataclass
class MainTerms:
    """Intermediate quantities of the midpoint inequality and its proof."""

    lhs: np.ndarray          # g(phi(f(X mean Y)))
    via_f_harmonic: np.ndarray   # g(phi(f(X) ! f(Y)))
    via_phi_harmonic: np.ndarray  # g(phi(f(X)) ! phi(f(Y)))
    rhs: np.ndarray          # g(phi(f(X))) mean g(phi(f(Y)))
    via_phi_geometric: np.ndarray  # g(phi(f(X)) # phi(f(Y)))
    selfcheck_gaps: dict


def main_terms(g, f, phi, X, Y, selfcheck=True):
    fX, fY = apply(f, X), apply(f, Y)
    pX, pY = phi(fX), phi(fY)
    lhs = composed(g, phi, f, arithmetic_mean(X, Y))
    h_f, gap_f = harmonic_discrepancy(fX, fY)
    h_p, gap_p = harmonic_discrepancy(pX, pY)
    geo, gap_g = geometric_discrepancy(pX, pY)
    gaps = {"harmonic_f": gap_f, "harmonic_phi": gap_p, "geometric_phi": gap_g}
    if selfcheck:
        limits = {"harmonic_f": HARMONIC_SELFCHECK_TOL, "harmonic_phi": HARMONIC_SELFCHECK_TOL,
                  "geometric_phi": GEOMETRIC_SELFCHECK_TOL}
        for name, gap in gaps.items():
            if gap > limits[name]:
                raise SelfCheckError(f"{name} self-check gap {gap:.3e} exceeds {limits[name]:.0e}")
    return MainTerms(
        lhs=lhs,
        via_f_harmonic=apply(g, phi(h_f)),
        via_phi_harmonic=apply(g, h_p),
        rhs=arithmetic_mean(apply(g, pX), apply(g, pY)),
        via_phi_geometric=apply(g, geo),
        selfcheck_gaps=gaps,
    )


def _segment_outcomes(check_id, g, f, phi, X, Y, tol, seed):
    gX, gY = composed(g, phi, f, X), composed(g, phi, f, Y)
    out = []
    for t in GRID:
        lhs = composed(g, phi, f, t * X + (1 - t) * Y)
        rhs = t * gX + (1 - t) * gY
        out.append(CheckOutcome.from_loewner(f"{check_id}@t={t}", loewner_compare(lhs, rhs, tol), seed))
    return out


def check_main_convexity(g, f, phi, X, Y, tol=LOEWNER_TOL, seed=0, grid=False,
                         enforce_classes=True, selfcheck=True, terms=None):
    """Midpoint inequality g(phi(f(X mean Y))) <= mean of g(phi(f(X))), g(phi(f(Y))).

    With ``grid=True`` the nine points t = 0.1..0.9 of the segment are
    checked as well and the worst outcome is returned.
    ``enforce_classes=False`` lifts the class gate (negative controls).
    """
    X, Y = _pair(X, Y, phi)
    if enforce_classes:
        _require_theorem_hypotheses(g, f, phi)
    if terms is None:
        fX, fY = apply(f, X), apply(f, Y)
        lhs = composed(g, phi, f, arithmetic_mean(X, Y))
        rhs = arithmetic_mean(apply(g, phi(fX)), apply(g, phi(fY)))
    else:
        lhs, rhs = terms.lhs, terms.rhs
    main = CheckOutcome.from_loewner("main_convexity", loewner_compare(lhs, rhs, tol), seed)
    if not grid:
        return main
    parts = [main] + _segment_outcomes("main_convexity", g, f, phi, X, Y, tol, seed)
    return worst_of("main_convexity", parts, seed)


def check_proof_chain(g, f, phi, X, Y, tol=LOEWNER_TOL, seed=0, selfcheck=True, terms=None):
    """The three links of the proof, each as its own outcome.

    eq1: g(phi(f(X mean Y)))     <= g(phi(f(X) ! f(Y)))
    eq2: g(phi(f(X) ! f(Y)))     <= g(phi(f(X)) ! phi(f(Y)))
    eq3: g(phi(f(X)) ! phi(f(Y))) <= g(phi(f(X))) mean g(phi(f(Y)))

    eq3 carries a diagnostic comparing its left side with the geometric
    mean route (harmonic <= geometric).
    """
    X, Y = _pair(X, Y, phi)
    _require_theorem_hypotheses(g, f, phi)
    t = terms if terms is not None else main_terms(g, f, phi, X, Y, selfcheck)
    geo = loewner_compare(t.via_phi_harmonic, t.via_phi_geometric, tol)
    diag = {"mean_ordering_margin": geo.forward_margin, "mean_ordering_scale": geo.scale,
            "selfcheck_gaps": t.selfcheck_gaps}
    return (
        CheckOutcome.from_loewner("proof_chain_eq1", loewner_compare(t.lhs, t.via_f_harmonic, tol), seed),
        CheckOutcome.from_loewner("proof_chain_eq2", loewner_compare(t.via_f_harmonic, t.via_phi_harmonic, tol), seed),
        CheckOutcome.from_loewner("proof_chain_eq3", loewner_compare(t.via_phi_harmonic, t.rhs, tol), seed, diag),
    )


# ---------------------------------------------------------------------------
# auxiliary inequalities and means
# ---------------------------------------------------------------------------

def check_harmonic_subadditivity(phi, X, Y, tol=LOEWNER_TOL, seed=0, selfcheck=True):
    """phi(X ! Y) <= phi(X) ! phi(Y), together with the inner step
    phi(X) phi(X+Y)^-1 phi(X) <= phi(X (X+Y)^-1 X)."""
    X, Y = _pair(X, Y, phi)
    _require_strict(phi)
    sc = HARMONIC_SELFCHECK_TOL if selfcheck else None
    pX, pY = phi(X), phi(Y)
    outer = loewner_compare(phi(harmonic_mean(X, Y, sc)), harmonic_mean(pX, pY, sc), tol)
    S = X + Y
    inner_rhs = phi(_herm(X @ np.linalg.solve(S, X)))
    inner_lhs = _herm(pX @ np.linalg.solve(phi(S), pX))
    inner = loewner_compare(inner_lhs, inner_rhs, tol)
    return worst_of(
        "harmonic_subadditivity",
        [CheckOutcome.from_loewner("outer", outer, seed), CheckOutcome.from_loewner("inner", inner, seed)],
        seed,
    )


def check_f_mean_inequality(f, X, Y, tol=LOEWNER_TOL, seed=0, selfcheck=True):
    """f(X mean Y) <= f(X) ! f(Y) for operator monotone decreasing positive f."""
    X, Y = _pair(X, Y)
    _require_class(f, FunctionClass.OMD_POS, "f")
    lhs = apply(f, arithmetic_mean(X, Y))
    rhs = harmonic_mean(apply(f, X), apply(f, Y), HARMONIC_SELFCHECK_TOL if selfcheck else None)
    return CheckOutcome.from_loewner("f_mean_inequality", loewner_compare(lhs, rhs, tol), seed)


def check_mean_subadditivity(sigma, phi, X, Y, tol=LOEWNER_TOL, seed=0, selfcheck=True):
    """phi(X sigma Y) <= phi(X) sigma phi(Y) for sigma in the three means."""
    X, Y = _pair(X, Y, phi)
    if sigma not in MEAN_NAMES:
        mean(sigma, X, Y)  # raises UnknownMeanError
    _require_strict(phi)
    lhs = phi(mean(sigma, X, Y, selfcheck))
    rhs = mean(sigma, phi(X), phi(Y), selfcheck)
    return CheckOutcome.from_loewner(f"mean_subadditivity[{sigma}]", loewner_compare(lhs, rhs, tol), seed)


def check_mean_ordering(X, Y, tol=LOEWNER_TOL, seed=0, selfcheck=True):
    """X ! Y <= X # Y <= X mean Y."""
    X, Y = _pair(X, Y)
    h = mean("harmonic", X, Y, selfcheck)
    g = mean("geometric", X, Y, selfcheck)
    a = arithmetic_mean(X, Y)
    return worst_of(
        "mean_ordering",
        [
            CheckOutcome.from_loewner("harmonic_le_geometric", loewner_compare(h, g, tol), seed),
            CheckOutcome.from_loewner("geometric_le_arithmetic", loewner_compare(g, a, tol), seed),
        ],
        seed,
    )


def check_geometric_block_outcome(X, Y, tol=LOEWNER_TOL, seed=0, probe=0.01):
    """[[X, X#Y], [X#Y, Y]] >= 0; the probe Z + probe*I is recorded as a detail."""
    v = check_geometric_block(X, Y, tol)
    details = {}
    if probe:
        p = check_geometric_block(X, Y, tol, perturbation=probe)
        details = {"perturbed_relation": p.relation.value, "perturbed_margin": p.backward_margin}
    # claim 0 <= block: forward margin of (0, block) is the block's min eigenvalue
    return CheckOutcome.from_margins(
        "geometric_block", v.backward_margin, v.forward_margin, v.scale, tol, seed, details
    )


def check_monotone(f, X, P, tol=LOEWNER_TOL, seed=0):
    return monotonicity_outcome(f, X, P, tol, seed)


def check_jensen(phi_u, X, f=INVERSE, tol=LOEWNER_TOL, seed=0):
    """f(phi_u(X)) <= phi_u(f(X)) for a unital positive map and operator convex f."""
    X = as_matrix(X)
    lhs = apply(f, phi_u(X))
    rhs = phi_u(apply(f, X))
    return CheckOutcome.from_loewner("jensen", loewner_compare(lhs, rhs, tol), seed)


def check_kadison(phi_u, b, tol=LOEWNER_TOL, seed=0):
    """phi_u(b)^2 <= phi_u(b^2) for a unital positive map and Hermitian b."""
    b = as_matrix(b)
    pb = phi_u(b)
    lhs = _herm(pb @ pb)
    rhs = phi_u(_herm(b @ b))
    return CheckOutcome.from_loewner("kadison", loewner_compare(lhs, rhs, tol), seed)


# ---------------------------------------------------------------------------
# the published counterexample for the geometric-mean route
# ---------------------------------------------------------------------------

REFERENCE_S = np.array([[1.1, 0.0], [0.0, 0.1]])
REFERENCE_T = np.array([[7.17, -4.41], [-4.41, 3.13]])
REFERENCE_S_GEO_T = np.array([[1.85834, -0.63486], [-0.63486, 0.52569]])
REFERENCE_EIGENVALUES = (0.5786, -0.0159)


@dataclass(frozen=True)
class Counterexample:
    S: np.ndarray
    T: np.ndarray
    S_geo_T: np.ndarray
    difference: np.ndarray
    eigenvalues: tuple  # descending: (lambda_1, lambda_2)

    def to_dict(self):
        def real(M):
            return np.real(M).tolist()

        return {
            "S": real(self.S),
            "T": real(self.T),
            "S_geo_T": real(self.S_geo_T),
            "difference": real(self.difference),
            "eigenvalues": list(self.eigenvalues),
        }


def reproduce_counterexample():
    """Compute S # T and the spectrum of (sqrt S + sqrt T)/2 - sqrt(S # T)."""
    S, T = as_matrix(REFERENCE_S), as_matrix(REFERENCE_T)
    G = geometric_mean(S, T)
    D = _herm(0.5 * (apply(SQRT, S) + apply(SQRT, T)) - apply(SQRT, G))
    w = eigvalsh(D)
    return Counterexample(S, T, G, D, (float(w[-1]), float(w[0])))


def check_geometric_path(g, S, T, tol=LOEWNER_TOL, seed=0):
    """Claim g(S # T) <= (g(S) + g(T))/2, which is false in general."""
    S, T = _pair(S, T)
    lhs = apply(g, geometric_mean(S, T))
    rhs = arithmetic_mean(apply(g, S), apply(g, T))
    return CheckOutcome.from_loewner("geometric_path", loewner_compare(lhs, rhs, tol), seed)


# ---------------------------------------------------------------------------
# two-variable trace functionals
# ---------------------------------------------------------------------------

def _trace_of(g, M):
    """(Tr g(M), sum |g(eigenvalues)|)."""
    w = eigvalsh(M)
    gw = np.atleast_1d(eval_scalar(g, w))
    return float(np.sum(gw)), float(np.sum(np.abs(gw)))


def two_var_trace(g, f1, f2, phi, psi, X, Y, route="x"):
    """Tr g(phi(f1 X)^1/2 psi(f2 Y) phi(f1 X)^1/2) and its absolute scale.

    ``route="y"`` evaluates the switched form
    Tr g(psi(f2 Y)^1/2 phi(f1 X) psi(f2 Y)^1/2) instead.
    """
    if route == "x":
        frozen = two_var_freeze(phi, apply(f1, X), psi)
        return _trace_of(g, frozen(apply(f2, Y)))
    frozen = two_var_freeze(psi, apply(f2, Y), phi)
    return _trace_of(g, frozen(apply(f1, X)))


def _scalar_segment(check_id, value, a, b, tol, seed):
    """Midpoint plus grid convexity of t -> value(t a + (1-t) b)."""
    va, sa = value(a)
    vb, sb = value(b)
    outcomes = []
    for t in (0.5,) + GRID:
        vt, st = value(t * a + (1 - t) * b)
        rhs = t * va + (1 - t) * vb
        outcomes.append(CheckOutcome.from_scalar(
            f"{check_id}@t={t}", vt, rhs, tol, scale=max(sa, sb, st), seed=seed,
        ))
    return outcomes


def check_separate_convexity_two_var(f1, f2, g, phi, psi, fixed, fixed_point, a, b,
                                     tol=LOEWNER_TOL, seed=0):
    """Convexity of the two-variable trace functional in one argument.

    ``fixed="x"`` holds X = fixed_point and moves Y along [b, a];
    ``fixed="y"`` holds Y and moves X (evaluated through the switched form).
    """
    _require_class(f1, FunctionClass.OMD_POS, "f1")
    _require_class(f2, FunctionClass.OMD_POS, "f2")
    _require_class(g, FunctionClass.OM, "g")
    _require_strict(phi)
    _require_strict(psi)
    if phi.out_dim != psi.out_dim:
        raise DimensionMismatchError("phi and psi must share their output dimension")
    P = as_matrix(fixed_point)
    a, b = _pair(a, b)
    if fixed == "x":
        def value(Y):
            return two_var_trace(g, f1, f2, phi, psi, P, Y, route="x")
    elif fixed == "y":
        def value(X):
            return two_var_trace(g, f1, f2, phi, psi, X, P, route="y")
    else:
        raise ValueError("fixed must be 'x' or 'y'")
    check_id = f"separate_convexity[{fixed}]"
    return worst_of(check_id, _scalar_segment(check_id, value, a, b, tol, seed), seed)


def check_trace_switch(P, Q, h, tol=TRACE_SWITCH_TOL, seed=0):
    """Tr h(P^1/2 Q P^1/2) = Tr h(Q^1/2 P Q^1/2), to relative tolerance ``tol``."""
    P, Q = _pair(P, Q)
    Ph, Qh = apply(SQRT, P), apply(SQRT, Q)
    A = _herm(Ph @ Q @ Ph)
    B = _herm(Qh @ P @ Qh)
    a, sa = _trace_of(h, A)
    b, sb = _trace_of(h, B)
    wa, wb = eigvalsh(A), eigvalsh(B)
    spectral_gap = float(np.max(np.abs(wa - wb)) / max(abs(wa[-1]), abs(wb[-1])))
    gap = -abs(a - b)
    return CheckOutcome.from_margins(
        "trace_switch", gap, gap, max(sa, sb), tol, seed,
        {"lhs": a, "rhs": b, "isospectral_gap": spectral_gap},
    )


def _resolvent_param(f, role):
    if not isinstance(f.form, Resolvent):
        raise ClassViolationError(f"{role} must be a resolvent 1/(lam + x), got {render(f)}")
    return f.form.lam


def lieb_functional(f1, f2, phi, tau, K, X):
    """tau(phi(f1(X)) K^* phi(f2(X)) K)."""
    K = np.asarray(K, dtype=np.complex128)
    A = phi(apply(f1, X))
    B = phi(apply(f2, X))
    return tau(A @ K.conj().T @ B @ K).real


def lieb_second_derivative(f1, f2, phi, tau, K, X, Y):
    """Analytic h''(0) for h(t) = tau(phi(f1(X+tY)) K^* phi(f2(X+tY)) K).

    Returns (value, scale) with scale the sum of the absolute values of the
    three terms of the expansion.
    """
    lam, mu = _resolvent_param(f1, "f1"), _resolvent_param(f2, "f2")
    K = np.asarray(K, dtype=np.complex128)
    Kh = K.conj().T
    A0, B0 = phi(apply(f1, X)), phi(apply(f2, X))
    A1, B1 = phi(resolvent_first_derivative(lam, X, Y)), phi(resolvent_first_derivative(mu, X, Y))
    A2, B2 = phi(resolvent_second_derivative(lam, X, Y)), phi(resolvent_second_derivative(mu, X, Y))
    t1 = tau(A2 @ Kh @ B0 @ K).real
    t2 = 2.0 * tau(A1 @ Kh @ B1 @ K).real
    t3 = tau(A0 @ Kh @ B2 @ K).real
    return t1 + t2 + t3, abs(t1) + abs(t2) + abs(t3)


def lieb_second_difference(f1, f2, phi, tau, K, X, Y, step=FD_STEP):
    X, Y = as_matrix(X), as_matrix(Y)

    def h(t):
        return lieb_functional(f1, f2, phi, tau, K, X + t * Y)

    return (h(step) - 2.0 * h(0.0) + h(-step)) / step ** 2


def check_lieb_convexity(f1, f2, phi, tau, K, X, Y, X2=None, tol=LOEWNER_TOL, seed=0,
                         fd_step=FD_STEP, fd_tol=FD_REL_TOL):
    """Second-derivative test of X -> tau(phi(f1 X) K^* phi(f2 X) K) along Y.

    Components: h''(0) >= 0 (analytic), analytic vs central-difference
    agreement, and if ``X2`` is given, segment convexity between X and X2.
    """
    X, Y = _pair(X, Y, phi)
    if not isinstance(tau, TracialFunctional):
        tau = TracialFunctional(tau)
    an, scale = lieb_second_derivative(f1, f2, phi, tau, K, X, Y)
    fd = lieb_second_difference(f1, f2, phi, tau, K, X, Y, fd_step)
    denom = max(abs(an), abs(fd))
    err = abs(an - fd)
    rel = err / denom if denom > 0 else 0.0
    details = {"h2_analytic": an, "h2_finite_difference": fd, "fd_relative_error": rel}
    parts = [
        CheckOutcome.from_margins("second_derivative", an, -an, scale, tol, seed, details),
        CheckOutcome.from_margins("fd_agreement", fd_tol * denom - err, 0.0, denom, 0.0, seed),
    ]
    if X2 is not None:
        X2 = as_matrix(X2)

        def value(Z):
            v = lieb_functional(f1, f2, phi, tau, K, Z)
            return v, abs(v)

        parts.extend(_scalar_segment("midpoint_convexity", value, X, X2, tol, seed))
    out = worst_of("lieb_convexity", parts, seed)
    out.details["fd_relative_error"] = rel
    out.details["h2_analytic"] = an
    return out


def joint_value_direct(f1, f2, phi, psi, tau, X, Y):
    root = apply(SQRT, phi(apply(f1, X)))
    return tau(root @ psi(apply(f2, Y)) @ root).real


def joint_value_embedded(f1, f2, phi, psi, tau, X, Y):
    """Same functional through the direct-sum map and K = [[0, 0], [1, 0]]."""
    X, Y = as_matrix(X), as_matrix(Y)
    m, n = X.shape[0], Y.shape[0]
    Z = np.zeros((m + n, m + n), dtype=np.complex128)
    Z[:m, :m], Z[m:, m:] = X, Y
    big = DirectSum(phi, psi)
    k = phi.out_dim
    K = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    K[k:, :k] = np.eye(k)
    A = big(apply(f1, Z))
    B = big(apply(f2, Z))
    return tau(A @ K.conj().T @ B @ K).real


def check_joint_convexity(f1, f2, phi, psi, tau, first, second, tol=LOEWNER_TOL, seed=0,
                          agreement_tol=EMBEDDING_AGREEMENT_TOL, grid=True):
    """Midpoint (and grid) joint convexity of
    (X, Y) -> tau(phi(f1 X)^1/2 psi(f2 Y) phi(f1 X)^1/2),
    evaluated directly and through the direct-sum embedding."""
    _require_class(f1, FunctionClass.OMD_POS, "f1")
    _require_class(f2, FunctionClass.OMD_POS, "f2")
    if phi.out_dim != psi.out_dim:
        raise DimensionMismatchError("phi and psi must share their output dimension")
    if not isinstance(tau, TracialFunctional):
        tau = TracialFunctional(tau)
    X1, Y1 = (as_matrix(M) for M in first)
    X2, Y2 = (as_matrix(M) for M in second)
    check_same_dim(X1, X2)
    check_same_dim(Y1, Y2)

    d1 = joint_value_direct(f1, f2, phi, psi, tau, X1, Y1)
    d2 = joint_value_direct(f1, f2, phi, psi, tau, X2, Y2)
    dm = joint_value_direct(f1, f2, phi, psi, tau, 0.5 * (X1 + X2), 0.5 * (Y1 + Y2))
    e1 = joint_value_embedded(f1, f2, phi, psi, tau, X1, Y1)
    e2 = joint_value_embedded(f1, f2, phi, psi, tau, X2, Y2)
    em = joint_value_embedded(f1, f2, phi, psi, tau, 0.5 * (X1 + X2), 0.5 * (Y1 + Y2))
    scale = max(abs(d1), abs(d2), abs(dm))
    direct = CheckOutcome.from_scalar("direct", dm, 0.5 * (d1 + d2), tol, scale=scale, seed=seed)
    embedded = CheckOutcome.from_scalar("embedded", em, 0.5 * (e1 + e2), tol, scale=scale, seed=seed)
    gap = abs(direct.margin - embedded.margin)
    agree = CheckOutcome.from_margins("embedding_agreement", agreement_tol * scale - gap, 0.0, scale, 0.0, seed)
    parts = [direct, embedded, agree]
    if grid:
        for t in GRID:
            vt = joint_value_direct(f1, f2, phi, psi, tau, t * X1 + (1 - t) * X2, t * Y1 + (1 - t) * Y2)
            parts.append(CheckOutcome.from_scalar(
                f"direct@t={t}", vt, t * d1 + (1 - t) * d2, tol, scale=max(scale, abs(vt)), seed=seed,
            ))
    out = worst_of("joint_convexity", parts, seed)
    out.details["margin_gap"] = gap
    return out
