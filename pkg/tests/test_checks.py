import numpy as np
import pytest

from opconvex import funcalc as fc
from opconvex.core import random_hermitian_array, random_matrix, random_pd_array
from opconvex.errors import ClassViolationError, DimensionMismatchError, NotStrictlyPositiveError, UnknownMeanError
from opconvex.funcalc import FunctionClass as FC
from opconvex.outcomes import Verdict
from opconvex.posmaps import CongruenceSum, Identity, Pinching, State, TracialFunctional, unitalize
from opconvex.verifier import checks as ck

from conftest import S, T

OK = (Verdict.PASS, Verdict.MARGINAL)


def pd(rng, d, cond=1e4):
    return random_pd_array(d, cond, rng)


class TestMainConvexity:
    def test_equal_when_same_point(self, rng):
        X = pd(rng, 3)
        o = ck.check_main_convexity(fc.neg_inverse(), fc.INVERSE, Identity(3), X, X)
        assert o.relation == "Equal" and abs(o.margin) <= 1e-12 * o.scale

    def test_state_inverse_concavity(self):
        rng = np.random.default_rng(3)
        for i in range(50):
            X, Y = pd(rng, 4), pd(rng, 4)
            o = ck.check_main_convexity(fc.neg_inverse(), fc.INVERSE, State.random(4, i), X, Y)
            assert o.verdict in OK

    def test_resolvent_log_congruence(self):
        rng = np.random.default_rng(4)
        phi = CongruenceSum.random(4, 2, 17, out_dim=3)
        X, Y = pd(rng, 4), pd(rng, 4)
        o = ck.check_main_convexity(fc.log(), fc.resolvent(0.5), phi, X, Y, grid=True)
        assert o.verdict is Verdict.PASS

    def test_trace_spot_check_along_segment(self):
        # independent of the Loewner machinery: traces along the segment are convex
        rng = np.random.default_rng(5)
        phi = CongruenceSum.random(4, 2, 17)
        X, Y = pd(rng, 4), pd(rng, 4)
        g, f = fc.log(), fc.resolvent(0.5)
        ts = np.linspace(0, 1, 41)
        vals = np.array([np.trace(ck.composed(g, phi, f, t * X + (1 - t) * Y)).real for t in ts])
        assert np.all(vals[:-2] - 2 * vals[1:-1] + vals[2:] >= -1e-9 * np.max(np.abs(vals)))

    @pytest.mark.parametrize("g,f", [
        (fc.power(2.0), fc.resolvent(1.0)),
        (fc.log(), fc.SQRT),
        (fc.power(0.5, FC.NONE), fc.resolvent(1.0)),
    ])
    def test_class_gate(self, g, f):
        with pytest.raises(ClassViolationError):
            ck.check_main_convexity(g, f, Identity(2), np.eye(2), 2 * np.eye(2))

    def test_strictness_gate(self):
        with pytest.raises(NotStrictlyPositiveError):
            ck.check_main_convexity(fc.log(), fc.INVERSE, CongruenceSum([np.diag([1.0, 0.0])]),
                                    np.eye(2), 2 * np.eye(2))

    def test_dimension_gate(self):
        with pytest.raises(DimensionMismatchError):
            ck.check_main_convexity(fc.log(), fc.INVERSE, Identity(3), np.eye(2), np.eye(2))

    def test_power3_violation_is_found(self):
        rng = np.random.default_rng(0)
        found = False
        for _ in range(300):
            o = ck.check_main_convexity(fc.power(3.0), fc.resolvent(0.0), Identity(2), pd(rng, 2), pd(rng, 2),
                                        enforce_classes=False)
            found |= o.verdict is Verdict.FAIL
        assert found


class TestProofChain:
    def test_same_point_all_equal(self, rng):
        X = pd(rng, 3)
        for o in ck.check_proof_chain(fc.SQRT, fc.resolvent(1.0), Pinching([1, 2]), X, X):
            assert o.relation == "Equal"

    def test_catalog_instance(self):
        rng = np.random.default_rng(6)
        X, Y = pd(rng, 4), pd(rng, 4)
        links = ck.check_proof_chain(fc.SQRT, fc.resolvent(1.0), Pinching([2, 2]), X, Y)
        assert [o.check_id for o in links] == ["proof_chain_eq1", "proof_chain_eq2", "proof_chain_eq3"]
        assert all(o.verdict in OK for o in links)
        assert links[2].details["mean_ordering_margin"] >= -1e-9 * links[2].details["mean_ordering_scale"]

    def test_gate(self):
        with pytest.raises(ClassViolationError):
            ck.check_proof_chain(fc.power(3.0), fc.resolvent(1.0), Identity(2), np.eye(2), np.eye(2))

    def test_links_compose_to_main(self):
        rng = np.random.default_rng(7)
        g, f, phi = fc.log(), fc.power(-0.4), State.random(3, 1)
        for _ in range(50):
            X, Y = pd(rng, 3), pd(rng, 3)
            links = ck.check_proof_chain(g, f, phi, X, Y)
            main = ck.check_main_convexity(g, f, phi, X, Y)
            if all(o.verdict is Verdict.PASS for o in links):
                assert main.verdict is Verdict.PASS


class TestAuxiliaryInequalities:
    def test_identity_outer_equal(self, rng):
        o = ck.check_harmonic_subadditivity(Identity(3), pd(rng, 3), pd(rng, 3))
        assert o.details["outer"]["verdict"] in ("Pass", "Marginal")
        assert abs(o.details["outer"]["margin"]) <= 1e-9 * o.details["outer"]["scale"]

    def test_state_scalar_oracle(self):
        rng = np.random.default_rng(8)
        for i in range(100):
            X, Y = pd(rng, 3), pd(rng, 3)
            phi = State.random(3, i)
            o = ck.check_harmonic_subadditivity(phi, X, Y)
            assert o.verdict in OK
            # scalar: phi(X ! Y) <= harmonic mean of phi(X), phi(Y)
            h = ck.harmonic_mean(X, Y)
            a, b = phi(X)[0, 0].real, phi(Y)[0, 0].real
            assert phi(h)[0, 0].real <= 2 * a * b / (a + b) * (1 + 1e-12)

    def test_random_congruence_5x5(self):
        rng = np.random.default_rng(9)
        o = ck.check_harmonic_subadditivity(CongruenceSum.random(5, 3, 2), pd(rng, 5), pd(rng, 5))
        assert o.verdict in OK and o.details["inner"]["verdict"] in ("Pass", "Marginal")

    def test_f_mean_same_point(self, rng):
        X = pd(rng, 3)
        assert ck.check_f_mean_inequality(fc.resolvent(2.0), X, X).relation == "Equal"

    def test_f_mean_inverse_is_equality(self):
        X, Y = np.diag([1.0, 3.0, 0.2]), np.diag([2.0, 0.5, 9.0])
        assert ck.check_f_mean_inequality(fc.resolvent(0.0), X, Y).relation == "Equal"

    def test_f_mean_mixture(self):
        rng = np.random.default_rng(10)
        f = fc.decreasing_mixture(0.2, [(1.0, 0.3), (2.0, 4.0)])
        assert ck.check_f_mean_inequality(f, pd(rng, 4), pd(rng, 4)).verdict in OK

    def test_f_mean_gate(self):
        with pytest.raises(ClassViolationError):
            ck.check_f_mean_inequality(fc.log(), np.eye(2), np.eye(2))


class TestMeanSubadditivity:
    def test_arithmetic_equal(self, rng):
        o = ck.check_mean_subadditivity("arithmetic", CongruenceSum.random(3, 2, 0), pd(rng, 3), pd(rng, 3))
        assert o.relation == "Equal"

    def test_geometric_state_scalar(self):
        rng = np.random.default_rng(11)
        for i in range(50):
            X, Y, phi = pd(rng, 3), pd(rng, 3), State.random(3, i)
            o = ck.check_mean_subadditivity("geometric", phi, X, Y)
            assert o.verdict in OK
            a, b = phi(X)[0, 0].real, phi(Y)[0, 0].real
            assert phi(ck.geometric_mean(X, Y))[0, 0].real <= np.sqrt(a * b) * (1 + 1e-12)

    def test_harmonic_pinching(self, rng):
        assert ck.check_mean_subadditivity("harmonic", Pinching([1, 2]), pd(rng, 3), pd(rng, 3)).verdict in OK

    def test_unknown(self):
        with pytest.raises(UnknownMeanError):
            ck.check_mean_subadditivity("heronian", Identity(2), np.eye(2), np.eye(2))

    @pytest.mark.parametrize("c", [0.01, 100.0])
    @pytest.mark.parametrize("sigma", ["harmonic", "geometric"])
    def test_scale_invariance(self, c, sigma):
        rng = np.random.default_rng(12)
        for i in range(30):
            X, Y, phi = pd(rng, 3), pd(rng, 3), CongruenceSum.random(3, 2, i)
            a = ck.check_mean_subadditivity(sigma, phi, X, Y)
            b = ck.check_mean_subadditivity(sigma, phi, c * X, c * Y)
            assert (a.verdict is Verdict.FAIL) == (b.verdict is Verdict.FAIL)
            assert abs(a.normalized_margin - b.normalized_margin) <= 1e-8
            h1 = ck.check_harmonic_subadditivity(phi, X, Y)
            h2 = ck.check_harmonic_subadditivity(phi, c * X, c * Y)
            assert (h1.verdict is Verdict.FAIL) == (h2.verdict is Verdict.FAIL)


class TestCounterexample:
    def test_values(self):
        cx = ck.reproduce_counterexample()
        assert np.max(np.abs(cx.S_geo_T - ck.REFERENCE_S_GEO_T)) < 1e-4
        lam1, lam2 = cx.eigenvalues
        assert abs(lam1 - 0.5786) < 1e-3 and abs(lam2 - (-0.0159)) < 1e-3
        assert lam2 < -1e-3

    def test_geometric_path_fails(self):
        o = ck.check_geometric_path(fc.SQRT, S, T)
        assert o.verdict is Verdict.FAIL
        assert o.margin == pytest.approx(ck.reproduce_counterexample().eigenvalues[1], rel=1e-9)

    def test_block_characterization(self):
        o = ck.check_geometric_block_outcome(S, T)
        assert o.verdict in OK
        assert o.details["perturbed_relation"] != "GreaterEqual"


class TestTraceFunctionals:
    def _maps(self, seed=0):
        return CongruenceSum.random(3, 2, seed, out_dim=2), CongruenceSum.random(2, 2, seed + 1)

    def test_separate_same_endpoints(self, rng):
        phi, psi = self._maps()
        P, A = pd(rng, 3), pd(rng, 2)
        o = ck.check_separate_convexity_two_var(fc.resolvent(1.0), fc.INV_SQRT, fc.log(), phi, psi, "x", P, A, A)
        assert o.relation == "Equal"

    def test_separate_linear_g(self):
        rng = np.random.default_rng(13)
        phi, psi = self._maps(3)
        for fixed in ("x", "y"):
            P = pd(rng, 3 if fixed == "x" else 2)
            d = 2 if fixed == "x" else 3
            o = ck.check_separate_convexity_two_var(fc.resolvent(0.5), fc.resolvent(2.0), fc.power(1.0),
                                                    phi, psi, fixed, P, pd(rng, d), pd(rng, d))
            assert o.verdict in OK

    def test_separate_log(self):
        rng = np.random.default_rng(14)
        phi, psi = self._maps(5)
        o = ck.check_separate_convexity_two_var(fc.power(-0.5), fc.resolvent(0.1), fc.log(), phi, psi, "x",
                                                pd(rng, 3), pd(rng, 2), pd(rng, 2))
        assert o.verdict in OK

    def test_switch_routes_agree(self):
        rng = np.random.default_rng(15)
        phi, psi = self._maps(7)
        X, Y = pd(rng, 3), pd(rng, 2)
        a = ck.two_var_trace(fc.log(), fc.INVERSE, fc.resolvent(1.0), phi, psi, X, Y, "x")[0]
        b = ck.two_var_trace(fc.log(), fc.INVERSE, fc.resolvent(1.0), phi, psi, X, Y, "y")[0]
        assert a == pytest.approx(b, rel=1e-9)

    def test_trace_switch_identity_P(self, rng):
        Q = pd(rng, 3)
        o = ck.check_trace_switch(np.eye(3), Q, fc.log())
        assert o.details["lhs"] == pytest.approx(np.sum(np.log(np.linalg.eigvalsh(Q))), rel=1e-12)
        assert o.verdict in OK

    def test_trace_switch_power_one(self, rng):
        P, Q = pd(rng, 3), pd(rng, 3)
        o = ck.check_trace_switch(P, Q, fc.power(1.0))
        assert o.details["lhs"] == pytest.approx(np.trace(P @ Q).real, rel=1e-12)

    def test_trace_switch_log_isospectral(self, rng):
        o = ck.check_trace_switch(pd(rng, 4), pd(rng, 4), fc.log())
        assert o.verdict in OK and -o.margin <= 1e-9 * o.scale
        assert o.details["isospectral_gap"] <= 1e-10


class TestLieb:
    def test_zero_direction(self, rng):
        X = pd(rng, 3)
        h2, _ = ck.lieb_second_derivative(fc.resolvent(1.0), fc.resolvent(2.0), Identity(3), TracialFunctional(),
                                          np.eye(3), X, np.zeros((3, 3)))
        assert h2 == 0.0

    def test_zero_K(self, rng):
        X, Y = pd(rng, 3), random_hermitian_array(3, 0.1, rng)
        o = ck.check_lieb_convexity(fc.resolvent(1.0), fc.resolvent(2.0), Identity(3), TracialFunctional(),
                                    np.zeros((3, 3)), X, Y, pd(rng, 3))
        assert o.details["h2_analytic"] == 0.0 and o.verdict in OK
        assert ck.lieb_functional(fc.resolvent(1.0), fc.resolvent(2.0), Identity(3), TracialFunctional(),
                                  np.zeros((3, 3)), X) == 0.0

    def test_spec_instance(self):
        rng = np.random.default_rng(16)
        X = random_pd_array(3, 1e2, rng)
        Y = random_hermitian_array(3, 0.5, rng)
        K = random_matrix(3, 3, rng, min_singular=0.1)
        o = ck.check_lieb_convexity(fc.resolvent(0.5), fc.resolvent(2.0), CongruenceSum.random(3, 2, 1),
                                    TracialFunctional(1.0), K, X, Y, pd(rng, 3))
        assert o.verdict is Verdict.PASS
        assert o.details["h2_analytic"] >= 0 and o.details["fd_relative_error"] <= 1e-4

    @pytest.mark.parametrize("floor", [1e-1, 1e-2, 1e-3, 0.0])
    def test_k_floor_sensitivity(self, floor, capsys):
        # push the smallest singular value of K down to the floor; convexity
        # holds for every K, so only the size of the margin may move
        from opconvex.verifier.campaign import derivative_point

        rng = np.random.default_rng(int(floor * 1e4) + 11)
        worst, smallest = np.inf, np.inf
        for _ in range(60):
            d = int(rng.integers(2, 5))
            X, Y = derivative_point(d, 0.5, rng)
            U, sv, Vh = np.linalg.svd(random_matrix(d, d, rng))
            sv[-1] = floor
            K = (U * sv) @ Vh
            o = ck.check_lieb_convexity(fc.resolvent(0.5), fc.resolvent(3.0), Identity(d), TracialFunctional(),
                                        K, X, Y, pd(rng, d))
            assert o.verdict in OK
            worst = min(worst, o.details["h2_analytic"] / max(o.scale, 1e-300))
            smallest = min(smallest, o.details["h2_analytic"])
        with capsys.disabled():
            print(f"\n[K floor {floor:g}] over 60 instances: min h''(0) {smallest:.3e}, "
                  f"min normalized {worst:.3e}")

    def test_requires_resolvent(self, rng):
        with pytest.raises(ClassViolationError):
            ck.check_lieb_convexity(fc.INVERSE, fc.resolvent(1.0), Identity(2), TracialFunctional(),
                                    np.eye(2), np.eye(2), np.eye(2))


class TestJoint:
    def test_same_pairs_equal(self, rng):
        X, Y = pd(rng, 3), pd(rng, 2)
        phi, psi = CongruenceSum.random(3, 2, 0, out_dim=2), Identity(2)
        o = ck.check_joint_convexity(fc.resolvent(1.0), fc.INV_SQRT, phi, psi, TracialFunctional(), (X, Y), (X, Y))
        assert o.relation == "Equal"

    def test_scalar_grid_oracle(self):
        f1, f2 = fc.resolvent(1.0), fc.power(-0.5)
        c = 0.8
        xs = np.geomspace(0.05, 20, 12)
        for x1 in xs:
            for y1 in xs[::3]:
                x2, y2 = x1 * 1.7 + 0.1, y1 * 0.3 + 0.05
                o = ck.check_joint_convexity(f1, f2, Identity(1), Identity(1), TracialFunctional(c),
                                             (np.array([[x1]]), np.array([[y1]])),
                                             (np.array([[x2]]), np.array([[y2]])))
                assert o.verdict in OK
                mid = c * f1(0.5 * (x1 + x2)) * f2(0.5 * (y1 + y2))
                avg = 0.5 * c * (f1(x1) * f2(y1) + f1(x2) * f2(y2))
                assert mid <= avg * (1 + 1e-12)

    def test_random_3x3(self):
        rng = np.random.default_rng(17)
        phi, psi = CongruenceSum.random(3, 2, 4), CongruenceSum.random(3, 2, 5)
        o = ck.check_joint_convexity(fc.resolvent(1.0), fc.power(-0.5), phi, psi, TracialFunctional(1.0),
                                     (pd(rng, 3), pd(rng, 3)), (pd(rng, 3), pd(rng, 3)))
        assert o.verdict is Verdict.PASS and o.details["margin_gap"] <= 1e-8 * o.scale

    def test_output_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ck.check_joint_convexity(fc.INVERSE, fc.INVERSE, Identity(2), Identity(3), TracialFunctional(),
                                     (np.eye(2), np.eye(3)), (np.eye(2), np.eye(3)))


class TestUnitalChecks:
    def test_jensen_and_kadison(self):
        rng = np.random.default_rng(18)
        for i in range(30):
            u = unitalize(CongruenceSum.random(3, 2, i, out_dim=2), pd(rng, 3))
            assert ck.check_jensen(u, random_pd_array(3, 100.0, rng)).verdict in OK
            assert ck.check_kadison(u, random_hermitian_array(3, 4.0, rng)).verdict in OK
