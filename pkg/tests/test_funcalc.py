import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opconvex import funcalc as fc
from opconvex.core import haar_unitary, loewner_compare, random_hermitian, random_pd, random_pd_array
from opconvex.errors import ClassViolationError, DomainViolationError, ParseError
from opconvex.funcalc import FunctionClass as FC
from opconvex.means import geometric_mean

from conftest import S, T

CATALOG = [
    fc.power(0.5), fc.power(0.0), fc.power(1.0), fc.power(-0.3), fc.power(-1.0),
    fc.log(), fc.neg_inverse(), fc.resolvent(0.0), fc.resolvent(2.0), fc.neg_resolvent(0.5),
    fc.monotone_mixture(-0.5, 0.25, [(1.0, 0.1), (2.0, 5.0)]),
    fc.decreasing_mixture(0.2, [(1.0, 0.0), (0.5, 3.0)]),
]
OMD = [f for f in CATALOG if f.is_omd_pos]


class TestScalar:
    def test_resolvent(self):
        assert fc.eval_scalar(fc.resolvent(1.0), 1.0) == 0.5

    def test_sqrt(self):
        assert fc.eval_scalar(fc.SQRT, 4.0) == 2.0

    def test_dec_mixture(self):
        assert fc.eval_scalar(fc.decreasing_mixture(1.0, [(2.0, 3.0)]), 1.0) == pytest.approx(1.5)

    def test_mono_mixture_closed_form(self):
        f = fc.monotone_mixture(0.5, 2.0, [(3.0, 1.0)])
        x = 2.0
        assert f(x) == pytest.approx(0.5 + 2.0 * x + 3.0 * x / (1.0 + x))

    def test_neg_forms(self):
        assert fc.neg_inverse()(4.0) == -0.25
        assert fc.neg_resolvent(1.0)(1.0) == -0.5
        assert fc.log()(math.e) == pytest.approx(1.0)

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(DomainViolationError):
            fc.eval_scalar(fc.log(), x)

    @pytest.mark.parametrize("f", OMD, ids=str)
    def test_omd_positive(self, f):
        xs = np.geomspace(1e-6, 1e6, 50)
        assert np.all(fc.eval_scalar(f, xs) > 0)


class TestClasses:
    def test_defaults(self):
        assert fc.power(0.5).declared_class is FC.OM
        assert fc.power(-0.5).declared_class is FC.OMD_POS
        assert fc.power(2.0).declared_class is FC.NONE
        assert fc.log().declared_class is FC.OM
        assert fc.resolvent(1.0).declared_class is FC.OMD_POS

    @pytest.mark.parametrize("make,cls", [
        (lambda c: fc.power(2.0, c), FC.OM),
        (lambda c: fc.power(0.5, c), FC.OMD_POS),
        (lambda c: fc.power(-0.5, c), FC.OM),
        (lambda c: fc.ScalarFunctionSpec(fc.Resolvent(1.0), c), FC.OM),
        (lambda c: fc.ScalarFunctionSpec(fc.Log(), c), FC.OMD_POS),
        (lambda c: fc.ScalarFunctionSpec(fc.Log(), c), FC.NONE),
    ])
    def test_rejected_pairs(self, make, cls):
        with pytest.raises(ClassViolationError):
            make(cls)

    def test_power_may_opt_out(self):
        assert fc.power(0.5, FC.NONE).declared_class is FC.NONE

    @pytest.mark.parametrize("bad", [
        lambda: fc.resolvent(-1.0),
        lambda: fc.decreasing_mixture(0.0, []),
        lambda: fc.decreasing_mixture(1.0, [(-1.0, 1.0)]),
        lambda: fc.monotone_mixture(0.0, -1.0),
    ])
    def test_invalid_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestEncoding:
    @pytest.mark.parametrize("f", CATALOG + [fc.power(3.0), fc.power(0.5, FC.NONE)], ids=str)
    def test_round_trip(self, f):
        assert fc.parse(fc.render(f)) == f

    def test_examples(self):
        assert fc.render(fc.SQRT) == "power:0.5"
        assert fc.parse("resolvent:2.0") == fc.resolvent(2.0)
        f = fc.parse("dec_mixture:g=1.0;w=2.0,l=3.0|w=0.5,l=0.1")
        assert f == fc.decreasing_mixture(1.0, [(2.0, 3.0), (0.5, 0.1)])
        assert fc.parse("power:3@none").declared_class is FC.NONE

    @given(st.floats(-1.0, 1.0, allow_nan=False), st.floats(0, 1e6, allow_nan=False),
           st.lists(st.tuples(st.floats(1e-6, 1e3), st.floats(0, 1e3)), max_size=3))
    def test_round_trip_bit_exact(self, p, lam, terms):
        for f in (fc.power(p), fc.resolvent(lam), fc.monotone_mixture(p, lam, terms)):
            assert fc.parse(fc.render(f)) == f
        if terms:
            g = fc.decreasing_mixture(lam, terms)
            assert fc.parse(fc.render(g)) == g

    @pytest.mark.parametrize("text", [
        "", "pow:1", "power:x", "log:3", "resolvent:-1", "dec_mixture:g=1;w=1", "power:3@om",
        "mono_mixture:a=1", "power:0.5@weird", "dec_mixture:q=1",
    ])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            fc.parse(text)


class TestApply:
    def test_neg_inverse_diagonal(self):
        out = fc.apply(fc.neg_inverse(), np.diag([2.0, 4.0]))
        assert np.allclose(out, np.diag([-0.5, -0.25]), atol=1e-15)

    def test_sqrt_of_geometric_mean(self):
        R = fc.apply(fc.SQRT, geometric_mean(S, T))
        assert np.allclose(R @ R, geometric_mean(S, T), atol=1e-12)

    def test_inverse_product(self):
        X = random_pd(3, 10, 5).entries
        assert np.allclose(fc.apply(fc.resolvent(0.0), X) @ X, np.eye(3), atol=1e-10)

    def test_domain_violation(self):
        with pytest.raises(DomainViolationError):
            fc.apply(fc.log(), np.diag([1.0, -1.0]))

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.sampled_from(CATALOG))
    def test_naturality(self, d, seed, f):
        rng = np.random.default_rng(seed)
        X = random_pd_array(d, 1e3, rng)
        V = haar_unitary(d, rng)
        lhs = fc.apply(f, V @ X @ V.conj().T)
        rhs = V @ fc.apply(f, X) @ V.conj().T
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(np.max(np.abs(rhs)), 1.0)

    @pytest.mark.parametrize("f", CATALOG, ids=str)
    def test_commuting_case(self, f):
        x = np.array([0.03, 0.7, 2.0, 40.0])
        out = fc.apply(f, np.diag(x))
        assert np.allclose(out, np.diag(fc.eval_scalar(f, x)), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("f", OMD, ids=str)
    def test_omd_positive_definite(self, f):
        rng = np.random.default_rng(3)
        for _ in range(50):
            assert np.linalg.eigvalsh(fc.apply(f, random_pd_array(4, 1e4, rng)))[0] > 0

    def test_mixture_consistency(self, rng):
        terms = [(1.5, 0.2), (0.5, 4.0)]
        f = fc.monotone_mixture(0.7, 0.3, terms)
        X = random_pd_array(4, 1e3, rng)
        ref = 0.7 * np.eye(4) + 0.3 * X
        for w, lam in terms:
            # x/(lam + x) = 1 - lam/(lam + x)
            ref = ref + w * (np.eye(4) - lam * fc.apply(fc.resolvent(lam), X))
        out = fc.apply(f, X)
        assert np.max(np.abs(out - ref)) <= 1e-10 * np.max(np.abs(ref))


class TestDerivatives:
    def test_first_trivial(self):
        H = random_hermitian(3, 1.0, 0).entries
        assert np.allclose(fc.resolvent_first_derivative(0.0, np.eye(3), H), -H)

    def test_first_entrywise(self):
        out = fc.resolvent_first_derivative(0.0, np.diag([1.0, 2.0]), np.array([[0, 1.0], [1.0, 0]]))
        assert np.allclose(out, [[0, -0.5], [-0.5, 0]])

    def test_second_trivial(self):
        H = random_hermitian(3, 1.0, 1).entries
        assert np.allclose(fc.resolvent_second_derivative(0.0, np.eye(3), H), 2 * H @ H)
        assert np.allclose(fc.resolvent_second_derivative(1.0, np.eye(3), np.zeros((3, 3))), 0)

    def test_first_spec_instance(self):
        X, Y = random_pd(3, 10, 11).entries, random_hermitian(3, 1, 12).entries
        assert _first_error(1.0, X, Y) <= 1e-6

    def test_second_spec_instance(self):
        rng = np.random.default_rng(2)
        X, Y = random_pd_array(3, 10, rng), random_hermitian(3, 1.0, 2).entries
        assert _second_error(2.0, X, Y) <= 1e-4


def _first_error(lam, X, Y, t=1e-5):
    f = fc.resolvent(lam)
    fd = (fc.apply(f, X + t * Y) - fc.apply(f, X - t * Y)) / (2 * t)
    an = fc.resolvent_first_derivative(lam, X, Y)
    return np.max(np.abs(fd - an)) / np.max(np.abs(an))


def _second_error(lam, X, Y, t=1e-4):
    f = fc.resolvent(lam)
    fd = (fc.apply(f, X + t * Y) - 2 * fc.apply(f, X) + fc.apply(f, X - t * Y)) / t**2
    an = fc.resolvent_second_derivative(lam, X, Y)
    return np.max(np.abs(fd - an)) / np.max(np.abs(an))


class TestMonotonicitySample:
    def test_log_scalar(self):
        s = fc.check_monotonicity_sample(fc.log(), 1, 50, seed=0)
        assert s.failed == 0 and s.total == 50

    def test_resolvent(self):
        s = fc.check_monotonicity_sample(fc.resolvent(1.0), 4, 100, seed=1)
        assert s.total == 100 and s.failed == 0 and s.marginal + s.passed == 100

    def test_gate(self):
        with pytest.raises(ClassViolationError):
            fc.check_monotonicity_sample(fc.power(2.0), 2, 10, seed=0)

    @pytest.mark.parametrize("f", [f for f in CATALOG if f.declared_class is not FC.NONE], ids=str)
    def test_catalog(self, f):
        assert fc.check_monotonicity_sample(f, 3, 40, seed=4).failed == 0

    def test_outcome_direction(self):
        X = np.diag([1.0, 2.0])
        P = np.diag([1.0, 0.0])
        up = fc.monotonicity_outcome(fc.SQRT, X, P)
        down = fc.monotonicity_outcome(fc.INVERSE, X, P)
        assert up.margin >= 0 and down.margin >= 0
        assert loewner_compare(fc.apply(fc.INVERSE, X + P), fc.apply(fc.INVERSE, X)).holds_le
