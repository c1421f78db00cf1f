import math
import random

import pytest

from taylormeasure import (
    Bounded,
    CenterMismatch,
    DivergenceUnknown,
    FiniteSupport,
    OutOfDomain,
    QuadratureStall,
    Unverified,
    builtin,
    cos_rep,
    eval_rep,
    exp_rep,
    geometric_rep,
    linear_combine,
    lp_norm_on_interval,
    multiply,
    polynomial_rep,
    power,
    recenter,
    rule_sequence,
    sin_rep,
    sup_distance_on_grid,
    truncate_rep,
)
from taylormeasure.analytic import AnalyticRep


class TestBuiltins:
    def test_exp_coefficients(self):
        rep = exp_rep()
        assert [rep.coefficients.a(n) for n in range(5)] == [1.0] * 5
        rep1 = exp_rep(1.0)
        assert rep1.coefficients.a(3) == pytest.approx(math.e, rel=1e-15)

    def test_sin_coefficients(self):
        rep = sin_rep()
        assert [rep.coefficients.a(n) for n in range(6)] == [0.0, 1.0, 0.0, -1.0, 0.0, 1.0]

    def test_polynomial_shift(self):
        rep = polynomial_rep([1.0, 0.0, 3.0], center=1.0)
        assert [rep.coefficients.a(k) for k in range(4)] == [4.0, 6.0, 6.0, 0.0]
        assert rep.coefficients.certificate == FiniteSupport(2)

    def test_geometric_coefficients(self):
        rep = geometric_rep(0.5)
        # a_n = n! * 2^(n+1)
        assert rep.coefficients.a(0) == 2.0
        assert rep.coefficients.a(2) == 16.0
        assert rep.radius_hint == 0.5

    def test_geometric_domain(self):
        with pytest.raises(OutOfDomain):
            geometric_rep(1.0)
        with pytest.raises(OutOfDomain):
            geometric_rep(-1.2)

    def test_builtin_dispatch(self):
        assert builtin("exp").coefficients.a(0) == 1.0
        assert builtin("polynomial", coeffs=[1.0, 2.0]).coefficients.a(1) == 2.0
        with pytest.raises(ValueError):
            builtin("polynomial")
        with pytest.raises(ValueError):
            builtin("tangent")

    def test_radius_must_be_positive(self):
        with pytest.raises(ValueError):
            AnalyticRep(0.0, exp_rep().coefficients, 0.0)


class TestEval:
    def test_exp_at_one(self):
        got = eval_rep(exp_rep(), 1.0, 1e-12)
        assert abs(got.value - math.e) <= 1e-12
        assert got.abs_error <= 1e-12

    def test_sin_at_half_pi(self):
        got = eval_rep(sin_rep(), math.pi / 2, 1e-12)
        assert got.value == pytest.approx(1.0, abs=1e-13)

    def test_center_is_exact(self):
        rep = polynomial_rep([7.0, 1.0], center=2.0)
        got = eval_rep(rep, 2.0)
        assert got.value == 9.0 and got.abs_error == 0.0
        assert eval_rep(geometric_rep(0.5), 0.5).value == 2.0

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            eval_rep(geometric_rep(0.0), 1.0)
        with pytest.raises(OutOfDomain):
            eval_rep(geometric_rep(0.5), -0.1)

    def test_unverified_diverges(self):
        rep = AnalyticRep(0.0, rule_sequence(lambda n: 1.0, Unverified()), math.inf)
        with pytest.raises(DivergenceUnknown):
            eval_rep(rep, 0.5)

    def test_fidelity_random_points(self):
        rnd = random.Random(20260814)
        cases = [
            (exp_rep(), math.exp, 3.0),
            (sin_rep(), math.sin, 3.0),
            (cos_rep(), math.cos, 3.0),
            (geometric_rep(0.0), lambda x: 1.0 / (1.0 - x), 0.8),
            (polynomial_rep([1.0, -2.0, 0.5]), lambda x: 1.0 - 2.0 * x + 0.5 * x * x, 3.0),
        ]
        for rep, ref, span in cases:
            for _ in range(100):
                x = rep.center + rnd.uniform(-span, span)
                got = eval_rep(rep, x, 1e-12).value
                want = ref(x)
                assert abs(got - want) <= 1e-12 + abs(want) * 1e-13


class TestMultiply:
    def test_exp_squared_coefficients(self):
        sq = multiply(exp_rep(), exp_rep())
        for l in range(12):
            assert sq.coefficients.a(l) == pytest.approx(2.0 ** l, rel=1e-13)

    def test_value_homomorphism(self):
        rnd = random.Random(7)
        reps = [exp_rep(), sin_rep(), cos_rep(), polynomial_rep([0.5, 2.0])]
        refs = [math.exp, math.sin, math.cos, lambda x: 0.5 + 2.0 * x]
        for _ in range(30):
            i, j = rnd.randrange(4), rnd.randrange(4)
            x = rnd.uniform(-2.0, 2.0)
            prod = multiply(reps[i], reps[j])
            want = refs[i](x) * refs[j](x)
            assert eval_rep(prod, x, 1e-12).value == pytest.approx(want, abs=3e-11)

    def test_finite_times_finite_is_exact(self):
        prod = multiply(polynomial_rep([1.0, 1.0]), polynomial_rep([1.0, -1.0]))
        assert [prod.coefficients.a(k) for k in range(4)] == [1.0, 0.0, -2.0, 0.0]
        assert prod.coefficients.certificate == FiniteSupport(2)

    def test_multiplicative_identity(self):
        one = polynomial_rep([1.0])
        rep = multiply(sin_rep(), one)
        for n in range(8):
            assert rep.coefficients.a(n) == sin_rep().coefficients.a(n)

    def test_center_mismatch(self):
        with pytest.raises(CenterMismatch):
            multiply(exp_rep(0.0), exp_rep(1.0))

    def test_geometric_square(self):
        g2 = multiply(geometric_rep(0.0), geometric_rep(0.0))
        # 1/(1-x)^2 has a_n = (n+1)!
        assert g2.coefficients.a(3) == 24.0
        assert eval_rep(g2, 0.5, 1e-12).value == pytest.approx(4.0, abs=1e-11)


class TestPower:
    def test_square_of_exp(self):
        sq = power(exp_rep(), 2)
        assert eval_rep(sq, 1.0, 1e-12).value == pytest.approx(math.e ** 2, abs=1e-10)

    def test_zeroth_power(self):
        rep = power(geometric_rep(0.0), 0)
        assert eval_rep(rep, 0.9).value == 1.0
        assert rep.coefficients.certificate == FiniteSupport(0)

    def test_monomial_cube(self):
        cube = power(polynomial_rep([0.0, 1.0]), 3)
        assert [cube.coefficients.a(k) for k in range(5)] == [0.0, 0.0, 0.0, 6.0, 0.0]

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            power(exp_rep(), -1)

    def test_fifth_power_value(self):
        p5 = power(cos_rep(), 5)
        x = 0.4
        assert eval_rep(p5, x, 1e-12).value == pytest.approx(math.cos(x) ** 5, abs=1e-10)


class TestLinearCombine:
    def test_vector_space_law(self):
        rnd = random.Random(11)
        for _ in range(20):
            a, b = rnd.uniform(-3, 3), rnd.uniform(-3, 3)
            x = rnd.uniform(-2, 2)
            rep = linear_combine(a, sin_rep(), b, exp_rep())
            want = a * math.sin(x) + b * math.exp(x)
            assert eval_rep(rep, x, 1e-12).value == pytest.approx(want, abs=1e-10)

    def test_finite_path_exact(self):
        rep = linear_combine(2.0, polynomial_rep([1.0, 1.0]), -1.0, polynomial_rep([0.0, 2.0]))
        assert [rep.coefficients.a(k) for k in range(3)] == [2.0, 0.0, 0.0]

    def test_separates_points(self):
        ident = polynomial_rep([0.0, 1.0])
        x, y = 0.3, 0.30000001
        assert eval_rep(ident, x).value == x
        assert eval_rep(ident, x).value != eval_rep(ident, y).value

    def test_center_mismatch(self):
        with pytest.raises(CenterMismatch):
            linear_combine(1.0, exp_rep(0.0), 1.0, exp_rep(1.0))


class TestRecenter:
    def test_exp_shift_coefficients(self):
        rep = recenter(exp_rep(0.0), 1.0, 1e-13)
        for k in range(21):
            assert abs(rep.coefficients.a(k) - math.e) <= 1e-12

    def test_polynomial_shift_exact(self):
        rep = recenter(polynomial_rep([1.0, 0.0, 3.0]), 1.0)
        assert [rep.coefficients.a(k) for k in range(3)] == [4.0, 6.0, 6.0]
        assert rep.coefficients.certificate == FiniteSupport(2)

    def test_eval_agreement(self):
        rep = recenter(exp_rep(0.0), 1.0, 1e-12)
        assert abs(eval_rep(rep, 1.5, 1e-12).value - eval_rep(exp_rep(), 1.5, 1e-12).value) <= 1e-10

    def test_round_trip(self):
        for base in (exp_rep(), sin_rep()):
            there = recenter(base, 0.7, 1e-13)
            back = recenter(there, 0.0, 1e-13)
            for k in range(16):
                assert abs(back.coefficients.a(k) - base.coefficients.a(k)) <= 1e-10

    def test_geometric_recenter(self):
        rep = recenter(geometric_rep(0.0), 0.5, 1e-12)
        # derivatives of 1/(1-x) at 0.5: n! 2^(n+1)
        assert rep.coefficients.a(1) == pytest.approx(4.0, rel=1e-11)
        assert eval_rep(rep, 0.6, 1e-12).value == pytest.approx(2.5, abs=1e-9)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            recenter(geometric_rep(0.0), 1.0)

    def test_noop_shift(self):
        rep = exp_rep(0.0)
        assert recenter(rep, 0.0) is rep


class TestSupDistance:
    def test_degree20_truncation(self):
        d = sup_distance_on_grid(truncate_rep(exp_rep(), 20), math.exp, (0.0, 1.0), 1001)
        assert d <= 1e-10

    def test_degree2_remainder(self):
        d = sup_distance_on_grid(truncate_rep(exp_rep(), 2), math.exp, (0.0, 1.0), 1001)
        assert d == pytest.approx(math.e - 2.5, rel=1e-12)

    def test_self_distance_is_noise(self):
        rep = exp_rep()
        d = sup_distance_on_grid(rep, lambda x: eval_rep(rep, x, 1e-12).value, (0.0, 1.0), 101)
        assert d == 0.0

    def test_density_proxy_monotone(self):
        dists = [
            sup_distance_on_grid(truncate_rep(exp_rep(), N), math.exp, (0.0, 1.0), 101)
            for N in (5, 10, 15, 20, 25)
        ]
        assert all(b <= a for a, b in zip(dists, dists[1:]))
        assert dists[-1] <= 1e-12

    def test_domain_and_grid_validation(self):
        with pytest.raises(OutOfDomain):
            sup_distance_on_grid(geometric_rep(0.0), lambda x: 0.0, (0.0, 2.0), 11)
        with pytest.raises(ValueError):
            sup_distance_on_grid(exp_rep(), math.exp, (0.0, 1.0), 1)


class TestLpNorm:
    def test_constant(self):
        assert lp_norm_on_interval(polynomial_rep([1.0]), 2.0, (0.0, 1.0)) == pytest.approx(1.0, abs=1e-12)

    def test_exp_l1(self):
        got = lp_norm_on_interval(exp_rep(), 1.0, (0.0, 1.0), 1e-9)
        assert got == pytest.approx(math.e - 1.0, abs=1e-9)

    def test_identity_l2(self):
        got = lp_norm_on_interval(polynomial_rep([0.0, 1.0]), 2.0, (0.0, 1.0), 1e-9)
        assert got == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-9)

    def test_p_validation(self):
        with pytest.raises(ValueError):
            lp_norm_on_interval(exp_rep(), 0.5, (0.0, 1.0))

    def test_stall(self):
        with pytest.raises(QuadratureStall):
            lp_norm_on_interval(geometric_rep(0.0), 1.0, (0.0, 0.8), 1e-18, depth_cap=4)

    def test_depth_cap_validation(self):
        with pytest.raises(ValueError):
            lp_norm_on_interval(exp_rep(), 1.0, (0.0, 1.0), depth_cap=0)


class TestTruncate:
    def test_prefix_matches(self):
        t = truncate_rep(sin_rep(), 5)
        for n in range(6):
            assert t.coefficients.a(n) == sin_rep().coefficients.a(n)
        assert t.coefficients.a(7) == 0.0

    def test_entire_after_truncation(self):
        t = truncate_rep(geometric_rep(0.0), 3)
        # polynomial now, evaluable beyond the old radius
        got = eval_rep(t, 2.0).value
        assert got == pytest.approx(1.0 + 2.0 + 4.0 + 8.0, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            truncate_rep(exp_rep(), -1)
