import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from newton_boson.coherent import coherent_expectation
from newton_boson.errors import DivergenceError, PoleError
from newton_boson.findiff import (
    NewtonSeries,
    ScalarFunction,
    falling_factorial,
    negative_power_fractions,
    newton_coefficients,
    newton_partial_sum,
)
from newton_boson.notransform import (
    bernoulli_numbers,
    bose_laurent_fractions,
    bose_laurent_series,
    factorial_power_gamma,
    inverse_transform_by_coefficients,
    minus_zeta_negative,
    pair_names,
    transform_by_coefficients,
    transform_pair,
    transform_quadrature,
    verified_zeta_sign,
    zeta_newton_series,
    zeta_series_fractions,
)


class TestBernoulli:
    def test_leading_values(self):
        B = bernoulli_numbers(12)
        assert B[0] == 1
        assert B[1] == Fraction(-1, 2)
        assert B[2] == Fraction(1, 6)
        assert B[3] == 0
        assert B[4] == Fraction(-1, 30)
        assert B[12] == Fraction(-691, 2730)

    def test_odd_indices_vanish(self):
        B = bernoulli_numbers(15)
        for j in range(1, 8):
            assert B[2 * j + 1] == 0

    def test_matches_mpmath(self):
        B = bernoulli_numbers(20)
        with mp.workprec(256):
            for k in range(21):
                want = mp.bernoulli(k)
                got = mp.mpf(B[k].numerator) / B[k].denominator
                assert abs(got - want) < mpf(2) ** -240, k


class TestZetaOracle:
    def test_rational_values(self):
        assert minus_zeta_negative(0) == Fraction(1, 2)
        assert minus_zeta_negative(1) == Fraction(1, 12)
        assert minus_zeta_negative(2) == 0
        assert minus_zeta_negative(3) == Fraction(-1, 120)

    def test_matches_mpmath_zeta(self):
        with mp.workprec(256):
            for n in range(9):
                want = -mp.zeta(-n)
                frac = minus_zeta_negative(n)
                got = mp.mpf(frac.numerator) / frac.denominator
                assert abs(got - want) < mpf(2) ** -240, n


class TestCoefficientTransform:
    def test_exponential_pair(self):
        with mp.workprec(256):
            z = mpf("0.7")
            series = transform_by_coefficients([z ** k for k in range(9)], 8)
            for n in range(9):
                got = newton_partial_sum(series, 8, n)
                assert abs(got - (1 + z) ** n) < mpf(2) ** -230, n

    def test_power_pair(self):
        r = 3
        coeffs = [0] * r + [math.factorial(r)]
        series = transform_by_coefficients(coeffs, 6)
        for n in range(7):
            assert newton_partial_sum(series, 6, n) == falling_factorial(n, r)

    def test_constant(self):
        series = transform_by_coefficients([1], 4)
        for n in range(5):
            assert newton_partial_sum(series, 4, n) == 1


class TestInverseTransform:
    def test_exponential_recovers_taylor_coefficients(self):
        with mp.workprec(256):
            z = mpf("0.7")
            f_tilde = ScalarFunction(lambda n: (1 + z) ** mp.convert(n))
            coeffs = inverse_transform_by_coefficients(f_tilde, 8)
            for k, c in enumerate(coeffs):
                assert abs(c - z ** k) < mpf("1e-40"), k

    def test_factorial_power_basis_element(self):
        f_tilde = ScalarFunction(lambda n: falling_factorial(int(n), 2))
        coeffs = inverse_transform_by_coefficients(f_tilde, 4)
        assert [int(c) for c in coeffs] == [0, 0, 2, 0, 0]

    def test_coherent_closed_form(self):
        # sum_k F_k/k! (alpha* alpha)^k = f(alpha* alpha) for the e^{zx} pair
        with mp.workprec(256):
            z = mpf("0.5")
            f_tilde = ScalarFunction(lambda n: (1 + z) ** mp.convert(n))
            coeffs = inverse_transform_by_coefficients(f_tilde, 40)
            series = NewtonSeries(coeffs, 0, 256)
            got = coherent_expectation(series, 1, tolerance=None).value
            assert abs(got - mp.exp(z)) < mpf("1e-30")


class TestFactorialPowerGamma:
    def test_product_form_half_integer(self):
        with mp.workprec(256):
            got = factorial_power_gamma(mpf("2.5"), 2)
            assert abs(got - mpf("3.75")) < mpf("1e-70")

    def test_negative_order_defining_identity(self):
        with mp.workprec(256):
            got = factorial_power_gamma(mpf("-0.5"), -1)
            assert abs(got - 2) < mpf("1e-70")

    def test_complex_argument_product_oracle(self):
        with mp.workprec(256):
            n = mp.mpc(1, 1)
            got = factorial_power_gamma(n, 3)
            oracle = n * (n - 1) * (n - 2)
            assert abs(got - oracle) < mpf("1e-60")
            assert abs(oracle - mp.mpc(0, -2)) < mpf("1e-70")

    @pytest.mark.parametrize("k", [-2, -1, 0, 1, 2, 3, 4])
    def test_gamma_ratio_equals_product_form(self, k):
        with mp.workprec(256):
            for n in (mpf("0.3"), mpf("-2.2"), mpf("3.7"), mp.mpc("1.5", "-0.4")):
                got = factorial_power_gamma(n, k)
                if k >= 0:
                    oracle = mp.mpf(1)
                    for j in range(k):
                        oracle *= n - j
                else:
                    oracle = mp.mpf(1)
                    for j in range(1, -k + 1):
                        oracle /= n + j
                assert abs(got - oracle) <= mpf("1e-12") * max(1, abs(oracle))

    def test_integer_arguments_delegate_to_exact_form(self):
        assert factorial_power_gamma(5, 3) == 60
        assert factorial_power_gamma(2, 3) == 0
        assert factorial_power_gamma(3, -1) == Fraction(1, 4)

    def test_pole(self):
        with pytest.raises(PoleError):
            factorial_power_gamma(-2, -3)


class TestTransformQuadrature:
    def test_exponential_reference_point(self):
        pair = transform_pair("exponential", z=Fraction(1, 2))
        result = transform_quadrature(pair.f, mpf("-0.5"))
        with mp.workprec(256):
            want = mpf("1.5") ** mpf("-0.5")
            assert abs(result.value - want) < mpf("1e-10")
            assert abs(want - mpf("0.8164966")) < mpf("1e-7")

    def test_linear_function_at_half_integer(self):
        f = ScalarFunction(lambda x: mp.convert(x), name="x")
        result = transform_quadrature(f, mpf("-1.5"))
        assert abs(result.value - mpf("-1.5")) < mpf("1e-10")

    @pytest.mark.parametrize("n", ["-0.3", "-1.0", "-2.5"])
    def test_constant_function(self, n):
        f = ScalarFunction(lambda x: mp.mpf(1), name="one")
        result = transform_quadrature(f, mpf(n))
        assert abs(result.value - 1) < mpf("1e-10")

    @pytest.mark.parametrize("name,params", [
        ("exponential", {"z": Fraction(1, 2)}),
        ("power", {"r": 2}),
    ])
    def test_twelve_points_against_closed_form(self, name, params):
        pair = transform_pair(name, **params)
        with mp.workprec(256):
            points = [mpf("-3") + (mpf("2.9") / 11) * j for j in range(12)]
            for n in points:
                got = transform_quadrature(pair.f, n, tolerance=1e-10).value
                want = pair.f_tilde(n)
                assert abs(got - want) <= mpf("1e-8") * max(1, abs(want)), n

    def test_complex_argument(self):
        pair = transform_pair("exponential", z=Fraction(1, 2))
        n = mp.mpc("-1.5", "0.5")
        got = transform_quadrature(pair.f, n).value
        with mp.workprec(256):
            want = mp.power(mpf("1.5"), n)
            assert abs(got - want) < mpf("1e-8") * abs(want)

    def test_divergent_integrand_rejected(self):
        f = ScalarFunction(lambda x: mp.exp(-2 * mp.convert(x)), name="exp(-2x)")
        with pytest.raises(DivergenceError):
            transform_quadrature(f, mpf("-0.5"))

    def test_error_estimate_reported(self):
        f = ScalarFunction(lambda x: mp.mpf(1))
        result = transform_quadrature(f, mpf("-1.2"))
        value, err = result
        assert err >= 0
        assert result.nodes_used >= 32


class TestZetaResummation:
    def test_sign_verification_adopts_plus(self):
        assert verified_zeta_sign() == 1

    def test_rejected_candidate_fails_at_zero(self):
        # the as-printed relative sign gives -3/2 instead of -zeta(0) = 1/2
        bad = NewtonSeries(zeta_series_fractions(4, -1), 0, 256)
        assert newton_partial_sum(bad, 4, 0) == Fraction(-3, 2)
        assert newton_partial_sum(bad, 4, 0) != minus_zeta_negative(0)

    def test_adopted_candidate_values(self):
        series = zeta_newton_series(8)
        assert newton_partial_sum(series, 8, 0) == Fraction(1, 2)
        assert newton_partial_sum(series, 8, 1) == Fraction(1, 12)
        assert newton_partial_sum(series, 8, 2) == 0
        # the k = 1 addend at n = 1 is (B_2 - 1)/2! * n^(1) = -5/12
        k1 = series.coefficient(1) * falling_factorial(1, 1) / math.factorial(1)
        assert k1 == Fraction(-5, 12)

    @pytest.mark.parametrize("n", range(9))
    def test_exact_rational_termination(self, n):
        # partial sums terminate at k = n and hit the oracle exactly
        series = zeta_newton_series(10)
        full = newton_partial_sum(series, 10, n)
        short = newton_partial_sum(series, n, n)
        assert full == short == minus_zeta_negative(n)


class TestBoseLaurentSeries:
    def test_leading_coefficients(self):
        series = bose_laurent_series(4)
        assert series.k_min == -1
        assert series.coefficient(-1) == 1
        assert series.coefficient(0) == Fraction(-1, 2)

    def test_generalized_sum_reproduces_zeta_value(self):
        # 1/2 - 1/2 + (1/6)/2 + 0 = 1/12 at n = 1
        series = bose_laurent_series(3)
        assert newton_partial_sum(series, 3, 1) == Fraction(1, 12)

    @pytest.mark.parametrize("n", range(0, 7))
    def test_matches_zeta_series_at_integers(self, n):
        laurent = bose_laurent_series(12)
        resummed = zeta_newton_series(12)
        assert newton_partial_sum(laurent, 12, n) \
            == newton_partial_sum(resummed, 12, n)

    def test_resummation_consistency_exact(self):
        # folding the n^(-1) leading term through its regular expansion
        # reproduces the resummed coefficients, coefficient by coefficient
        K = 14
        bose = bose_laurent_fractions(K)
        negpow = negative_power_fractions(1, K)
        resummed = zeta_series_fractions(K, verified_zeta_sign())
        for k in range(K + 1):
            assert bose[k + 1] + negpow[k] == resummed[k], k

    def test_laurent_side_matches_bose_function(self):
        # sum B_{k+1}/(k+1)! x^k reproduces 1/(e^x - 1) for small |x|
        pair = transform_pair("bose_zeta")
        with mp.workprec(256):
            for xs in ("0.3", "-0.25"):
                x = mpf(xs)
                total = mp.zero
                for k in range(-1, 40):
                    w = pair.weight(k)
                    w = mp.mpf(w.numerator) / w.denominator
                    total += w * x ** k
                assert abs(total - pair.f(x)) < mpf("1e-40"), xs


class TestCoefficientIdentity:
    @staticmethod
    def central_derivative(fn, k, h, prec):
        with mp.workprec(prec):
            hv = mp.mpf(h)
            acc = mp.zero
            for j in range(k + 1):
                node = (mp.mpf(k) / 2 - j) * hv
                term = math.comb(k, j) * fn(node)
                acc = acc - term if j % 2 else acc + term
            return acc / hv ** k

    @pytest.mark.parametrize("name,params", [
        ("exponential", {"z": Fraction(7, 10)}),
        ("power", {"r": 3}),
    ])
    def test_taylor_coefficients_equal_forward_differences(self, name, params):
        # High-order central differences of f at 0 with a shrinking step,
        # against the binomial transform of f~ at 0.
        pair = transform_pair(name, **params)
        newton = newton_coefficients(pair.f_tilde, 10, precision_bits=320)
        for k in range(11):
            coarse = self.central_derivative(pair.f, k, mpf(2) ** -80, 1200)
            fine = self.central_derivative(pair.f, k, mpf(2) ** -81, 1200)
            with mp.workprec(320):
                want = pair.weight(k) * math.factorial(k)
                assert abs(coarse - fine) < mpf("1e-25"), (name, k)
                assert abs(fine - newton.coefficient(k)) < mpf("1e-20"), (name, k)
                assert abs(fine - want) < mpf("1e-20"), (name, k)


class TestPairRegistry:
    def test_names(self):
        assert pair_names() == (
            "bessel_laguerre", "bose_zeta", "exponential",
            "exponential_integral", "hermite", "lerch", "power")

    def test_validated_flags(self):
        assert transform_pair("power").validated
        assert transform_pair("exponential").validated
        assert transform_pair("bose_zeta").validated
        for name in ("bessel_laguerre", "exponential_integral", "hermite",
                     "lerch"):
            assert not transform_pair(name).validated, name

    def test_reference_rows_are_evaluable(self):
        # reference-only rows: constructible and pointwise evaluable, but
        # their transforms are not asserted anywhere
        with mp.workprec(128):
            bessel = transform_pair("bessel_laguerre", z=1)
            bessel.f(mpf("0.3")), bessel.f_tilde(2)
            expi = transform_pair("exponential_integral", z=2)
            expi.f(mpf("-1")), expi.f_tilde(2)
            hermite = transform_pair("hermite", z=1)
            hermite.f(mpf("0.5")), hermite.f_tilde(2)
            assert hermite.weight(3) == 0
            lerch = transform_pair("lerch")
            lerch.f(mpf("-0.5")), lerch.f_tilde(1)
            assert lerch.weight is None

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            transform_pair("mellin")

    def test_power_name_not_in_registry_listing_is_still_buildable(self):
        assert transform_pair("power", r=1).parameters == {"r": 1}
