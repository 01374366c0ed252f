import math

import numpy as np
import pytest

from heavytail_qec import analytic
from heavytail_qec.analytic import (
    FitRegimeError,
    PerfectCodeModel,
    PrecisionError,
    correlated_mc_oracle,
    fit_leading_order,
    logical_error_correlated,
    logical_error_uncorrelated,
    stable_alpha_term_coefficient,
)
from heavytail_qec.distributions import ParameterError, gaussian, physical_error_prob, stable, student


def test_model_validation():
    with pytest.raises(ParameterError):
        PerfectCodeModel(gaussian(0.1), 4)
    with pytest.raises(ParameterError):
        PerfectCodeModel(gaussian(0.1), -1)
    with pytest.raises(ParameterError):
        PerfectCodeModel(gaussian(0.1), 5, n_qubits=3)
    m = PerfectCodeModel(gaussian(0.1), 5)
    assert m.w == 2 and m.n == 9


def test_sigma_zero_is_error_free():
    m = PerfectCodeModel(gaussian(0.0), 3)
    assert logical_error_uncorrelated(m) == 0.0
    assert logical_error_correlated(m) == 0.0
    assert correlated_mc_oracle(m, 100, np.random.default_rng(0)) == (0.0, 0.0)


def test_single_qubit_no_code_reduces_to_physical_rate():
    # d=1, n=1: both rates collapse to (1 - f(1))/2
    for spec in (gaussian(0.4), student(0.2, 1), stable(0.3, 1.5)):
        m = PerfectCodeModel(spec, 1)
        assert m.n == 1
        p = physical_error_prob(spec)
        assert logical_error_uncorrelated(m) == pytest.approx(p, rel=1e-12)
        assert logical_error_correlated(m, 192) == pytest.approx(p, rel=1e-10)


def test_gaussian_d3_leading_order():
    # P_unc ~ (5/8) sigma^4, P_cor ~ (15/8) sigma^4
    s = 0.05
    m = PerfectCodeModel(gaussian(s), 3)
    assert logical_error_uncorrelated(m) == pytest.approx(0.625 * s**4, rel=0.03)
    assert logical_error_correlated(m) == pytest.approx(1.875 * s**4, rel=0.03)


def test_student_nu1_leading_order():
    m = PerfectCodeModel(student(1e-3, 1), 3)
    assert logical_error_uncorrelated(m) == pytest.approx(2.5 * (1e-3) ** 2, rel=0.03)
    m = PerfectCodeModel(student(1e-4, 1), 3)
    assert logical_error_correlated(m) == pytest.approx((35.0 / 64.0) * 1e-4, rel=0.02)


def test_stable_alpha_term():
    # bracketed sigma^alpha coefficient; exact zero at alpha = 2
    assert stable_alpha_term_coefficient(1.0) == pytest.approx(35.0 / 64.0, rel=1e-12)
    assert abs(stable_alpha_term_coefficient(2.0)) < 1e-12
    s = 1e-4
    m = PerfectCodeModel(stable(s, 1.5), 3)
    assert logical_error_correlated(m) == pytest.approx(stable_alpha_term_coefficient(1.5) * s**1.5, rel=0.02)


def test_correlated_matches_mc_oracle():
    m = PerfectCodeModel(gaussian(0.3), 3)
    est, se = correlated_mc_oracle(m, 1_000_000, np.random.default_rng(11))
    assert abs(est - logical_error_correlated(m)) < 4.0 * se


def test_mc_oracle_student_d5_table_value():
    # r=1, d=5 correlated leading term (9009/16384) sigma
    s = 0.01
    m = PerfectCodeModel(student(s, 1), 5)
    est, se = correlated_mc_oracle(m, 10_000_000, np.random.default_rng(3))
    assert abs(est - (9009.0 / 16384.0) * s) < 4.0 * se


def test_probabilities_bounded_and_monotone():
    for spec0 in (gaussian(1.0), student(1.0, 1), stable(1.0, 1.5)):
        sigmas = np.geomspace(1e-3, 2.0, 12)
        pu = [logical_error_uncorrelated(PerfectCodeModel(spec0.with_sigma(s), 3)) for s in sigmas]
        pc = [logical_error_correlated(PerfectCodeModel(spec0.with_sigma(s), 3)) for s in sigmas]
        for seq in (pu, pc):
            assert all(0.0 <= v <= 1.0 for v in seq)
            assert all(b >= a - 1e-15 for a, b in zip(seq, seq[1:]))


def test_precision_guard_raises_and_converges():
    m = PerfectCodeModel(gaussian(1e-4), 9)
    with pytest.raises(PrecisionError):
        logical_error_correlated(m, 128)
    a = logical_error_correlated(m, 512)
    b = logical_error_correlated(m, 1024)
    assert a == pytest.approx(b, rel=1e-10)


def test_precision_bits_floor():
    with pytest.raises(ParameterError):
        logical_error_correlated(PerfectCodeModel(gaussian(0.1), 3), 64)


def test_fit_leading_order_exact_power_law():
    x = np.geomspace(1e-4, 1e-2, 8)
    fit = fit_leading_order(x, 3.5 * x**2.25)
    assert fit.exponent == pytest.approx(2.25, abs=1e-9)
    assert fit.coefficient == pytest.approx(3.5, rel=1e-9)
    assert fit.exponent_drift < 1e-9


def test_fit_leading_order_guards():
    x = np.geomspace(1e-3, 1e-2, 8)
    with pytest.raises(ParameterError):
        fit_leading_order(x, np.zeros(8))
    with pytest.raises(FitRegimeError):
        fit_leading_order(x[:4], 2.0 * x[:4] ** 2)  # spans less than a decade
    y = x**2 * (1.0 + 50.0 * x)  # visibly curved
    with pytest.raises(FitRegimeError):
        fit_leading_order(x, y)
    fit = fit_leading_order(x, y, max_exponent_drift=None)  # guard off
    assert fit.exponent > 2.0


def test_gaussian_coefficient_ratio_grows_as_double_factorial():
    ratios = {}
    for d in (3, 5, 7):
        grid = np.geomspace(2e-3, 2e-2, 8)
        pu = [logical_error_uncorrelated(PerfectCodeModel(gaussian(s), d)) for s in grid]
        pc = [logical_error_correlated(PerfectCodeModel(gaussian(s), d), 384) for s in grid]
        ratios[d] = fit_leading_order(grid, pc).coefficient / fit_leading_order(grid, pu).coefficient
    assert ratios[3] == pytest.approx(3.0, abs=0.1)
    # d >= 5 values verified by this same high-precision evaluation + fit
    assert ratios[5] == pytest.approx(15.0, rel=0.05)
    assert ratios[7] == pytest.approx(105.0, rel=0.05)
    assert ratios[3] < ratios[5] < ratios[7]


def test_student_correlated_exponent_rule():
    # exponent of the correlated leading term is min(2r-1, d+1)
    for r in range(1, 7):
        nu = 2 * r - 1
        for d in (3, 5, 7, 9):
            grid = np.geomspace(1e-5, 1e-4, 6)
            probs = [logical_error_correlated(PerfectCodeModel(student(s, nu), d), 640) for s in grid]
            fit = fit_leading_order(grid, probs, max_exponent_drift=None)
            assert fit.exponent == pytest.approx(min(2 * r - 1, d + 1), abs=0.05), (r, d)


def test_uncorrelated_matches_direct_binomial():
    # complementary tail == 1 - lower sum, evaluated independently in mpmath
    import mpmath

    spec = student(0.08, 3)
    m = PerfectCodeModel(spec, 5)
    with mpmath.workprec(200):
        from heavytail_qec.distributions import char_fn_mp

        s = (1 - char_fn_mp(spec, 1)) / 2
        c = 1 - s
        lower = sum(mpmath.binomial(m.n, k) * c ** (m.n - k) * s**k for k in range(m.w + 1))
        expected = float(1 - lower)
    assert logical_error_uncorrelated(m) == pytest.approx(expected, rel=1e-12)
