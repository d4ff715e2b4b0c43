"""Partition sums, thermal averages, P-function moment verification."""

import math

import numpy as np
import pytest

from ghcs.measure import radial_rule
from ghcs.states import Family, FamilyParams
from ghcs.thermal import (
    boltzmann_moment,
    closed_form_thermal_stats,
    cs_thermal_expectation,
    derivative_series_candidate,
    g2_in_state,
    mandel_q_in_state,
    moment_matched_candidate,
    number_moment,
    oracle_thermal_stats,
    p_function_passes,
    partition,
    thermal_scan_rows,
    thermal_state,
    verify_p_function,
)

from conftest import rel_err


def brute_partition(beta, mu, n_terms=200):
    return sum(math.exp(-beta * n * (n + mu + 1.0)) for n in range(n_terms))


class TestPartition:
    def test_direct_sum(self):
        # beta = 1, mu = 2: 1 + e^-4 + e^-10 + ...
        assert rel_err(partition(1.0, 2.0), brute_partition(1.0, 2.0)) < 1e-14

    def test_low_temperature_limit(self):
        assert partition(200.0, 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_tail_certificate(self):
        ts = thermal_state(0.05, 1.0)
        assert ts.tail_bound <= 1e-14 * ts.partition
        assert ts.partition >= 1.0

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            partition(0.0, 2.0)
        with pytest.raises(ValueError):
            partition(-1.0, 2.0)

    def test_monotone_decreasing_in_beta(self):
        betas = np.linspace(0.2, 2.0, 10)
        z = [partition(float(b), 2.0) for b in betas]
        assert all(b < a for a, b in zip(z, z[1:]))


class TestBoltzmannMoments:
    def test_zeroth(self):
        assert boltzmann_moment(1.0, 2.0, 0) == pytest.approx(1.0, rel=1e-13)

    def test_first_moment_direct(self):
        num = sum(n * math.exp(-1.0 * n * (n + 3.0)) for n in range(100))
        ref = num / brute_partition(1.0, 2.0)
        assert rel_err(boltzmann_moment(1.0, 2.0, 1), ref) < 1e-13

    def test_variance_nonnegative(self):
        for beta in np.linspace(0.1, 3.0, 12):
            n1 = boltzmann_moment(float(beta), 2.0, 1)
            n2 = boltzmann_moment(float(beta), 2.0, 2)
            assert n2 - n1 * n1 >= -1e-15

    def test_mean_monotone_in_beta(self):
        betas = np.linspace(0.2, 2.0, 10)
        means = [boltzmann_moment(float(b), 2.0, 1) for b in betas]
        assert all(b <= a for a, b in zip(means, means[1:]))


class TestClosedForms:
    def test_published_values_at_beta1_mu2(self):
        c = closed_form_thermal_stats(1.0, 2.0)
        assert c["N_mean"] == pytest.approx(3.0)
        assert c["N2_mean"] == pytest.approx(5.0)
        assert c["Q"] == pytest.approx(-7.0 / 3.0)

    def test_oracle_disagrees_and_is_reported(self):
        # the closed forms stay O(1) while the direct sums freeze out;
        # both are tabulated, difference reported, nothing asserted equal
        o = oracle_thermal_stats(1.0, 2.0)
        c = closed_form_thermal_stats(1.0, 2.0)
        assert abs(o["N_mean"] - c["N_mean"]) > 1.0

    def test_g2_conventions(self):
        o1 = oracle_thermal_stats(0.5, 2.0, "as_written")
        o2 = oracle_thermal_stats(0.5, 2.0, "conventional")
        n1, n2 = o1["N_mean"], o1["N2_mean"]
        assert o1["g2"] == pytest.approx((n2 - n1) / n2)
        assert o2["g2"] == pytest.approx((n2 - n1) / n1**2)
        with pytest.raises(ValueError):
            oracle_thermal_stats(0.5, 2.0, "weird")

    def test_scan_rows_schema(self):
        rows = thermal_scan_rows([0.5, 1.0], 1.0)
        assert len(rows) == 2
        assert len(rows[0]) == 11


class TestInStateExpectations:
    def test_eps_zero(self, bessel_params):
        assert cs_thermal_expectation(bessel_params, 2.0, 0.0) == pytest.approx(1.0)

    def test_finite_difference_first_moment(self, bessel_params):
        x, h = 2.0, 1e-4
        fd = (
            cs_thermal_expectation(bessel_params, x, h)
            - cs_thermal_expectation(bessel_params, x, -h)
        ) / (2.0 * h)
        assert rel_err(fd, number_moment(bessel_params, x, 1)) < 1e-6

    def test_finite_difference_second_moment(self, bessel_params):
        x, h = 2.0, 1e-3
        f = lambda e: cs_thermal_expectation(bessel_params, x, e)  # noqa: E731
        fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
        assert rel_err(fd2, number_moment(bessel_params, x, 2)) < 1e-5

    def test_jacobi_domain_exit(self, jacobi_params):
        with pytest.raises(ValueError):
            cs_thermal_expectation(jacobi_params, 0.9, 0.2)  # 0.9 e^0.2 > 1

    def test_number_moment_brute_force(self, jacobi_params):
        # direct series with explicitly accumulated coefficients
        x = 0.5
        term = 1.0  # x^n / h_n^2
        num, den = 0.0, 1.0
        for n in range(400):
            term *= x * (2.5 + n) ** 2 / ((n + 1.0) * (3.0 + n))
            den += term
            num += (n + 1.0) * term
        assert rel_err(number_moment(jacobi_params, x, 1), num / den) < 1e-12

    def test_g2_and_mandel(self, bessel_params):
        x = 1.5
        n1 = number_moment(bessel_params, x, 1)
        n2 = number_moment(bessel_params, x, 2)
        assert g2_in_state(bessel_params, x) == pytest.approx((n2 - n1) / n2)
        q = mandel_q_in_state(bessel_params, x)
        assert q == pytest.approx(n1 * ((n2 - n1) / n2 - 1.0))


class TestPFunction:
    @pytest.mark.parametrize("family", [Family.JACOBI, Family.BESSEL])
    def test_moment_matched_candidate_passes(self, family):
        params = FamilyParams(1, 0.5, family)
        beta, mu = 0.02, params.mu
        cand = moment_matched_candidate(params, beta, mu, 12)
        reports = verify_p_function(params, beta, mu, cand, 12)
        assert p_function_passes(reports, 1e-8)

    def test_n0_row_is_exact_by_convention(self, jacobi_params):
        beta, mu = 0.02, 1.0
        cand = moment_matched_candidate(jacobi_params, beta, mu, 10)
        reports = verify_p_function(jacobi_params, beta, mu, cand, 10)
        assert reports[0].rel_error < 1e-14

    def test_candidate_verified_on_independent_rule(self, jacobi_params):
        # construction and verification use different node counts
        beta, mu = 0.02, 1.0
        cand = moment_matched_candidate(
            jacobi_params, beta, mu, 10, radial_rule(jacobi_params, 280)
        )
        reports = verify_p_function(
            jacobi_params, beta, mu, cand, 10, radial_rule(jacobi_params, 360)
        )
        assert p_function_passes(reports, 1e-8)

    def test_derivative_series_reported_not_asserted(self, bessel_params):
        # published truncated series: the error column is recorded per
        # truncation order; no equality is claimed
        beta, mu = 0.05, bessel_params.mu
        errs = {}
        for k_max in (1, 2, 4):
            cand = derivative_series_candidate(bessel_params, beta, mu, k_max)
            reports = verify_p_function(bessel_params, beta, mu, cand, 6)
            errs[k_max] = max(r.rel_error for r in reports)
        assert all(math.isfinite(v) for v in errs.values())

    def test_failing_candidate_fails(self, jacobi_params):
        from ghcs.thermal import PFunctionCandidate

        bad = PFunctionCandidate(evaluate=lambda x: np.ones_like(x), label="flat")
        reports = verify_p_function(jacobi_params, 0.5, 1.0, bad, 8)
        assert not p_function_passes(reports, 1e-8)
