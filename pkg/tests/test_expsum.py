import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primepoints import (
    DimensionMismatchError,
    NotCertifiedError,
    PSetParams,
    RangeTooLargeError,
    classical_params,
    classical_pset,
    exp_sum,
    parameterized_pset,
    polynomial_exp_sum,
    pq_set,
    qsquare_set,
    rsquare_set,
    verify_weil_pq,
    verify_weil_pset,
    verify_weil_square,
)
from primepoints.expsum import ABS_TOL, REL_TOL

from helpers import box_frequencies, naive_exp_sum

TOL = 1e-12


class TestExpSum:
    def test_zero_frequency_counts_points(self):
        X = classical_pset(2, 5)
        assert exp_sum(X, (0, 0)) == pytest.approx(5.0)
        R = rsquare_set(classical_params(2, 3))
        assert exp_sum(R, (0, 0)) == pytest.approx(9.0)  # indexed family size

    def test_full_geometric_sum_vanishes(self):
        X = classical_pset(2, 5)
        assert abs(exp_sum(X, (1, 0))) < TOL

    def test_quadratic_sum_modulus(self):
        X = classical_pset(2, 5)
        assert abs(exp_sum(X, (0, 1))) == pytest.approx(math.sqrt(5), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            exp_sum(classical_pset(2, 5), (1, 0, 0))

    def test_reduced_equals_unreduced(self):
        for X in (
            classical_pset(3, 13),
            pq_set(2, 5, 7),
            qsquare_set(PSetParams(2, 5, (2, 3), (1,))),
        ):
            for k in itertools.islice(box_frequencies(4, X.d), 0, None, 7):
                assert abs(exp_sum(X, k) - naive_exp_sum(X, k)) < TOL

    @given(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4))
    @settings(max_examples=30, deadline=None)
    def test_conjugate_symmetry(self, i, j):
        X = parameterized_pset(PSetParams(2, 11, (3, 7), (1,)))
        k = (i - 2, j - 2)
        minus = tuple(-v for v in k)
        assert abs(exp_sum(X, minus) - exp_sum(X, k).conjugate()) < TOL


class TestWeilAxiom:
    def test_polynomial_sums_bounded_exhaustively(self):
        # every degree-d polynomial with a coefficient not divisible by p
        for p in (3, 5, 7, 11):
            for d in (2, 3):
                bound = (d - 1) * math.sqrt(p) + ABS_TOL
                for coeffs in itertools.product(range(p), repeat=d):
                    if all(c == 0 for c in coeffs):
                        continue
                    assert abs(polynomial_exp_sum(coeffs, p)) <= bound

    def test_all_zero_polynomial_sums_to_p(self):
        assert polynomial_exp_sum((0, 0), 7) == pytest.approx(7.0)


class TestVerifyPset:
    def test_trivial_dimension(self):
        rep = verify_weil_pset(classical_params(1, 7))
        assert rep.trivial_dimension
        assert rep.max_ratio == 0.0
        assert rep.passed
        assert rep.max_abs_sum < ABS_TOL

    def test_gauss_saturation(self):
        rep = verify_weil_pset(classical_params(2, 5))
        assert rep.max_ratio == pytest.approx(1.0, abs=1e-12)
        assert rep.n_frequencies == 80

    def test_d3_p11(self):
        rep = verify_weil_pset(classical_params(3, 11))
        assert rep.passed
        assert rep.max_ratio <= 1 + REL_TOL

    def test_not_certified(self):
        with pytest.raises(NotCertifiedError):
            verify_weil_pset(PSetParams(2, 5, (1, 0), (0,)))

    def test_matches_pointwise_sums(self):
        params = PSetParams(2, 7, (3, 5), (1,))
        rep = verify_weil_pset(params)
        X = parameterized_pset(params)
        best = max(
            (abs(exp_sum(X, k)), k)
            for k in box_frequencies(6, 2)
            if any(k)
        )
        assert rep.max_abs_sum == pytest.approx(best[0], abs=1e-9)
        assert abs(exp_sum(X, rep.argmax_k)) == pytest.approx(
            rep.max_abs_sum, abs=1e-9
        )

    def test_direct_path_agrees_with_histogram_path(self):
        params = PSetParams(2, 11, (4, 9), (1,))
        X = parameterized_pset(params)
        fast = verify_weil_pset(params)
        slow = verify_weil_pset(params, fft_budget=0)
        assert slow.max_abs_sum == pytest.approx(fast.max_abs_sum, abs=1e-9)
        assert slow.n_frequencies == fast.n_frequencies
        # near-ties make the argmax path-dependent; each must attain the max
        for rep in (fast, slow):
            assert abs(exp_sum(X, rep.argmax_k)) == pytest.approx(
                rep.max_abs_sum, abs=1e-9
            )

    def test_threads_do_not_change_output(self):
        params = PSetParams(2, 13, (2, 5), (0,))
        one = verify_weil_pset(params, fft_budget=0, threads=1)
        four = verify_weil_pset(params, fft_budget=0, threads=4)
        assert one.to_json() == four.to_json()

    def test_budget_guard(self):
        with pytest.raises(RangeTooLargeError):
            verify_weil_pset(classical_params(2, 13), fft_budget=0, budget=10)


class TestVerifyPQ:
    def test_distinct_primes(self):
        rep = verify_weil_pq(pq_set(2, 3, 7))
        assert rep.passed
        assert rep.n_frequencies == 24
        assert rep.bound_value == pytest.approx(math.sqrt(20) + 1)

    def test_equal_primes_default(self):
        rep = verify_weil_pq(pq_set(2, 5, 5))
        assert rep.passed
        assert rep.n_frequencies == 9**2 - 1
        assert rep.bound_value == pytest.approx(math.sqrt(20) + 1)

    def test_matches_pointwise_sums(self):
        L = pq_set(2, 3, 7)
        rep = verify_weil_pq(L)
        best = max(abs(exp_sum(L, k)) for k in box_frequencies(2, 2) if any(k))
        assert rep.max_abs_sum == pytest.approx(best, abs=1e-9)

    def test_zero_frequency_counts_union(self):
        L = pq_set(2, 3, 7)
        assert exp_sum(L, (0, 0)) == pytest.approx(9.0)  # m - 1

    def test_requires_pq_family(self):
        with pytest.raises(ValueError):
            verify_weil_pq(classical_pset(2, 5))

    def test_dimension_one_bound_is_one(self):
        rep = verify_weil_pq(pq_set(1, 3, 7))
        assert not rep.trivial_dimension
        assert rep.bound_value == pytest.approx(1.0)
        # both full sums vanish; only the removed duplicate origin remains
        assert rep.max_abs_sum == pytest.approx(1.0, abs=1e-9)
        assert rep.passed


class TestVerifySquare:
    def test_qsquare_small(self):
        rep = verify_weil_square(qsquare_set(PSetParams(2, 3, (1, 1), (0,))))
        assert rep.passed
        assert rep.bound_value == 3.0
        assert rep.n_frequencies == 24

    def test_qsquare_matches_pointwise(self):
        Q = qsquare_set(PSetParams(2, 3, (2, 1), (1,)))
        rep = verify_weil_square(Q)
        best = max(abs(exp_sum(Q, k)) for k in box_frequencies(2, 2) if any(k))
        assert rep.max_abs_sum == pytest.approx(best, abs=1e-9)

    def test_rsquare_small(self):
        rep = verify_weil_square(rsquare_set(PSetParams(2, 3, (1, 1), (0,))))
        assert rep.passed
        assert rep.bound_value == 3.0

    def test_rsquare_dimension_one_trivial(self):
        rep = verify_weil_square(rsquare_set(PSetParams(1, 5, (2,), ())))
        assert rep.trivial_dimension
        assert rep.passed
        assert rep.max_ratio == 0.0

    def test_rsquare_requires_units(self):
        with pytest.raises(NotCertifiedError):
            verify_weil_square(rsquare_set(PSetParams(2, 3, (1, 0), (0,))))

    def test_qsquare_zero_entry_reports_violation(self):
        # a degenerate coordinate makes the sum hit the family size,
        # far above the bound; the report must say so rather than hide it
        rep = verify_weil_square(qsquare_set(PSetParams(2, 3, (1, 0), (0,))))
        assert not rep.passed
        assert rep.max_abs_sum == pytest.approx(9.0, abs=1e-9)
        assert any(v.k == (0, 1) for v in rep.violations)


class TestSaturation:
    @pytest.mark.parametrize("p", [5, 13, 17])
    def test_gauss_sums_attain_bound(self, p):
        rep = verify_weil_pset(classical_params(2, p))
        assert 0.99 <= rep.max_ratio <= 1 + REL_TOL
