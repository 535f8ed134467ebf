import cmath
import math

import numpy as np
import pytest

from primepoints import (
    BudgetExceededError,
    DegreeTooLargeError,
    DimensionMismatchError,
    IllConditionedError,
    PSetParams,
    RationalPoint,
    SparseTrigPoly,
    classical_pset,
    coherence,
    coherence_gram_oracle,
    evaluate,
    next_prime,
    omp_recover,
    parameterized_pset,
    pq_set,
    recovery_experiment,
    rsquare_set,
    sample,
    sampling_matrix,
)
from primepoints.expsum import REL_TOL
from primepoints.sensing import _solve_support, random_sparse_poly


def naive_evaluate(f, x):
    return sum(
        c * cmath.exp(2j * math.pi * sum(kv * nv for kv, nv in zip(k, x.numerators)) / x.denominator)
        for k, c in f.coeffs.items()
    )


class TestPoly:
    def test_zero_coefficients_dropped(self):
        f = SparseTrigPoly(2, 1, {(0, 1): 0, (1, 0): 2.0})
        assert f.support == ((1, 0),)
        assert f.sparsity == 1

    def test_frequency_outside_box_rejected(self):
        with pytest.raises(ValueError):
            SparseTrigPoly(2, 1, {(2, 0): 1.0})

    def test_constant_accessor(self):
        f = SparseTrigPoly(2, 1, {(0, 0): 3 - 1j})
        assert f.c0 == 3 - 1j
        assert SparseTrigPoly(2, 1, {}).c0 == 0


class TestEvaluate:
    def test_constant(self):
        f = SparseTrigPoly(2, 1, {(0, 0): 2.5 + 1j})
        x = RationalPoint((3, 4), 7)
        assert evaluate(f, x) == 2.5 + 1j  # exact

    def test_quarter_turn(self):
        f = SparseTrigPoly(2, 1, {(1, 0): 1.0})
        x = RationalPoint((1, 0), 4)
        assert evaluate(f, x) == pytest.approx(1j, abs=1e-15)

    def test_matches_naive_loop(self):
        rng = np.random.default_rng(7)
        f = random_sparse_poly(3, 2, 6, rng, unit_magnitude=False)
        for pt in classical_pset(3, 13).points:
            assert abs(evaluate(f, pt) - naive_evaluate(f, pt)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            evaluate(SparseTrigPoly(2, 1, {(1, 0): 1.0}), RationalPoint((0,), 3))


class TestSample:
    def test_zero_polynomial(self):
        y = sample(SparseTrigPoly(2, 1, {}), classical_pset(2, 5))
        assert np.all(y.values == 0)

    def test_roots_of_unity(self):
        X = classical_pset(1, 5)
        y = sample(SparseTrigPoly(1, 1, {(1,): 1.0}), X)
        expected = np.exp(2j * np.pi * np.arange(5) / 5)
        assert np.allclose(y.values, expected, atol=1e-14)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        X = classical_pset(2, 7)
        f = random_sparse_poly(2, 2, 3, rng)
        g = random_sparse_poly(2, 2, 3, rng)
        merged = dict(f.coeffs)
        for k, c in g.coeffs.items():
            merged[k] = merged.get(k, 0) + c
        fg = SparseTrigPoly(2, 2, merged)
        assert np.allclose(
            sample(fg, X).values,
            sample(f, X).values + sample(g, X).values,
            atol=1e-12,
        )


class TestDictionary:
    def test_column_norms(self):
        for X in (classical_pset(2, 13), pq_set(2, 3, 7)):
            A, _ = sampling_matrix(X, 2)
            norms = np.linalg.norm(A, axis=0)
            assert np.allclose(norms, math.sqrt(len(X.points)), atol=1e-10)

    def test_gram_equals_difference_sums(self):
        # the two coherence routes agree wherever both run
        for X in (
            classical_pset(2, 11),
            parameterized_pset(PSetParams(2, 13, (3, 7), (1,))),
            pq_set(2, 5, 7),
            rsquare_set(PSetParams(2, 7, (2, 3), (0,))),
        ):
            for s in (1, 2):
                fast = coherence(X, s)
                gram = coherence_gram_oracle(X, s)
                assert abs(fast.mu - gram.mu) <= 1e-9


class TestCoherence:
    def test_dimension_one_orthogonal(self):
        rep = coherence(classical_pset(1, 7), 3)
        assert rep.mu == pytest.approx(0.0, abs=1e-12)

    def test_p29_bound(self):
        rep = coherence(classical_pset(2, 29), 2)
        assert rep.certified_bound == pytest.approx(1 / math.sqrt(29))
        assert rep.mu <= rep.certified_bound * (1 + REL_TOL)
        assert rep.bound_source == "pset-weil"

    def test_pq_bound(self):
        rep = coherence(pq_set(2, 3, 7), 1)
        assert rep.certified_bound == pytest.approx((math.sqrt(20) + 1) / 9)
        assert rep.mu <= rep.certified_bound * (1 + REL_TOL)
        assert rep.bound_source == "pq-weil"

    def test_argmax_pair_consistent(self):
        X = classical_pset(2, 11)
        rep = coherence(X, 2)
        m, k = rep.argmax_pair
        assert all(-2 <= v <= 2 for v in m + k)
        A, freqs = sampling_matrix(X, 2)
        col = {f: A[:, i] for i, f in enumerate(freqs)}
        inner = abs(np.vdot(col[k], col[m])) / len(X.points)
        assert inner == pytest.approx(rep.mu, abs=1e-9)

    def test_degree_too_large(self):
        with pytest.raises(DegreeTooLargeError):
            coherence(classical_pset(2, 5), 3)  # 2s = 6 > 5
        with pytest.raises(DegreeTooLargeError):
            coherence(classical_pset(2, 5), 3)

    def test_gram_budget(self):
        with pytest.raises(BudgetExceededError):
            coherence_gram_oracle(classical_pset(2, 29), 2, budget=10)

    def test_uncertified_set_reports_no_bound(self):
        X = parameterized_pset(PSetParams(2, 11, (1, 0), (0,)))
        rep = coherence(X, 1)
        assert rep.certified_bound is None
        assert rep.bound_source == "none"


class TestOmp:
    def test_single_atom_with_magnitude(self):
        # smallest modulus satisfying the 1-sparse recovery condition
        p = int(next_prime(max(2 * 2 + 1, (2 - 1) ** 2 * (2 * 1 - 1) ** 2 + 1)))
        assert p == 7
        X = classical_pset(2, p)
        f = SparseTrigPoly(2, 2, {(1, -2): 3.0})
        fh = omp_recover(sample(f, X), X, 2, 1)
        assert fh.support == ((1, -2),)
        assert fh.coeffs[(1, -2)] == pytest.approx(3.0, abs=1e-10)

    def test_zero_samples(self):
        X = classical_pset(2, 7)
        fh = omp_recover(np.zeros(7, dtype=complex), X, 2, 3)
        assert fh.sparsity == 0

    def test_two_sparse_at_p11(self):
        X = classical_pset(2, 11)
        rep = coherence(X, 2)
        assert rep.mu < 1 / 3  # 2-sparse guarantee regime
        rng = np.random.default_rng(3)
        for _ in range(50):
            f = random_sparse_poly(2, 2, 2, rng)
            fh = omp_recover(sample(f, X), X, 2, 2)
            assert fh.support == f.support
            assert all(
                abs(fh.coeffs[k] - f.coeffs[k]) <= 1e-8 for k in f.support
            )

    def test_sample_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            omp_recover(np.zeros(6, dtype=complex), classical_pset(2, 7), 2, 1)

    def test_sparsity_cap_validated(self):
        with pytest.raises(ValueError):
            omp_recover(np.zeros(7, dtype=complex), classical_pset(2, 7), 1, 10)

    def test_ill_conditioned_support(self):
        # frequencies 2 apart... p = 3 aliases k and k+3 exactly
        X = classical_pset(1, 3)
        A, freqs = sampling_matrix(X, 2)
        i = freqs.index((-2,))
        j = freqs.index((1,))
        assert np.allclose(A[:, i], A[:, j])
        with pytest.raises(IllConditionedError):
            _solve_support(A, [i, j], np.ones(3, dtype=complex))


class TestExperiment:
    def test_single_sparse_guarantee(self):
        X = classical_pset(2, 7)
        summary = recovery_experiment(X, 2, 1, trials=100, seed=5)
        assert summary.guarantee_satisfied
        assert summary.successes == summary.trials
        assert summary.mean_residual < 1e-9

    def test_pq_regime(self):
        # m = 26 > ((1/sqrt2 + 1/2) * 3 * 1 + sqrt2)^2 for M = 2, d = 2
        L = pq_set(2, 7, 19)
        m = 26
        threshold = ((1 / math.sqrt(2) + 0.5) * (2 * 2 - 1) * (2 - 1) + math.sqrt(2)) ** 2
        assert m > threshold
        summary = recovery_experiment(L, 2, 2, trials=100, seed=9)
        assert summary.guarantee_satisfied
        assert summary.successes == summary.trials

    def test_determinism(self):
        X = classical_pset(2, 11)
        a = recovery_experiment(X, 2, 2, trials=20, seed=4)
        b = recovery_experiment(X, 2, 2, trials=20, seed=4)
        da, db = a.to_json(), b.to_json()
        da.pop("wall_ms"), db.pop("wall_ms")
        assert da == db

    def test_out_of_guarantee_smoke(self):
        # no sparsity advantage: N < D, nothing is claimed, it must just run
        X = classical_pset(2, 7)
        summary = recovery_experiment(X, 2, 25, trials=5, seed=1, m_max=7)
        assert not summary.guarantee_satisfied
        assert 0 <= summary.successes <= summary.trials

    def test_magnitude_randomization_flag(self):
        X = classical_pset(2, 11)
        a = recovery_experiment(X, 2, 2, trials=10, seed=4)
        b = recovery_experiment(X, 2, 2, trials=10, seed=4, unit_magnitude=False)
        assert a.successes == b.successes == 10
        assert a.mu == b.mu
