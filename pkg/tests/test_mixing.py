import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixrate import mixing
from mixrate.empirical import slope_fit

P_LAZY = np.array([[0.9, 0.1], [0.1, 0.9]])
PI_LAZY = np.array([0.5, 0.5])


def lag_autocorr(x, lag):
    x = x - x.mean()
    return float(np.dot(x[:-lag], x[lag:]) / np.dot(x, x))


class TestGenFiniteMarkov:
    def test_identity_transition_is_constant(self):
        s = mixing.gen_finite_markov(np.eye(2), np.array([0.0, 1.0]), 5, seed=3)
        assert len(set(s.values)) == 1

    def test_equal_rows_is_iid(self):
        pi = np.array([0.2, 0.5, 0.3])
        P = np.tile(pi, (3, 1))
        s = mixing.gen_finite_markov(P, np.arange(3.0), 1000, seed=1)
        assert mixing.exact_beta_markov(P, pi, 1) == pytest.approx(0.0, abs=1e-12)
        assert len(s.values) == 1000

    def test_lazy_chain_lag1_autocorrelation(self):
        # spectral gap: lag-1 correlation equals the second eigenvalue 0.8
        s = mixing.gen_finite_markov(P_LAZY, np.array([0.0, 1.0]), 10**5, seed=7)
        assert lag_autocorr(s.values, 1) == pytest.approx(0.8, abs=0.01)

    def test_non_stochastic_matrix_rejected(self):
        with pytest.raises(mixing.ConstructionError):
            mixing.gen_finite_markov(np.array([[0.5, 0.6], [0.5, 0.5]]),
                                     np.array([0.0, 1.0]), 10, seed=0)

    def test_periodic_chain_rejected(self):
        P = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(mixing.ConstructionError):
            mixing.gen_finite_markov(P, np.array([0.0, 1.0]), 10, seed=0)


class TestGenRenewalChain:
    def test_lmax_one_is_iid_uniform(self):
        s = mixing.gen_renewal_chain(0.5, 1, 2000, seed=5)
        assert len(np.unique(s.values)) == 2000  # every step regenerates
        assert 0.45 < s.values.mean() < 0.55

    def test_block_length_tail_slope(self):
        # runs of equal values recover the block-length law; its survival
        # function has log-log slope -(1 + tail_exponent)
        s = mixing.gen_renewal_chain(0.5, 10**4, 3 * 10**5, seed=11)
        change = np.flatnonzero(np.diff(s.values) != 0)
        lengths = np.diff(change)
        ks = np.unique(np.geomspace(2, 300, 12).astype(int))
        pairs = [(k, float(np.mean(lengths > k))) for k in ks]
        fit = slope_fit(pairs)
        assert fit.slope == pytest.approx(-1.5, abs=0.1)

    def test_binning_matches_exact_age_value_chain(self):
        T, pi, _ = mixing.renewal_age_value_chain(0.5, 50, 10)
        s = mixing.gen_renewal_chain(0.5, 50, 10**5, seed=11)
        disc = np.floor(s.values * 10)
        sd = mixing.SequenceSample(values=disc, generator_id="disc", params={},
                                   seed=11, mixing_oracle=None)
        est = mixing.estimate_beta_binning(sd, 10, 10)
        exact = mixing.exact_beta_markov(T, pi, 10)
        assert est == pytest.approx(exact, abs=0.05)

    def test_invalid_parameters(self):
        with pytest.raises(mixing.ConstructionError):
            mixing.gen_renewal_chain(0.0, 10, 10, seed=0)
        with pytest.raises(mixing.ConstructionError):
            mixing.gen_renewal_chain(0.5, 0, 10, seed=0)

    def test_exact_chain_decay_slope(self):
        # coefficients of the exact (age, value) chain decay like q^{-beta};
        # the fit window stops at l_max/10 because the block-length cutoff
        # steepens the tail near the horizon
        l_max = 500
        T, pi, _ = mixing.renewal_age_value_chain(0.5, l_max, 1)
        M = np.eye(len(pi))
        pairs = []
        for q in range(1, l_max // 10 + 1):
            M = M @ T
            if q >= 5:
                tv = 0.5 * np.abs(M - pi).sum(axis=1)
                pairs.append((q, float(pi @ tv)))
        fit = slope_fit(pairs)
        assert fit.slope == pytest.approx(-0.5, abs=0.15)


class TestGenAr1:
    def test_a_zero_is_iid_standard_gaussian(self):
        s = mixing.gen_ar1(0.0, 10**5, seed=2)
        assert s.values.mean() == pytest.approx(0.0, abs=0.02)
        assert s.values.std() == pytest.approx(1.0, abs=0.02)
        assert abs(lag_autocorr(s.values, 1)) < 0.02

    def test_lag3_autocorrelation(self):
        s = mixing.gen_ar1(0.5, 10**5, seed=2)
        assert lag_autocorr(s.values, 3) == pytest.approx(0.125, abs=0.01)

    def test_boundary_contract(self):
        mixing.gen_ar1(-0.99, 10, seed=0)  # accepted
        with pytest.raises(mixing.ConstructionError):
            mixing.gen_ar1(1.0, 10, seed=0)


class TestExactBetaMarkov:
    def test_q_zero_is_one(self):
        assert mixing.exact_beta_markov(P_LAZY, PI_LAZY, 0) == 1.0

    def test_independent_rows_give_zero(self):
        pi = np.array([0.3, 0.7])
        P = np.tile(pi, (2, 1))
        for q in (1, 2, 5):
            assert mixing.exact_beta_markov(P, pi, q) == pytest.approx(0.0, abs=1e-14)

    def test_lazy_two_state_value(self):
        # direct enumeration over the 4 joint cells:
        # (1/2) * sum |pi(x) P(x,y) - pi(x) pi(y)| = 0.4
        assert mixing.exact_beta_markov(P_LAZY, PI_LAZY, 1) == pytest.approx(0.4, abs=1e-12)

    def test_negative_q_rejected(self):
        with pytest.raises(ValueError):
            mixing.exact_beta_markov(P_LAZY, PI_LAZY, -1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_in_q_for_lazy_chains(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.random((3, 3)) + 0.1
        np.fill_diagonal(P, P.diagonal() + 1.0)  # lazy: a_ii > 0
        P /= P.sum(axis=1, keepdims=True)
        pi = mixing.stationary_distribution(P)
        vals = [mixing.exact_beta_markov(P, pi, q) for q in range(6)]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(vals[i + 1] <= vals[i] + 1e-12 for i in range(5))


class TestEstimateBetaBinning:
    def test_iid_uniform_near_zero(self):
        s = mixing.gen_iid_uniform(10**5, seed=3)
        assert mixing.estimate_beta_binning(s, 5, 8) <= 0.03

    def test_constant_sequence(self):
        s = mixing.SequenceSample(values=np.full(10**4, 0.37),
                                  generator_id="const", params={}, seed=0,
                                  mixing_oracle=None)
        assert mixing.estimate_beta_binning(s, 3, 8) == pytest.approx(1 - 1 / 8,
                                                                      abs=0.01)

    def test_matches_exact_on_discrete_chain(self):
        s = mixing.gen_finite_markov(P_LAZY, np.array([0.0, 1.0]), 10**5, seed=5)
        for q in (1, 3):
            est = mixing.estimate_beta_binning(s, q, 2)
            assert est == pytest.approx(mixing.exact_beta_markov(P_LAZY, PI_LAZY, q),
                                        abs=0.05)

    def test_too_few_observations(self):
        s = mixing.gen_iid_uniform(100, seed=0)
        with pytest.raises(mixing.EstimationError, match="n >="):
            mixing.estimate_beta_binning(s, 2, 8)


class TestDeterminism:
    @pytest.mark.parametrize("make", [
        lambda seed: mixing.gen_iid_uniform(500, seed),
        lambda seed: mixing.gen_ar1(0.4, 500, seed),
        lambda seed: mixing.gen_renewal_chain(0.7, 100, 500, seed),
        lambda seed: mixing.gen_finite_markov(P_LAZY, np.array([0.0, 1.0]),
                                              500, seed),
    ])
    def test_same_seed_bit_identical(self, make):
        a, b = make(42), make(42)
        assert np.array_equal(a.values, b.values)
        c = make(43)
        assert not np.array_equal(a.values, c.values)

    def test_distinct_seeds_agree_in_moments(self):
        a = mixing.gen_renewal_chain(1.5, 1000, 10**5, seed=1).values
        b = mixing.gen_renewal_chain(1.5, 1000, 10**5, seed=2).values
        for p in (1, 2, 3, 4):
            assert np.mean(a**p) == pytest.approx(np.mean(b**p), abs=0.05)


class TestMixingProfile:
    def test_coefficient_zero_is_one(self):
        for prof in (mixing.MixingProfile.iid(),
                     mixing.MixingProfile(kind=mixing.ProfileKind.POLYNOMIAL,
                                          flavor=mixing.MixingFlavor.BETA,
                                          scale=1.0, exponent=0.5)):
            assert prof.coefficient(0) == 1.0

    def test_values_in_unit_interval_and_non_increasing(self):
        prof = mixing.MixingProfile(kind=mixing.ProfileKind.EXPONENTIAL,
                                    flavor=mixing.MixingFlavor.GAMMA,
                                    scale=1.0, rate=0.3)
        vals = [prof.coefficient(q) for q in range(50)]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_tabulated_beyond_table_is_zero(self):
        prof = mixing.MixingProfile(kind=mixing.ProfileKind.TABULATED,
                                    flavor=mixing.MixingFlavor.BETA,
                                    values=(1.0, 0.5, 0.25))
        assert prof.coefficient(2) == 0.25
        assert prof.coefficient(3) == 0.0
