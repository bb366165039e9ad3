import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixrate import classes
from mixrate.classes import (EntropyModel, build_bracket_net, discrete_cdf,
                             entropy_calculus, entropy_eval, gaussian_cdf,
                             random_lipschitz01, random_monotone01,
                             sup_halflines, sup_lipschitz_w1, sup_monotone01,
                             uniform01_cdf)


class TestEntropyEval:
    def test_flat_bound(self):
        m = EntropyModel(K=3.0, D=2.0, alpha=0.0, V=0.0)
        for u in (0.01, 0.5, 1.0):
            assert entropy_eval(m, u) == pytest.approx(6.0)

    def test_monotone_class_model(self):
        m = EntropyModel(K=2.5, alpha=1.0, V=0.0)
        assert entropy_eval(m, 0.1) == pytest.approx(25.0)

    def test_convex_class_model(self):
        # entropy exponent d/2 with d = 4 and log power d + 1
        m = EntropyModel(K=1.0, D=2.0, theta=1.0, B=10.0, alpha=2.0, V=5.0)
        expected = 2.0 * (1.0 / 0.5) ** 2 * math.log(10.0 / 0.5) ** 5
        assert entropy_eval(m, 0.5) == pytest.approx(expected)

    def test_out_of_range_scale(self):
        m = EntropyModel(alpha=1.0)
        with pytest.raises(ValueError):
            entropy_eval(m, 0.0)
        with pytest.raises(ValueError):
            entropy_eval(m, 1.5)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0.02, 1.0))
    def test_strictly_decreasing_when_complex(self, u1, u2):
        m = EntropyModel(alpha=1.5, V=1.0, B=10.0)
        lo, hi = sorted((u1, u2))
        if hi - lo > 1e-9:
            assert entropy_eval(m, lo) > entropy_eval(m, hi)


class TestEntropyCalculus:
    def test_lipschitz_identity(self):
        m = EntropyModel(alpha=1.0, V=1.0, B=10.0)
        out = entropy_calculus(m, "lipschitz_compose", L=1.0)
        assert out == m

    def test_lipschitz_rescale(self):
        m = EntropyModel(alpha=2.0, V=0.0, sigma=0.5, b=1.0)
        out = entropy_calculus(m, "lipschitz_compose", L=3.0)
        # new bound at u equals the old bound at u/3
        assert entropy_eval(out, 0.3) == pytest.approx(entropy_eval(m, 0.1))

    def test_sum_with_self(self):
        m = EntropyModel(K=1.5, D=2.0, theta=1.0, alpha=1.2, V=0.0)
        s = entropy_calculus(m, "sum", other=m)
        delta = 0.4
        expected = 2 * 1.5 * 2.0 * (2 * 1.0 / delta) ** 1.2
        assert s(delta) == pytest.approx(expected)

    def test_sum_commutative_on_grid(self):
        a = EntropyModel(alpha=1.0, V=0.0)
        b = EntropyModel(alpha=0.5, V=1.0, B=10.0)
        ab = entropy_calculus(a, "sum", other=b)
        ba = entropy_calculus(b, "sum", other=a)
        for d in np.geomspace(0.01, 1.0, 20):
            assert ab(d) == pytest.approx(ba(d))

    def test_positive_part_unchanged(self):
        m = EntropyModel(alpha=1.0)
        assert entropy_calculus(m, "positive_part") == m

    def test_scalar_multiply(self):
        m = EntropyModel(alpha=1.0, V=0.0, sigma=1.0, b=1.0)
        out = entropy_calculus(m, "scalar_multiply", g_sup=2.0)
        assert entropy_eval(out, 0.5) == pytest.approx(entropy_eval(m, 0.25))

    def test_invalid_parameters(self):
        m = EntropyModel(alpha=1.0)
        with pytest.raises(ValueError):
            entropy_calculus(m, "lipschitz_compose", L=0.0)
        with pytest.raises(ValueError):
            entropy_calculus(m, "no_such_rule")


class TestSupHalflines:
    def test_single_point_at_median(self):
        assert sup_halflines([0.5], uniform01_cdf()) == pytest.approx(0.5)

    def test_quantile_grid(self):
        n = 9
        sample = np.arange(1, n + 1) / (n + 1)
        expected = math.sqrt(n) / (n + 1)
        assert sup_halflines(sample, uniform01_cdf()) == pytest.approx(expected)

    def test_duplicate_heavy_sample(self):
        assert sup_halflines([0.3] * 4, uniform01_cdf()) == pytest.approx(1.4)

    def test_empty_sample(self):
        with pytest.raises(ValueError):
            sup_halflines([], uniform01_cdf())

    def test_gaussian_oracle_supported(self):
        rng = np.random.default_rng(0)
        v = sup_halflines(rng.normal(size=200), gaussian_cdf())
        assert 0.0 < v < 3.0


class TestSupMonotone01:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 60))
    def test_equals_halfline_supremum(self, seed, n):
        sample = np.random.default_rng(seed).random(n)
        o = uniform01_cdf()
        assert sup_monotone01(sample, o) == pytest.approx(
            sup_halflines(sample, o), abs=1e-12)

    def test_dominates_random_inner_maximization(self):
        rng = np.random.default_rng(1)
        sample = rng.random(50)
        o = uniform01_cdf()
        bound = sup_monotone01(sample, o)
        n = len(sample)
        # random monotone step functions f(x) = sum_j w_j 1{x >= t_j}
        best = 0.0
        for _ in range(100):
            t = np.sort(rng.random((100, 3)), axis=1)
            w = rng.dirichlet(np.ones(3), size=100)
            emp = (sample[None, None, :] >= t[:, :, None]).mean(axis=2)
            gn = math.sqrt(n) * np.abs(((emp - (1 - t)) * w).sum(axis=1))
            best = max(best, float(gn.max()))
        assert best <= bound + 1e-12

    def test_quantile_grid(self):
        n = 9
        sample = np.arange(1, n + 1) / (n + 1)
        assert sup_monotone01(sample, uniform01_cdf()) == pytest.approx(
            math.sqrt(n) / (n + 1))


class TestSupLipschitzW1:
    def test_single_point_at_median(self):
        assert sup_lipschitz_w1([0.5], uniform01_cdf()) == pytest.approx(0.25)

    def test_two_point_analytic(self):
        v = sup_lipschitz_w1([0.25, 0.75], uniform01_cdf())
        assert v == pytest.approx(math.sqrt(2) * 0.125)

    def test_matching_atoms_give_zero(self):
        atoms = [0.1, 0.4, 0.7, 0.9]
        assert sup_lipschitz_w1(atoms, discrete_cdf(atoms)) == pytest.approx(
            0.0, abs=1e-12)

    def test_unbounded_support_rejected(self):
        with pytest.raises(ValueError, match="unbounded"):
            sup_lipschitz_w1([0.0, 1.0], gaussian_cdf())

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        s = rng.random(20)
        o = uniform01_cdf()
        assert sup_lipschitz_w1(s, o) == pytest.approx(
            sup_lipschitz_w1(rng.permutation(s), o), abs=1e-12)


class TestBracketNets:
    def test_delta_one_single_envelope(self):
        net = build_bracket_net("monotone01", 1.0, 8)
        assert net.count == 1
        lo, hi = net.pairs[0]
        assert np.all(lo == 0.0) and np.all(hi >= 1.0)

    def test_monotone_count_constant(self):
        net = build_bracket_net("monotone01", 0.25, 8)
        assert net.log_count <= 12.0 / 0.25
        assert net.c_fitted <= 12.0

    def test_monotone_containment_and_width(self):
        net = build_bracket_net("monotone01", 0.25, 8)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            f = np.clip(random_monotone01(rng, net.grid), 0.0, 1.0)
            lo, hi = net.assign(f)
            assert np.all(lo <= f + 1e-12) and np.all(f <= hi + 1e-12)
            assert math.sqrt(np.mean((hi - lo) ** 2)) <= 0.25 + 1e-12
            assert np.all(np.diff(lo) >= -1e-12)  # brackets stay monotone

    def test_lipschitz_containment(self):
        net = build_bracket_net("lipschitz01", 0.5, 8)
        rng = np.random.default_rng(1)
        for _ in range(1000):
            f = random_lipschitz01(rng, net.grid)
            lo, hi = net.assign(f)
            assert np.all(lo <= f + 1e-12) and np.all(f <= hi + 1e-12)
            assert np.max(hi - lo) <= 0.5 + 1e-12

    def test_grid_too_coarse_rejected(self):
        with pytest.raises(ValueError, match="grid"):
            build_bracket_net("monotone01", 0.1, 8)
        with pytest.raises(ValueError):
            build_bracket_net("monotone01", 0.0, 8)

    def test_unknown_class_rejected(self):
        with pytest.raises(ValueError):
            build_bracket_net("convex", 0.5, 8)
