"""Tests for the seven conditional updates and the sweep."""

from collections import Counter

import numpy as np
import pytest
from hstobit_core import DomainError, HorseshoeState, ModelConfig, NumericError, RngStream, TobitDataset
from hstobit_engine.gibbs import (
    SCALE_FLOOR,
    GibbsSampler,
    choose_beta_method,
    lambda2_conditional,
    sigma2_conditional,
    tau2_conditional,
    update_beta,
    update_lambda2,
    update_latent_z,
    update_nu,
    update_sigma2,
    update_tau2,
    update_xi,
)
from scipy import stats

from tests.conftest import make_tobit_data


def _state(data: TobitDataset, cfg: ModelConfig, seed: int = 0) -> HorseshoeState:
    gen = RngStream(seed).generator
    state = HorseshoeState.initial(data, cfg)
    state.beta = gen.normal(size=data.p)
    state.lambda2 = gen.uniform(0.5, 2.0, size=data.p)
    state.nu = gen.uniform(0.5, 2.0, size=data.p)
    state.tau2 = 0.8
    state.xi = 1.2
    state.sigma2 = 0.9
    return state


class TestLatentZ:
    def test_observed_rows_copy_y(self, sparse_data, model_cfg, rng):
        state = _state(sparse_data, model_cfg)
        state.z = np.full(sparse_data.n, -7.0)
        update_latent_z(state, sparse_data, model_cfg, rng)
        obs = ~sparse_data.censored
        np.testing.assert_array_equal(state.z[obs], sparse_data.y[obs])
        assert np.all(state.z[sparse_data.censored] <= sparse_data.c)
        state.check(sparse_data)

    def test_censored_draws_follow_tempered_truncated_normal(self):
        n, alpha, sigma2, beta = 4000, 0.5, 1.0, 0.5
        data = TobitDataset(X=np.ones((n, 1)), y=np.zeros(n), c=0.0)
        cfg = ModelConfig(alpha=alpha)
        state = HorseshoeState.initial(data, cfg)
        state.beta = np.array([beta])
        state.sigma2 = sigma2
        update_latent_z(state, data, cfg, RngStream(1))
        sd = np.sqrt(sigma2 / alpha)
        target = stats.truncnorm(-np.inf, (0.0 - beta) / sd, loc=beta, scale=sd)
        assert stats.kstest(state.z, target.cdf).pvalue > 0.001

    def test_no_censoring_draws_nothing(self, model_cfg):
        data = TobitDataset(X=np.eye(2), y=np.array([1.0, 2.0]))
        state = HorseshoeState.initial(data, model_cfg)
        rng = RngStream(4)
        update_latent_z(state, data, model_cfg, rng)
        np.testing.assert_array_equal(state.z, [1.0, 2.0])
        np.testing.assert_array_equal(rng.generator.random(3), RngStream(4).generator.random(3))


class TestBeta:
    def test_direct_and_auxiliary_agree(self):
        beta = np.zeros(50)
        beta[:3] = [1.0, -1.0, 0.5]
        data = make_tobit_data(20, beta, seed=5)
        cfg = ModelConfig(alpha=0.9)
        state = _state(data, cfg, seed=6)
        direct, auxiliary = state.copy(), state.copy()
        update_beta(direct, data, cfg, RngStream(8), method="direct")
        update_beta(auxiliary, data, cfg, RngStream(8), method="auxiliary")
        np.testing.assert_allclose(direct.beta, auxiliary.beta, rtol=0, atol=1e-8)

    def test_agreement_when_n_exceeds_p(self, sparse_data, model_cfg):
        state = _state(sparse_data, model_cfg, seed=2)
        direct, auxiliary = state.copy(), state.copy()
        update_beta(direct, sparse_data, model_cfg, RngStream(9), method="direct")
        update_beta(auxiliary, sparse_data, model_cfg, RngStream(9), method="auxiliary")
        np.testing.assert_allclose(direct.beta, auxiliary.beta, rtol=0, atol=1e-8)

    @pytest.mark.parametrize("method", ["direct", "auxiliary"])
    def test_scalar_conjugate_posterior(self, method):
        # y = 2 observed, x = 1, σ² = 1, prior variance 1: β | z ~ N(1, 1/2).
        data = TobitDataset(X=np.array([[1.0]]), y=np.array([2.0]))
        cfg = ModelConfig(alpha=1.0)
        state = HorseshoeState.initial(data, cfg)
        rng = RngStream(10)
        draws = np.empty(20_000)
        for k in range(draws.size):
            update_beta(state, data, cfg, rng, method=method)
            draws[k] = state.beta[0]
        assert draws.mean() == pytest.approx(1.0, abs=0.02)
        assert draws.var() == pytest.approx(0.5, rel=0.04)

    def test_tempering_inflates_posterior_variance(self):
        data = TobitDataset(X=np.array([[1.0]]), y=np.array([2.0]))
        cfg = ModelConfig(alpha=0.5)
        state = HorseshoeState.initial(data, cfg)
        rng = RngStream(12)
        draws = np.empty(20_000)
        for k in range(draws.size):
            update_beta(state, data, cfg, rng)
            draws[k] = state.beta[0]
        # precision 0.5 + 1, mean 0.5·2 / 1.5
        assert draws.mean() == pytest.approx(2 / 3, abs=0.02)
        assert draws.var() == pytest.approx(2 / 3, rel=0.04)

    def test_unknown_method(self, sparse_data, model_cfg, rng):
        with pytest.raises(DomainError, match="Unknown beta sampler"):
            update_beta(_state(sparse_data, model_cfg), sparse_data, model_cfg, rng, method="qr")

    def test_failed_factorization_carries_context(self, sparse_data, model_cfg, rng):
        state = _state(sparse_data, model_cfg)
        with pytest.raises(NumericError, match=r"beta update failed \(direct\)") as info:
            update_beta(state, sparse_data, model_cfg, rng, gram=-100.0 * np.eye(sparse_data.p))
        assert info.value.tau2 == pytest.approx(0.8)
        assert info.value.min_lambda2 == pytest.approx(float(state.lambda2.min()))
        assert info.value.pivot == 0

    def test_vanishing_prior_variance_is_clamped(self, sparse_data, model_cfg, rng):
        state = _state(sparse_data, model_cfg)
        state.tau2 = 1e-320
        counter: Counter[str] = Counter()
        update_beta(state, sparse_data, model_cfg, rng, counter=counter)
        assert counter["prior_variance"] == sparse_data.p
        assert np.all(np.abs(state.beta) < 1e-100)


class TestScaleConditionals:
    def test_lambda2_parameters(self):
        shape, scale = lambda2_conditional(np.array([1.0, 0.0]), np.array([2.0, 4.0]), 0.5)
        assert shape == 1.0
        np.testing.assert_allclose(scale, [0.5 + 1.0, 0.25])

    def test_tau2_parameters(self):
        shape, scale = tau2_conditional(np.array([1.0, 2.0, 0.0]), np.array([1.0, 4.0, 1.0]), 2.0)
        assert shape == 2.0
        assert scale == pytest.approx(0.5 + 0.5 * (1.0 + 1.0))

    def test_sigma2_parameters_are_tempered(self):
        X = np.eye(2)
        cfg = ModelConfig(alpha=0.5, a0=2.0, b0=3.0)
        shape, scale = sigma2_conditional(np.array([1.0, -1.0]), X, np.zeros(2), cfg)
        assert shape == pytest.approx(2.0 + 0.5 * 0.5 * 2)
        assert scale == pytest.approx(3.0 + 0.25 * 2.0)

    def test_lambda2_draws_match_inverse_gamma(self, model_cfg):
        p = 3000
        data = TobitDataset(X=np.ones((1, p)), y=np.array([1.0]))
        state = HorseshoeState.initial(data, model_cfg)
        state.beta = np.full(p, 0.7)
        state.nu = np.full(p, 1.5)
        state.tau2 = 0.4
        update_lambda2(state, model_cfg, RngStream(13))
        scale = 1 / 1.5 + 0.49 / 0.8
        assert stats.kstest(state.lambda2, stats.invgamma(1.0, scale=scale).cdf).pvalue > 0.001

    def test_nu_draws_match_inverse_gamma(self, model_cfg):
        p = 3000
        data = TobitDataset(X=np.ones((1, p)), y=np.array([1.0]))
        state = HorseshoeState.initial(data, model_cfg)
        state.lambda2 = np.full(p, 2.0)
        update_nu(state, RngStream(14))
        assert stats.kstest(state.nu, stats.invgamma(1.0, scale=1.5).cdf).pvalue > 0.001

    def test_global_updates_stay_positive(self, sparse_data, model_cfg, rng):
        state = _state(sparse_data, model_cfg)
        for _ in range(50):
            update_tau2(state, model_cfg, rng)
            update_xi(state, rng)
            assert state.tau2 > 0 and state.xi > 0

    def test_tau2_floor_is_counted(self, sparse_data, model_cfg, rng):
        state = _state(sparse_data, model_cfg)
        state.beta = np.zeros(sparse_data.p)
        state.xi = 1e308
        counter: Counter[str] = Counter()
        for _ in range(5):
            update_tau2(state, model_cfg, rng, counter)
        assert state.tau2 == SCALE_FLOOR
        assert counter["tau2"] == 5

    def test_sigma2_fixed_is_untouched(self, sparse_data, rng):
        cfg = ModelConfig(sigma2_fixed=0.3)
        state = _state(sparse_data, cfg)
        update_sigma2(state, sparse_data, cfg, rng)
        assert state.sigma2 == 0.3

    def test_sigma2_recovers_noise_level(self):
        n = 4000
        data = TobitDataset(X=np.ones((n, 1)), y=np.abs(RngStream(15).generator.normal(size=n)) + 10.0)
        cfg = ModelConfig(alpha=1.0, a0=1.0, b0=1.0)
        state = HorseshoeState.initial(data, cfg)
        state.z = np.asarray(data.y, dtype=float).copy()
        state.beta = np.array([10.0])
        update_sigma2(state, data, cfg, RngStream(16))
        expected = np.mean((data.y - 10.0) ** 2)
        assert state.sigma2 == pytest.approx(expected, rel=0.1)


KS_DRAWS = 100_000
KS_MIN_PVALUE = 1e-4


def _ks_pvalue(draws, shape, scale):
    return stats.kstest(np.asarray(draws), stats.invgamma(shape, scale=scale).cdf).pvalue


def _repeat(update, state, attr, n=KS_DRAWS):
    out = np.empty(n)
    for i in range(n):
        update()
        out[i] = getattr(state, attr)
    return out


@pytest.mark.slow
class TestInverseGammaStepsDistribution:
    """Each scale update against its closed-form inverse gamma at fixed conditioning values."""

    @pytest.mark.parametrize(("beta_j", "nu_j", "tau2"), [(0.7, 1.5, 0.4), (0.0, 0.2, 3.0), (-2.5, 8.0, 0.01)])
    def test_lambda2(self, model_cfg, beta_j, nu_j, tau2):
        data = TobitDataset(X=np.ones((1, KS_DRAWS)), y=np.array([1.0]))
        state = HorseshoeState.initial(data, model_cfg)
        state.beta = np.full(KS_DRAWS, beta_j)
        state.nu = np.full(KS_DRAWS, nu_j)
        state.tau2 = tau2
        update_lambda2(state, model_cfg, RngStream(21))
        assert _ks_pvalue(state.lambda2, 1.0, 1.0 / nu_j + beta_j**2 / (2.0 * tau2)) > KS_MIN_PVALUE

    @pytest.mark.parametrize("lambda2_j", [2.0, 0.05, 40.0])
    def test_nu(self, model_cfg, lambda2_j):
        data = TobitDataset(X=np.ones((1, KS_DRAWS)), y=np.array([1.0]))
        state = HorseshoeState.initial(data, model_cfg)
        state.lambda2 = np.full(KS_DRAWS, lambda2_j)
        update_nu(state, RngStream(22))
        assert _ks_pvalue(state.nu, 1.0, 1.0 + 1.0 / lambda2_j) > KS_MIN_PVALUE

    @pytest.mark.parametrize(
        ("beta", "lambda2", "xi"),
        [
            ([1.0, 2.0, 0.0], [1.0, 4.0, 1.0], 2.0),
            ([0.1, -0.1], [0.5, 0.5], 0.3),
            ([3.0, 0.0, 0.0, -1.0, 0.5], [10.0, 0.1, 1.0, 1.0, 2.0], 5.0),
        ],
    )
    def test_tau2(self, model_cfg, beta, lambda2, xi):
        beta, lambda2 = np.array(beta), np.array(lambda2)
        data = TobitDataset(X=np.ones((1, beta.size)), y=np.array([1.0]))
        state = HorseshoeState.initial(data, model_cfg)
        state.beta, state.lambda2, state.xi = beta, lambda2, xi
        rng = RngStream(23)
        draws = _repeat(lambda: update_tau2(state, model_cfg, rng), state, "tau2")
        shape = 0.5 * (beta.size + 1)
        scale = 1.0 / xi + 0.5 * np.sum(beta**2 / lambda2)
        assert _ks_pvalue(draws, shape, scale) > KS_MIN_PVALUE

    @pytest.mark.parametrize("tau2", [0.8, 0.01, 25.0])
    def test_xi(self, sparse_data, model_cfg, tau2):
        state = _state(sparse_data, model_cfg)
        state.tau2 = tau2
        rng = RngStream(24)
        draws = _repeat(lambda: update_xi(state, rng), state, "xi")
        assert _ks_pvalue(draws, 1.0, 1.0 + 1.0 / tau2) > KS_MIN_PVALUE

    @pytest.mark.parametrize(
        ("z", "alpha", "a0", "b0", "shape", "scale"),
        [
            # n = 4, RSS = 2, a0 = b0 = 1: IG(3, 2)
            ([1.0, -1.0, 0.0, 0.0], 1.0, 1.0, 1.0, 3.0, 2.0),
            ([1.0, -1.0, 0.0, 0.0], 0.5, 1.0, 1.0, 2.0, 1.5),
            ([2.0, 0.0, 1.0, -3.0], 0.99, 2.0, 0.5, 2.0 + 0.99 * 2.0, 0.5 + 0.99 * 7.0),
        ],
    )
    def test_sigma2(self, z, alpha, a0, b0, shape, scale):
        cfg = ModelConfig(alpha=alpha, a0=a0, b0=b0)
        data = TobitDataset(X=np.ones((4, 1)), y=np.ones(4))
        state = HorseshoeState.initial(data, cfg)
        state.z = np.array(z)
        state.beta = np.zeros(1)
        rng = RngStream(25)
        draws = _repeat(lambda: update_sigma2(state, data, cfg, rng), state, "sigma2")
        assert _ks_pvalue(draws, shape, scale) > KS_MIN_PVALUE


class TestGibbsSampler:
    def test_method_selection(self):
        assert choose_beta_method(10, 30) == "auxiliary"
        assert choose_beta_method(10, 20) == "direct"
        assert choose_beta_method(10, 30, "direct") == "direct"
        assert choose_beta_method(100, 30, "auxiliary") == "auxiliary"
        with pytest.raises(DomainError):
            choose_beta_method(10, 30, "cg")

    def test_gram_cached_only_for_direct(self, sparse_data, model_cfg):
        direct = GibbsSampler(sparse_data, model_cfg)
        assert direct.method == "direct"
        np.testing.assert_allclose(direct.gram, sparse_data.X.T @ sparse_data.X)
        assert GibbsSampler(sparse_data, model_cfg, method="auxiliary").gram is None

    def test_sweep_order(self, sparse_data, model_cfg, rng):
        calls = []

        class Recording(GibbsSampler):
            def __getattribute__(self, name):
                if name.startswith("update_"):
                    calls.append(name)
                return super().__getattribute__(name)

        Recording(sparse_data, model_cfg).sweep(HorseshoeState.initial(sparse_data, model_cfg), rng)
        assert calls == [
            "update_latent_z",
            "update_beta",
            "update_lambda2",
            "update_nu",
            "update_tau2",
            "update_xi",
            "update_sigma2",
        ]

    def test_sweeps_keep_state_valid(self, sparse_data, model_cfg, rng):
        sampler = GibbsSampler(sparse_data, model_cfg)
        state = HorseshoeState.initial(sparse_data, model_cfg)
        for _ in range(30):
            sampler.sweep(state, rng)
            state.check(sparse_data)

    def test_sweep_is_deterministic(self, sparse_data, model_cfg):
        results = []
        for _ in range(2):
            state = HorseshoeState.initial(sparse_data, model_cfg)
            sampler = GibbsSampler(sparse_data, model_cfg)
            rng = RngStream(77)
            for _ in range(10):
                sampler.sweep(state, rng)
            results.append(state)
        np.testing.assert_array_equal(results[0].beta, results[1].beta)
        assert results[0].sigma2 == results[1].sigma2
