"""Policy construction, BER model, closed-form rates, and their invariants."""

import math
from dataclasses import replace

import pytest

from impulsewf.adaptation import (LOG2_E, ErrorModel, NoCrossoverError,
                                  Policy, PolicyDomain, Scheme,
                                  WaterfillConstants, _crossover_from_rates,
                                  budget_lhs, crossover_pth,
                                  impulse_ber_under_conventional, make_policy,
                                  outage_prob_conventional, qam_ber,
                                  rate_aggressive, rate_conservative,
                                  rate_conventional, solve_threshold,
                                  wf_power_fraction, wf_rate_bits)
from impulsewf.channel import (ChannelParams, DensityKind, SinrDensity,
                               density_at)
from impulsewf.numerics import exp_integral_e1, integrate_semi_infinite

EM = ErrorModel(target_ber=1e-3)

SET_A = dict(snr_db=0.0, inr_db=0.0)     # low SNR, low INR
SET_B = dict(snr_db=10.0, inr_db=20.0)   # high SNR, high INR
SET_C = dict(snr_db=0.0, inr_db=20.0)    # low SNR, high INR


def params_for(config, p):
    return ChannelParams(impulse_prob=p, **config)


class TestErrorModel:
    def test_k_sinr_value(self):
        # -1.5 / ln(1e-3 / 0.2)
        assert EM.k_sinr == pytest.approx(0.2831087487, abs=1e-10)

    @pytest.mark.parametrize("bad", [0.2, 0.3, 0.0, -0.1, 1.0])
    def test_rejects_target_outside_open_interval(self, bad):
        with pytest.raises(ValueError):
            ErrorModel(target_ber=bad, ber_coeff=0.2)

    def test_rejects_non_positive_coeff(self):
        with pytest.raises(ValueError):
            ErrorModel(target_ber=1e-3, ber_coeff=0.0)

    def test_constants_relations(self):
        params = params_for(SET_B, 0.4)
        consts = WaterfillConstants.for_link(params, EM)
        assert consts.k_clean == EM.k_sinr * params.snr_linear
        assert consts.k_impulse == consts.k_clean / (1.0 + params.inr_linear)
        assert consts.k_sinr > 0 and consts.k_clean > 0 and consts.k_impulse > 0


class TestQamBer:
    def test_zero_sinr_gives_coefficient(self):
        assert qam_ber(0.0, 4.0) == 0.2
        assert qam_ber(0.0, 64.0, ber_coeff=0.1) == 0.1

    def test_inverts_to_target(self):
        gamma = math.log(200.0) / 1.5
        assert qam_ber(gamma, 2.0) == pytest.approx(1e-3, rel=1e-12)

    def test_direct_evaluation(self):
        assert qam_ber(10.0, 4.0) == pytest.approx(0.2 * math.exp(-5.0), rel=1e-12)
        assert qam_ber(10.0, 4.0) == pytest.approx(1.3476e-3, abs=1e-7)

    def test_zero_rate_convention(self):
        assert qam_ber(5.0, 1.0) == 0.2

    def test_clamped_to_probability(self):
        assert qam_ber(0.0, 2.0, ber_coeff=1.7) == 1.0

    @pytest.mark.parametrize("gamma,m", [(-1.0, 4.0), (1.0, 0.5), (1.0, 0.999)])
    def test_domain_errors(self, gamma, m):
        with pytest.raises(ValueError):
            qam_ber(gamma, m)


class TestWaterfillingShapes:
    def setup_method(self):
        self.policy = Policy(scheme=Scheme.AGGRESSIVE, threshold=0.758,
                             k_used=0.283105, domain=PolicyDomain.CHANNEL_GAIN)

    def test_zero_at_and_below_threshold(self):
        assert wf_power_fraction(0.758, self.policy) == 0.0
        assert wf_power_fraction(0.5, self.policy) == 0.0
        assert wf_rate_bits(0.758, self.policy) == 0.0
        assert wf_rate_bits(0.9 * 0.758, self.policy) == 0.0

    def test_power_fraction_example(self):
        expected = (1.0 / 0.758 - 0.5) / 0.283105
        got = wf_power_fraction(2.0, self.policy)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(2.8941, abs=1e-3)

    def test_doubling_gamma_adds_one_bit(self):
        assert wf_rate_bits(2.0 * 0.758, self.policy) == pytest.approx(1.0, rel=1e-14)

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            Policy(scheme=Scheme.AGGRESSIVE, threshold=0.0,
                   k_used=0.28, domain=PolicyDomain.CHANNEL_GAIN)


class TestSolveThreshold:
    def test_forward_evaluated_unit_root(self):
        k = math.exp(-1.0) - exp_integral_e1(1.0)
        root = solve_threshold(SinrDensity.unit_exponential(), k)
        assert root == pytest.approx(1.0, abs=1e-9)

    def test_known_clean_threshold(self):
        root = solve_threshold(SinrDensity.unit_exponential(), 0.283105)
        assert root == pytest.approx(0.758, abs=5e-4)

    def test_degenerate_mixture_matches_clean(self):
        params = params_for(SET_A, 0.0)
        mixture = SinrDensity.for_params(params, DensityKind.MIXTURE)
        clean = SinrDensity.for_params(params, DensityKind.CLEAN)
        assert solve_threshold(mixture, EM.k_sinr) == solve_threshold(clean, EM.k_sinr)

    def test_rejects_non_positive_k(self):
        with pytest.raises(ValueError):
            solve_threshold(SinrDensity.unit_exponential(), 0.0)

    @pytest.mark.parametrize("config", [SET_A, SET_B, SET_C])
    @pytest.mark.parametrize("p", [0.0, 0.3, 0.7, 1.0])
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_threshold_residuals(self, config, p, scheme):
        params = params_for(config, p)
        policy = make_policy(scheme, params, EM)
        if policy.domain is PolicyDomain.SINR:
            density = SinrDensity.for_params(params, DensityKind.MIXTURE)
        else:
            density = SinrDensity.unit_exponential()
        residual = budget_lhs(density, policy.threshold) - policy.k_used
        assert abs(residual) <= 1e-9

    @pytest.mark.parametrize("config", [SET_A, SET_B, SET_C])
    @pytest.mark.parametrize("p", [0.2, 0.8])
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_power_budget_spent_exactly(self, config, p, scheme):
        # Quadrature restatement of the budget equation the solver enforced.
        params = params_for(config, p)
        policy = make_policy(scheme, params, EM)
        if policy.domain is PolicyDomain.SINR:
            density = SinrDensity.for_params(params, DensityKind.MIXTURE)
        else:
            density = SinrDensity.unit_exponential()
        spent = integrate_semi_infinite(
            lambda g: wf_power_fraction(g, policy) * density_at(density, g),
            policy.threshold)
        assert spent == pytest.approx(1.0, abs=1e-6)


class TestClosedFormRates:
    def test_conventional_set_a_points(self):
        assert rate_conventional(params_for(SET_A, 0.0), EM) == \
            pytest.approx(0.4842, abs=2e-3)
        assert rate_conventional(params_for(SET_A, 0.5), EM) == \
            pytest.approx(0.2544, abs=2e-3)
        assert rate_conventional(params_for(SET_A, 1.0), EM) == \
            pytest.approx(0.3064, abs=2e-3)

    def test_conventional_p1_equals_conservative(self):
        for config in (SET_A, SET_B, SET_C):
            conventional = rate_conventional(params_for(config, 1.0), EM)
            conservative = rate_conservative(params_for(config, 1.0), EM)
            assert abs(conventional - conservative) <= 1e-9

    def test_conventional_p0_equals_aggressive_p0(self):
        for config in (SET_A, SET_B, SET_C):
            conventional = rate_conventional(params_for(config, 0.0), EM)
            aggressive = rate_aggressive(params_for(config, 0.0), EM)
            assert abs(conventional - aggressive) <= 1e-9

    def test_aggressive_known_points(self):
        assert rate_aggressive(params_for(SET_A, 1.0), EM) == 0.0
        assert rate_aggressive(params_for(SET_B, 0.5), EM) == \
            pytest.approx(0.8762, abs=2e-3)
        assert rate_aggressive(params_for(SET_A, 0.9), EM) == \
            pytest.approx(0.0484, abs=2e-3)

    def test_aggressive_exactly_linear_in_p(self):
        base = rate_aggressive(params_for(SET_B, 0.0), EM)
        for p in (0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
            assert rate_aggressive(params_for(SET_B, p), EM) == (1.0 - p) * base

    def test_conservative_known_points_and_flat_in_p(self):
        values = [rate_conservative(params_for(SET_A, p), EM)
                  for p in (0.0, 0.3, 0.6, 1.0)]
        assert all(v == values[0] for v in values)
        assert values[0] == pytest.approx(0.3064, abs=2e-3)
        assert rate_conservative(params_for(SET_C, 0.5), EM) == \
            pytest.approx(0.0155, abs=2e-3)
        assert rate_conservative(params_for(SET_B, 0.5), EM) == \
            pytest.approx(0.0957, abs=2e-3)

    def test_rate_integral_closed_form_vs_quadrature(self):
        # log2(e) * E1(t) against the defining rate integral.
        for t in (0.1, 0.5, 1.0, 2.0):
            quadrature = integrate_semi_infinite(
                lambda g: math.log2(g / t) * math.exp(-g), t)
            assert abs(LOG2_E * exp_integral_e1(t) - quadrature) <= 1e-7

    @pytest.mark.parametrize("rate", [rate_conventional, rate_aggressive,
                                      rate_conservative])
    def test_rates_nondecreasing_in_snr(self, rate):
        for inr_db, p in ((0.0, 0.4), (20.0, 0.4)):
            values = [rate(ChannelParams(snr_db=s, inr_db=inr_db,
                                         impulse_prob=p), EM)
                      for s in (-5.0, 0.0, 5.0, 10.0, 15.0)]
            assert all(b >= a for a, b in zip(values, values[1:]))


class TestOutageAndHitBer:
    def test_outage_prob_values(self):
        assert outage_prob_conventional(0.0) == 0.0
        assert outage_prob_conventional(0.5) == 0.25
        assert outage_prob_conventional(1.0) == 0.0

    def test_outage_prob_domain(self):
        with pytest.raises(ValueError):
            outage_prob_conventional(1.5)

    def test_hit_ber_zero_inr_meets_target_exactly(self):
        assert impulse_ber_under_conventional(EM, 0.0) == EM.target_ber

    def test_hit_ber_unit_inr(self):
        expected = math.sqrt(0.2 * 1e-3)
        assert impulse_ber_under_conventional(EM, 1.0) == \
            pytest.approx(expected, abs=1e-12)

    def test_hit_ber_closed_form_identity(self):
        c, pb = EM.ber_coeff, EM.target_ber
        for inr in (0.01, 0.5, 1.0, 10.0, 100.0):
            expected = c ** (inr / (1.0 + inr)) * pb ** (1.0 / (1.0 + inr))
            assert abs(impulse_ber_under_conventional(EM, inr) - expected) <= 1e-12

    def test_hit_ber_exceeds_target_for_positive_inr(self):
        for inr in (1e-6, 0.1, 1.0, 100.0):
            assert impulse_ber_under_conventional(EM, inr) > EM.target_ber

    def test_hit_ber_rejects_negative_inr(self):
        with pytest.raises(ValueError):
            impulse_ber_under_conventional(EM, -0.5)


class TestCrossover:
    def test_set_a_value(self):
        p_th = crossover_pth(params_for(SET_A, 0.5), EM)
        assert p_th == pytest.approx(0.3672, abs=1e-3)

    def test_set_b_value(self):
        p_th = crossover_pth(params_for(SET_B, 0.5), EM)
        assert p_th == pytest.approx(0.9454, abs=1e-3)

    def test_matches_linear_construction(self):
        params = params_for(SET_A, 0.5)
        p_th = crossover_pth(params, EM)
        rate_n0 = rate_aggressive(replace(params, impulse_prob=0.0), EM)
        assert rate_aggressive(replace(params, impulse_prob=p_th), EM) == \
            pytest.approx(rate_conservative(params, EM), rel=1e-12)
        assert p_th == 1.0 - rate_conservative(params, EM) / rate_n0

    def test_increasing_in_inr(self):
        values = [crossover_pth(ChannelParams(snr_db=0.0, inr_db=mu,
                                              impulse_prob=0.5), EM)
                  for mu in (0.0, 10.0, 20.0)]
        assert values[0] < values[1] < values[2]

    def test_boundary_equal_rates(self):
        params = ChannelParams(snr_db=0.0, inr_db=-math.inf, impulse_prob=0.5)
        assert crossover_pth(params, EM) == 0.0

    def test_no_crossover_raises(self):
        with pytest.raises(NoCrossoverError):
            _crossover_from_rates(0.3, 0.4)
