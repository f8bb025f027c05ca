"""Closed-form channel characterization tests."""

import math

import numpy as np
import pytest
from scipy import integrate

from hapris import analytic as ana
from hapris import fading as fad
from hapris import geometry as geo
from hapris import montecarlo as mc

GAMMA_3_2 = math.sqrt(math.pi) / 2.0

GEOM = geo.NetworkGeometry(lambda_hap=5e-7, lambda_ris=5e-4, h_hap=50_000.0, h_ris=50.0)
BUDGET = ana.LinkBudget(e_s=10.0, n0=10.0**-12.2)
SCEN1 = fad.FadingScenario(
    ris_user=fad.ShadowedRicianParams(k=0.0071, m=0.739),
    hap_ris=fad.RicianParams(k=0.1),
    hap_user=fad.RayleighParams(),
)
SCEN2 = fad.FadingScenario(
    ris_user=fad.ShadowedRicianParams(k=4.0823, m=19.4),
    hap_ris=fad.RicianParams(k=10.0),
    hap_user=fad.RayleighParams(),
)


def model(scen=SCEN1, l_elements=16, mode=ana.Mode.RIS_ASSISTED):
    return ana.SystemModel(GEOM, scen, BUDGET, l_elements=l_elements, mode=mode)


class TestBudgetAndModel:
    def test_rho0(self):
        assert BUDGET.rho0 == pytest.approx(1.585e13, rel=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            ana.LinkBudget(e_s=0.0, n0=1.0)
        with pytest.raises(ValueError):
            ana.LinkBudget(e_s=1.0, n0=0.0)
        with pytest.raises(ValueError):
            ana.SystemModel(GEOM, SCEN1, BUDGET, l_elements=0)
        with pytest.raises(ValueError):
            ana.SystemModel(GEOM, SCEN1, BUDGET, l_elements=2.5)


class TestGammaChannelApprox:
    def test_from_moments(self):
        g = ana.GammaChannelApprox.from_moments(2.0, 1.0)
        assert g.alpha == 4.0 and g.beta == 0.25 * 2.0  # alpha=4, beta=0.5
        assert g.alpha * g.beta == pytest.approx(2.0)
        assert g.alpha * g.beta**2 == pytest.approx(1.0)

    def test_inconsistent_rejected(self):
        with pytest.raises(ValueError):
            ana.GammaChannelApprox(alpha=4.0, beta=0.5, mean_a=2.0, var_a=2.0)
        with pytest.raises(ValueError):
            ana.GammaChannelApprox(alpha=-1.0, beta=0.5, mean_a=-0.5, var_a=-0.25)

    def test_moment_match_at_scenario(self):
        m = model()
        g = ana.gamma_approx(m)
        assert g.alpha == pytest.approx(g.mean_a**2 / g.var_a, rel=1e-14)
        assert g.beta == pytest.approx(g.var_a / g.mean_a, rel=1e-14)


class TestMeanAbsA:
    def test_direct_only_composition(self):
        m = model(mode=ana.Mode.DIRECT_ONLY)
        want = GAMMA_3_2 * geo.distance_moment(1.0, GEOM.eps_u, GEOM.lambda_hap, GEOM.h_hap)
        assert ana.mean_abs_a(m) == pytest.approx(want, rel=1e-13)

    def test_linear_in_element_count(self):
        p2 = ana.mean_abs_a(model(mode=ana.Mode.DIRECT_ONLY))
        p1_16 = ana.mean_abs_a(model(l_elements=16)) - p2
        p1_32 = ana.mean_abs_a(model(l_elements=32)) - p2
        assert p1_32 == pytest.approx(2.0 * p1_16, rel=1e-12)

    def test_against_simulation(self):
        m = model(SCEN1, 16)
        mean_est, _ = mc.estimate_gain_moments(m, mc.SamplingMode.DISTANCE, 400_000, 77)
        assert abs(mean_est.value - ana.mean_abs_a(m)) < 3.0 * mean_est.std_error


class TestVarAbsA:
    def test_direct_only_composition(self):
        m = model(mode=ana.Mode.DIRECT_ONLY)
        du1 = geo.distance_moment(1.0, GEOM.eps_u, GEOM.lambda_hap, GEOM.h_hap)
        du2 = geo.distance_moment(2.0, GEOM.eps_u, GEOM.lambda_hap, GEOM.h_hap)
        want = 1.0 * du2 - (GAMMA_3_2 * du1) ** 2
        assert ana.var_abs_a(m) == pytest.approx(want, rel=1e-13)

    def test_single_element_drops_cross_term(self):
        m = model(l_elements=1)
        eq1 = fad.rician_moment(1.0, SCEN1.hap_ris)
        eg1 = fad.shadowed_rician_moment(1.0, SCEN1.ris_user)
        dq1 = geo.distance_moment(1.0, GEOM.eps_q, GEOM.lambda_hap, GEOM.h_hap - GEOM.h_ris)
        dg1 = geo.distance_moment(1.0, GEOM.eps_g, GEOM.lambda_ris, GEOM.h_ris)
        dq2 = geo.distance_moment(2.0, GEOM.eps_q, GEOM.lambda_hap, GEOM.h_hap - GEOM.h_ris)
        dg2 = geo.distance_moment(2.0, GEOM.eps_g, GEOM.lambda_ris, GEOM.h_ris)
        p1 = eq1 * eg1 * dq1 * dg1
        want_ris = 1.0 * dq2 * dg2 - p1 * p1  # E|q|^2 E|g|^2 = 1 at sigma2 = 1
        got_ris = ana.var_abs_a(m) - ana.var_abs_a(model(mode=ana.Mode.DIRECT_ONLY))
        assert got_ris == pytest.approx(want_ris, rel=1e-12)

    def test_positive_across_configurations(self):
        for scen in (SCEN1, SCEN2):
            for ll in (1, 4, 16, 64, 256):
                assert ana.var_abs_a(model(scen, ll)) > 0.0

    def test_against_simulation(self):
        m = model(SCEN2, 16)
        _, var_est = mc.estimate_gain_moments(m, mc.SamplingMode.DISTANCE, 400_000, 78)
        assert var_est.value == pytest.approx(ana.var_abs_a(m), rel=0.05)


class TestAlternatePrefactor:
    def test_cascade_ratio(self):
        # the alternate display rescales only the cascade term, by exactly
        # sqrt((1 + K_g)(1 + K_q))
        for scen in (SCEN1, SCEN2):
            m = model(scen, 16)
            p2 = ana.mean_abs_a(model(scen, mode=ana.Mode.DIRECT_ONLY))
            ratio = (ana.mean_abs_a_alt(m) - p2) / (ana.mean_abs_a(m) - p2)
            want = math.sqrt((1.0 + scen.ris_user.k) * (1.0 + scen.hap_ris.k))
            assert ratio == pytest.approx(want, rel=1e-10)

    def test_direct_only_identical(self):
        m = model(mode=ana.Mode.DIRECT_ONLY)
        assert ana.mean_abs_a_alt(m) == ana.mean_abs_a(m)
        assert ana.var_abs_a_alt(m) == ana.var_abs_a(m)


class TestChannelPdf:
    def test_normalization(self):
        g = ana.GammaChannelApprox.from_moments(2.0, 0.8)
        val, _ = integrate.quad(lambda x: ana.channel_pdf(g, x), 0, np.inf, limit=200)
        assert val == pytest.approx(1.0, rel=1e-9)

    def test_exponential_case(self):
        g = ana.GammaChannelApprox.from_moments(1.0, 1.0)  # alpha = 1, beta = 1
        assert g.alpha == 1.0
        for x in (0.0, 0.5, 2.0):
            assert ana.channel_pdf(g, x) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_mode_location(self):
        g = ana.GammaChannelApprox.from_moments(3.0, 1.5)
        mode_x = (g.alpha - 1.0) * g.beta
        xs = np.linspace(mode_x * 0.5, mode_x * 1.5, 1001)
        dens = [ana.channel_pdf(g, float(x)) for x in xs]
        assert abs(float(xs[int(np.argmax(dens))]) - mode_x) < (xs[1] - xs[0]) * 2

    def test_domain(self):
        g = ana.GammaChannelApprox.from_moments(1.0, 0.5)
        with pytest.raises(ValueError):
            ana.channel_pdf(g, -0.1)


class TestSnrPdf:
    def test_normalization(self):
        g = ana.GammaChannelApprox.from_moments(2.0, 0.8)
        val, _ = integrate.quad(lambda x: ana.snr_pdf(g, 3.0, x), 0, np.inf, limit=400)
        assert val == pytest.approx(1.0, rel=1e-8)

    def test_change_of_variables_consistency(self):
        g = ana.GammaChannelApprox.from_moments(1.6, 0.9)
        rho0 = 7.0
        for y in (0.5, 2.0, 10.0):
            by_quad, _ = integrate.quad(lambda x: ana.snr_pdf(g, rho0, x), 0, y, limit=400,
                                        epsabs=1e-13, epsrel=1e-12)
            from hapris import specfun

            want = specfun.lower_incomplete_gamma_regularized(
                g.alpha, math.sqrt(y / rho0) / g.beta
            )
            assert by_quad == pytest.approx(want, rel=1e-8)

    def test_point_value(self):
        g = ana.GammaChannelApprox.from_moments(2.0, 2.0)  # alpha = 2, beta = 1
        assert ana.snr_pdf(g, 1.0, 1.0) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-12)

    def test_origin_behavior(self):
        assert ana.snr_pdf(ana.GammaChannelApprox.from_moments(3.0, 1.0), 1.0, 0.0) == 0.0
        assert math.isinf(ana.snr_pdf(ana.GammaChannelApprox.from_moments(0.5, 0.5), 1.0, 0.0))


class TestCoverageProbability:
    def test_zero_threshold(self):
        g = ana.gamma_approx(model())
        assert ana.coverage_probability(g, BUDGET.rho0, 0.0) == 1.0

    def test_exponential_shape(self):
        # alpha = 1, beta = 1, rho0 = 4: coverage is exp(-sqrt(th) / 2)
        g = ana.GammaChannelApprox.from_moments(1.0, 1.0)
        for th in (0.1, 1.0, 25.0):
            assert ana.coverage_probability(g, 4.0, th) == pytest.approx(
                math.exp(-math.sqrt(th) / 2.0), rel=1e-10
            )

    def test_monotone_in_threshold_and_snr(self):
        g = ana.gamma_approx(model())
        ths = [10.0 ** (d / 10.0) for d in range(-10, 31)]
        pcs = [ana.coverage_probability(g, BUDGET.rho0, th) for th in ths]
        assert all(a >= b for a, b in zip(pcs, pcs[1:]))
        rhos = [BUDGET.rho0 * f for f in (0.25, 0.5, 1.0, 2.0, 4.0)]
        pcs_rho = [ana.coverage_probability(g, r, 1.0) for r in rhos]
        assert all(a <= b for a, b in zip(pcs_rho, pcs_rho[1:]))

    def test_limits(self):
        g = ana.gamma_approx(model())
        assert ana.coverage_probability(g, BUDGET.rho0, 1e30) < 1e-12
        with pytest.raises(ValueError):
            ana.coverage_probability(g, BUDGET.rho0, -1.0)

    def test_complement_matches_snr_pdf_integral(self):
        g = ana.GammaChannelApprox.from_moments(1.8, 1.1)
        rho0 = 5.0
        for th in (0.4, 2.5, 9.0):
            mass, _ = integrate.quad(lambda x: ana.snr_pdf(g, rho0, x), 0, th, limit=400,
                                     epsabs=1e-13, epsrel=1e-12)
            assert 1.0 - ana.coverage_probability(g, rho0, th) == pytest.approx(mass, rel=1e-6)


class TestErgodicCapacity:
    def test_closed_form_matches_quadrature_grid(self):
        for alpha in (0.7, 1.7, 2.5, 3.3, 5.5, 8.4):
            for b2r in (0.05, 0.5, 2.0, 25.0):
                g = ana.GammaChannelApprox.from_moments(alpha * math.sqrt(b2r), alpha * b2r)
                closed = ana.ergodic_capacity_closed_form(g, 1.0)
                quad = ana.ergodic_capacity_quadrature(g, 1.0)
                assert closed == pytest.approx(quad, rel=1e-4)

    def test_monotone_in_snr(self):
        g = ana.GammaChannelApprox.from_moments(1.5, 0.25)
        caps = [ana.ergodic_capacity(g, r) for r in (0.1, 1.0, 10.0, 100.0, 1e4)]
        assert all(a < b for a, b in zip(caps, caps[1:]))

    def test_pole_guard(self):
        g = ana.GammaChannelApprox.from_moments(3.0, 3.0)  # alpha exactly 3
        with pytest.raises(ana.ClosedFormUnavailable):
            ana.ergodic_capacity_closed_form(g, 1.0)

    def test_series_argument_guard(self):
        g = ana.GammaChannelApprox.from_moments(3.3 * math.sqrt(1e-4), 3.3 * 1e-4)
        with pytest.raises(ana.ClosedFormUnavailable):
            ana.ergodic_capacity_closed_form(g, 1.0)  # |z| = 2500

    def test_fallback_is_continuous_at_pole(self):
        b2r = 1.3
        vals = {}
        for alpha in (2.99, 3.0, 3.01):
            g = ana.GammaChannelApprox.from_moments(alpha * math.sqrt(b2r), alpha * b2r)
            vals[alpha] = ana.ergodic_capacity(g, 1.0)
        mid = 0.5 * (vals[2.99] + vals[3.01])
        assert vals[3.0] == pytest.approx(mid, rel=1e-3)

    def test_quadrature_zero_signal(self):
        g = ana.GammaChannelApprox.from_moments(2.0, 1.0)
        assert ana.ergodic_capacity_quadrature(g, 1e-30) < 1e-10

    def test_quadrature_point_mass_limit(self):
        # alpha large with alpha beta = 1: |A| concentrates at 1
        alpha = 4e4
        g = ana.GammaChannelApprox.from_moments(1.0, 1.0 / alpha)
        for rho0 in (0.5, 10.0, 1e4):
            assert ana.ergodic_capacity_quadrature(g, rho0) == pytest.approx(
                math.log2(1.0 + rho0), rel=2e-3
            )

    def test_quadrature_against_gamma_draws(self):
        g = ana.GammaChannelApprox.from_moments(3.0 * 0.2, 3.0 * 0.04)  # alpha=3, beta=0.2
        rho0 = 100.0
        rng = np.random.default_rng(55)
        draws = rng.gamma(g.alpha, g.beta, 2_000_000)
        c = np.log2(1.0 + rho0 * draws * draws)
        se = c.std(ddof=1) / math.sqrt(c.size)
        assert abs(float(c.mean()) - ana.ergodic_capacity_quadrature(g, rho0)) < 3.0 * se

    def test_dispatcher_uses_fallback_beyond_limit(self):
        m = model(SCEN1, 64)
        g = ana.gamma_approx(m)
        # paper-parameter L=64 point sits beyond the series limit
        with pytest.raises(ana.ClosedFormUnavailable):
            ana.ergodic_capacity_closed_form(g, BUDGET.rho0)
        val = ana.ergodic_capacity(g, BUDGET.rho0)
        assert val == pytest.approx(ana.ergodic_capacity_quadrature(g, BUDGET.rho0), rel=1e-12)
