import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special as sp, stats

from thzrelay import channel, mc_oracle
from thzrelay.channel import (BPSK, DPSK, DegenerateExponentError, HopParams, Modulation,
                              PathLossInputs, hop_coefficients, hop_snr_cdf, hop_snr_pdf,
                              path_loss, single_hop_avg_ber, single_hop_cdf_asymptotic,
                              single_hop_cdf_terms, single_hop_outage)

from conftest import GAINS, GAMMA_TH, SYM, db, hl


class TestPathLoss:
    def test_reference_value(self):
        # c·10^5.5 / (4π·300e9·50)
        assert path_loss(PathLossInputs(300e9, 50, GAINS, GAINS)) == pytest.approx(0.50294, rel=1e-4)

    def test_inverse_distance(self):
        a = path_loss(PathLossInputs(300e9, 40, GAINS, GAINS))
        b = path_loss(PathLossInputs(300e9, 80, GAINS, GAINS))
        assert b == pytest.approx(a / 2, rel=1e-14)

    def test_absorption_lowers_gain(self):
        a = path_loss(PathLossInputs(300e9, 50, GAINS, GAINS))
        b = path_loss(PathLossInputs(300e9, 50, GAINS, GAINS, beta=0.0032))
        assert 0 < b < a

    @pytest.mark.parametrize("kw", [dict(f=0), dict(d=-1), dict(G_t=0), dict(beta=-1e-3)])
    def test_invalid(self, kw):
        args = dict(f=300e9, d=50, G_t=1.0, G_r=1.0, beta=0.0)
        args.update(kw)
        with pytest.raises(ValueError):
            PathLossInputs(**args)


class TestParams:
    @pytest.mark.parametrize("field", ["alpha", "mu", "phi", "A_o", "hf_hat", "h_l"])
    def test_positive(self, field):
        kw = dict(alpha=2, mu=1, phi=3)
        kw[field] = 0.0
        with pytest.raises(ValueError):
            HopParams(**kw)

    def test_degenerate_flag(self):
        assert HopParams(2, 1, 2).degenerate
        assert not SYM.degenerate

    def test_modulation_labels(self):
        assert (BPSK.p, BPSK.q) == (0.5, 1.0) and (DPSK.p, DPSK.q) == (1.0, 1.0)
        with pytest.raises(ValueError):
            Modulation(1.0, 1.0, "BPSK")
        with pytest.raises(ValueError):
            Modulation(0.0, 1.0)
        assert Modulation.from_label("dpsk") == DPSK


class TestCoefficients:
    def test_symmetric(self):
        c = hop_coefficients(SYM)
        assert c.A == pytest.approx(1.81665, rel=1e-14) and c.B == 1.0

    @pytest.mark.parametrize("alpha", [0.7, 1.3, 2.0, 4.0])
    def test_unit_mu(self, alpha):
        assert hop_coefficients(HopParams(alpha, 1, 2.5)).B == 1.0

    def test_mu3(self):
        c = hop_coefficients(HopParams(2, 3, 2.0437))
        assert c.A == pytest.approx(2.0437 * 3**1.02185 / (2 * 2), rel=1e-14)
        assert c.B == 3.0


def bulk_grid(hop, gamma_bar, n):
    # up to w = B (γ/γ̄)^{α/2} = 15, i.e. before the exp(-w) tail
    c = hop_coefficients(hop)
    return np.geomspace(1e-3, gamma_bar * (15 / c.B) ** (2 / hop.alpha), n)


HOPS = [SYM, HopParams(2, 3, 2.0437), HopParams(1.2, 3, 1), HopParams(1.3, 2, 3.6333),
        HopParams(3, 2, 1, A_o=0.7, hf_hat=1.4, h_l=0.5), HopParams(1.5, 0.8, 4)]


class TestPdfCdf:
    @pytest.mark.parametrize("hop", HOPS)
    def test_pdf_normalised(self, hop):
        f = lambda v: hop_snr_pdf(hop, 10.0, np.exp(v)) * np.exp(v)
        val = sum(integrate.quad(f, a, b, limit=200)[0]
                  for a, b in [(-80, -10), (-10, 0), (0, 5), (5, 12)])
        assert val == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("hop", HOPS)
    def test_two_pdf_paths(self, hop):
        # the contour path is accurate relative to the integrand peak, so stay
        # out of the far tail where the density is exponentially small
        g = bulk_grid(hop, 10.0, 50)
        np.testing.assert_allclose(hop_snr_pdf(hop, 10.0, g, method="meijer"),
                                   hop_snr_pdf(hop, 10.0, g), rtol=1e-8)

    @pytest.mark.parametrize("hop", HOPS)
    def test_two_cdf_paths(self, hop):
        g = bulk_grid(hop, 10.0, 20)
        np.testing.assert_allclose(hop_snr_cdf(hop, 10.0, g, method="meijer"),
                                   hop_snr_cdf(hop, 10.0, g), rtol=1e-8, atol=1e-15)

    def test_near_pole_switches_path(self):
        # μ - φ/α = -1 + 5e-4 loses digits in the incomplete gamma recurrence
        hop = HopParams(2, 1, 4.001)
        g = np.geomspace(0.01, 100, 7)
        np.testing.assert_allclose(hop_snr_cdf(hop, 10.0, g),
                                   hop_snr_cdf(hop, 10.0, g, method="meijer"), rtol=1e-12)

    @pytest.mark.parametrize("hop", HOPS)
    def test_derivative(self, hop):
        # away from F ≈ 1, where differences of the CDF carry no digits
        g = bulk_grid(hop, 10.0, 50)
        h = 1e-5 * g
        d = (hop_snr_cdf(hop, 10.0, g + h) - hop_snr_cdf(hop, 10.0, g - h)) / (2 * h)
        np.testing.assert_allclose(d, hop_snr_pdf(hop, 10.0, g), rtol=1e-4)

    def test_limits(self):
        assert hop_snr_cdf(SYM, 10.0, 0.0) == 0.0
        assert hop_snr_cdf(SYM, 10.0, 1e7) == pytest.approx(1.0, abs=1e-4)

    @pytest.mark.parametrize("hop", HOPS[:3])
    def test_monotone(self, hop):
        g = np.geomspace(1e-4, 1e3, 80)
        assert np.all(np.diff(hop_snr_cdf(hop, 10.0, g)) >= 0)
        gb = np.geomspace(1, 1e4, 20)
        assert np.all(np.diff([hop_snr_cdf(hop, x, 2.0) for x in gb]) <= 0)

    def test_domain(self):
        with pytest.raises(ValueError):
            hop_snr_pdf(SYM, 10.0, 0.0)
        with pytest.raises(ValueError):
            hop_snr_cdf(SYM, 10.0, -1.0)

    def test_outage_is_cdf(self):
        assert single_hop_outage(SYM, 10.0, GAMMA_TH) == hop_snr_cdf(SYM, 10.0, GAMMA_TH)

    def test_pdf_against_histogram(self):
        x = mc_oracle.sample_hop_snr(SYM, 10.0, 21, 10**7)
        lo, hi = 0.9, 1.1
        p = np.mean((x > lo) & (x < hi))
        se = np.sqrt(p * (1 - p) / x.size)
        ref, _ = integrate.quad(lambda g: hop_snr_pdf(SYM, 10.0, g), lo, hi)
        assert abs(p - ref) <= 3 * se
        # centred bin average is the density to O(width²)
        assert ref / (hi - lo) == pytest.approx(hop_snr_pdf(SYM, 10.0, 1.0), rel=1e-3)

    def test_cdf_against_mc(self):
        x = mc_oracle.sample_hop_snr(SYM, 10.0, 22, 10**7)
        assert abs(np.mean(x < GAMMA_TH) - hop_snr_cdf(SYM, 10.0, GAMMA_TH)) <= 0.003

    @pytest.mark.parametrize("hop", [HopParams(1.2, 1, 1), HopParams(2, 2, 2.0437),
                                     HopParams(3, 3, 3.6333), HopParams(2, 1, 3.6333),
                                     HopParams(3, 2, 1)])
    def test_ks(self, hop):
        x = mc_oracle.sample_hop_snr(hop, 10.0, 23, 10**6)
        d = stats.kstest(x, lambda g: hop_snr_cdf(hop, 10.0, g)).statistic
        assert d < 0.005


class TestAsymptotic:
    def test_terms_b1(self):
        hop = HopParams(2, 3, 2.0437)
        c = hop_coefficients(hop)
        a, mu, phi = 2, 3, 2.0437
        t = single_hop_cdf_terms(hop)
        assert t[0][1] == phi / 2 and t[1][1] == a * mu / 2
        assert t[0][0] == pytest.approx(2 * c.A * sp.gamma((a * mu - phi) / a) * sp.gamma(phi / a)
                                        / (a * sp.gamma(1 + phi / a)), rel=1e-14)

    def test_degenerate(self):
        with pytest.raises(DegenerateExponentError) as ei:
            single_hop_cdf_asymptotic(HopParams(2, 1, 2), 100.0, 1.0)
        assert ei.value.pair

    def test_close_to_exact(self):
        gb = db(40)
        a = single_hop_cdf_asymptotic(SYM, gb, GAMMA_TH)
        assert a / hop_snr_cdf(SYM, gb, GAMMA_TH) - 1 == pytest.approx(0, abs=0.05)

    @pytest.mark.parametrize("hop", [SYM, HopParams(2, 3, 2.0437), HopParams(1.2, 3, 1)])
    def test_slope(self, hop):
        gb = np.array([db(50), db(60)])
        F = single_hop_cdf_asymptotic(hop, gb, 1.0)
        slope = np.log(F[1] / F[0]) / np.log(10.0)
        assert slope == pytest.approx(-min(hop.phi, hop.alpha * hop.mu) / 2, abs=0.05)


class TestSingleHopBer:
    def test_against_quadrature(self):
        hop = HopParams(2, 3, 2.0437, h_l=hl(80))
        gb = db(20)
        f = lambda v: (np.exp(0.5 * v - np.exp(v)) * hop_snr_cdf(hop, gb, np.exp(v))
                       / (2 * sp.gamma(0.5)))
        ref = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-11, limit=200)[0]
                  for a, b in [(-80, -10), (-10, 0), (0, 2), (2, 4.5)])
        assert single_hop_avg_ber(hop, gb, BPSK) == pytest.approx(ref, rel=1e-3)

    def test_low_snr_limit(self):
        assert single_hop_avg_ber(SYM, 1e-8, BPSK) == pytest.approx(0.5, rel=1e-4)

    @settings(max_examples=8, deadline=None)
    @given(gdb=st.floats(0, 35))
    def test_bpsk_below_dpsk(self, gdb):
        hop = HopParams(2, 3, 2.0437)
        assert single_hop_avg_ber(hop, db(gdb), BPSK) < single_hop_avg_ber(hop, db(gdb), DPSK)

    def test_fox_instance_against_ber_quadrature(self):
        # H^{2,2}_{3,3} instance with qγ̄ = 10, unit constants
        hop = HopParams(2, 3, 2.0437)
        f = lambda v: (np.exp(0.5 * v - np.exp(v)) * hop_snr_cdf(hop, 10.0, np.exp(v))
                       / (2 * sp.gamma(0.5)))
        ref = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
                  for a, b in [(-80, -10), (-10, 0), (0, 2), (2, 4.5)])
        assert single_hop_avg_ber(hop, 10.0, BPSK) == pytest.approx(ref, rel=1e-8)
