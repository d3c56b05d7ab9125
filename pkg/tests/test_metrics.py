import numpy as np
import pytest

from thzrelay import mc_oracle
from thzrelay.channel import BPSK, DPSK, HopParams, Modulation
from thzrelay.e2e_stats import DualHopConfig, asymptotic_terms, e2e_cdf
from thzrelay.metrics import (acc_exact, acc_quadrature, avg_ber_asymptotic, avg_ber_exact,
                              avg_ber_quadrature, ber_asymptotic_terms, ber_from_cdf_term,
                              diversity_order, outage_asymptotic, outage_exact)

from conftest import DOMINANCE_SETS, GAMMA_TH, SYM, db, hl

H40 = HopParams(2, 3, 2.0437, h_l=hl(40))
CFG40 = DualHopConfig(H40, H40, db(20), db(20), 1.7)


@pytest.mark.parametrize("h1, h2, expected", [
    (SYM, SYM, 1.0),
    (HopParams(1.2, 3, 1), HopParams(1.3, 2, 3.6333), 0.5),
    (HopParams(2, 3, 2.0437), HopParams(2, 3, 2.0437), 1.02185),
    *[(h1, h2, gd) for h1, h2, gd in DOMINANCE_SETS.values()],
])
def test_diversity_order(h1, h2, expected):
    assert diversity_order(DualHopConfig(h1, h2, 1.0, 1.0)) == pytest.approx(expected, rel=1e-12)


class TestOutage:
    def test_equals_cdf(self, asym_cfg):
        assert outage_exact(asym_cfg, GAMMA_TH) == e2e_cdf(asym_cfg, GAMMA_TH)

    def test_default_threshold(self, sym_cfg):
        assert outage_exact(sym_cfg) == pytest.approx(outage_exact(sym_cfg, GAMMA_TH), rel=1e-14)

    def test_negative_threshold(self, sym_cfg):
        with pytest.raises(ValueError):
            outage_exact(sym_cfg, -1.0)

    @pytest.mark.parametrize("C", [0.5, 1.7, 5.0])
    def test_increases_with_c(self, C):
        a = outage_exact(DualHopConfig(SYM, SYM, 10.0, 10.0, C), GAMMA_TH)
        b = outage_exact(DualHopConfig(SYM, SYM, 10.0, 10.0, 1.5 * C), GAMMA_TH)
        assert b > a

    def test_decreases_with_snr(self, asym_cfg):
        v = [outage_exact(asym_cfg.with_gamma_bar(db(x)), GAMMA_TH) for x in (0, 10, 20, 30)]
        assert np.all(np.diff(v) < 0)

    def test_asymptotic_matches_at_high_snr(self):
        h1, h2, _ = DOMINANCE_SETS["phi2"]
        cfg = DualHopConfig(h1, h2, db(45), db(45))
        assert outage_asymptotic(cfg, GAMMA_TH) == pytest.approx(outage_exact(cfg, GAMMA_TH),
                                                                 rel=1e-3)


class TestBer:
    @pytest.mark.parametrize("mod", [BPSK, DPSK], ids=["bpsk", "dpsk"])
    def test_exact_vs_quadrature(self, mod):
        a, b = avg_ber_exact(CFG40, mod), avg_ber_quadrature(CFG40, mod)
        assert a == pytest.approx(b, rel=1e-6)

    def test_exact_vs_mc(self):
        e = mc_oracle.estimate_ber(CFG40, BPSK, 41, 4 * 10**6)
        assert e.agrees_with(avg_ber_exact(CFG40, BPSK))

    def test_dpsk_worse_than_bpsk(self):
        assert avg_ber_exact(CFG40, DPSK) > avg_ber_exact(CFG40, BPSK)

    @pytest.mark.parametrize("p, q", [(0.5, 0.5), (1.0, 0.5), (0.5, 2.0)])
    def test_general_modulation(self, p, q):
        mod = Modulation(p, q)
        assert avg_ber_exact(CFG40, mod) == pytest.approx(avg_ber_quadrature(CFG40, mod),
                                                          rel=1e-6)

    def test_bounded(self):
        for x in (-10, 0, 10):
            v = avg_ber_exact(CFG40.with_gamma_bar(db(x)))
            assert 0 < v < 0.5

    def test_asymptotic_at_high_snr(self):
        h1, h2, _ = DOMINANCE_SETS["phi2"]
        cfg = DualHopConfig(h1, h2, db(45), db(45))
        assert avg_ber_asymptotic(cfg) == pytest.approx(avg_ber_exact(cfg), rel=1e-3)

    @pytest.mark.parametrize("mod", [BPSK, DPSK], ids=["bpsk", "dpsk"])
    def test_asymptotic_terms_are_cdf_terms(self, mod):
        # the transcribed BER terms equal the CDF terms pushed through the BER integral
        h1, h2, _ = DOMINANCE_SETS["alpha2mu2"]
        cfg = DualHopConfig(h1, h2, db(30), db(30))
        bt = {t.label: t for t in ber_asymptotic_terms(cfg, mod)}
        for ct in asymptotic_terms(cfg):
            ref = ber_from_cdf_term(ct, mod)
            got = bt[ct.label]
            assert got.coefficient == pytest.approx(ref.coefficient, rel=1e-12)
            assert (got.gbar1_exponent, got.gbar2_exponent) == pytest.approx(
                (ref.gbar1_exponent, ref.gbar2_exponent))

    def test_ber_slope(self):
        h1, h2, gd = DOMINANCE_SETS["alpha2mu2"]
        v = [avg_ber_exact(DualHopConfig(h1, h2, db(x), db(x))) for x in (40, 50)]
        assert np.log10(v[1] / v[0]) == pytest.approx(-gd, abs=0.05)


class TestAcc:
    def test_exact_vs_quadrature(self):
        cfg = DualHopConfig(H40, H40, db(20), db(20), 1.7)
        assert acc_exact(cfg) == pytest.approx(acc_quadrature(cfg), rel=1e-6)

    def test_exact_vs_mc(self, asym_cfg):
        e = mc_oracle.estimate_capacity(asym_cfg, 42, 4 * 10**6)
        assert e.agrees_with(acc_exact(asym_cfg))

    def test_increases_with_snr(self):
        v = [acc_exact(CFG40.with_gamma_bar(db(x))) for x in (0, 10, 20, 30)]
        assert np.all(np.diff(v) > 0)

    @pytest.mark.parametrize("d", [40, 80, 120])
    def test_decreases_with_distance(self, d):
        def acc(dist):
            h = HopParams(2, 3, 2.0437, h_l=hl(dist))
            return acc_exact(DualHopConfig(h, h, db(20), db(20), 1.7))
        assert acc(d * 1.25) < acc(d)

    def test_jensen_bound(self, asym_cfg):
        # E[½log2(1+γ)] ≤ ½log2(1+E[γ])
        x = mc_oracle.sample_e2e_snr(asym_cfg, 43, 10**6)
        assert acc_exact(asym_cfg) <= 0.5 * np.log2(1 + x.mean()) + 1e-3
