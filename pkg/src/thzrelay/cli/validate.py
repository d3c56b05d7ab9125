"""Oracle-agreement suite for one scenario: closed form vs quadrature vs Monte Carlo."""

import contextlib
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy import stats

from .. import channel, e2e_stats, mc_oracle, metrics, multirelay
from ..multirelay import MultiRelayConfig
from .config import Scenario

DEFAULT_SAMPLES = 4_000_000
SLOPE_DB = (35.0, 40.0, 45.0, 50.0)
SER_SLOPE_DB = (40.0, 45.0, 50.0, 55.0)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    delta: float
    tolerance: float
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{self.name}\t{flag}\tdelta={self.delta:.6e}\ttol={self.tolerance:.3e}\t{self.detail}"


def _rel(a, b):
    return abs(a - b) / abs(b)


@contextlib.contextmanager
def coefficient_scale(factor: float):
    """Test hook: multiply every hop's A coefficient by `factor` while active.

    The Monte-Carlo sampler never reads these coefficients, so a corrupted
    A shows up as a closed-form vs Monte-Carlo mismatch.
    """
    if factor == 1.0:
        yield
        return
    orig = channel.hop_coefficients

    def scaled(hop):
        c = orig(hop)
        return channel.HopCoefficients(c.A * factor, c.B)

    channel.hop_coefficients = scaled
    try:
        yield
    finally:
        channel.hop_coefficients = orig


def _fit_slope(db, values):
    return float(np.polyfit(np.asarray(db) / 10.0, np.log10(values), 1)[0])


def _checks(sc: Scenario, seed: int, n: int) -> List[Callable[[], Check]]:
    cfg = sc.dual_hop()
    mod = sc.modulation
    g_th = sc.gamma_th

    def hop_ks():
        x = mc_oracle.sample_hop_snr(cfg.hop1, cfg.gamma_bar1, seed, min(n, 10**6))
        d = stats.kstest(x, lambda g: channel.hop_snr_cdf(cfg.hop1, cfg.gamma_bar1, g)).statistic
        tol = max(0.002, 1.95 / np.sqrt(x.size))
        return Check("hop_sampler_ks", d < tol, d, tol, f"n={x.size}")

    def cdf_quad():
        a, b = e2e_stats.e2e_cdf(cfg, g_th), e2e_stats.e2e_cdf_quadrature(cfg, g_th)
        return Check("op_exact_vs_quadrature", _rel(a, b) <= 1e-3, _rel(a, b), 1e-3)

    def cdf_mc():
        a = metrics.outage_exact(cfg, g_th)
        e = mc_oracle.estimate_outage(cfg, g_th, seed, n)
        d = abs(a - e.value)
        return Check("op_exact_vs_mc", d <= 3e-3, d, 3e-3, f"mc={e.value:.6f}")

    def slope():
        vals = [metrics.outage_exact(cfg.with_gamma_bar(10 ** (x / 10)), g_th) for x in SLOPE_DB]
        s = _fit_slope(SLOPE_DB, vals)
        gd = metrics.diversity_order(cfg)
        return Check("op_slope_vs_diversity", abs(s + gd) <= 0.05, abs(s + gd), 0.05,
                     f"slope={s:.4f} G_d={gd:.4f}")

    def ber_quad():
        a, b = metrics.avg_ber_exact(cfg, mod), metrics.avg_ber_quadrature(cfg, mod)
        return Check("ber_exact_vs_quadrature", _rel(a, b) <= 1e-3, _rel(a, b), 1e-3)

    def ber_mc():
        a = metrics.avg_ber_exact(cfg, mod)
        e = mc_oracle.estimate_ber(cfg, mod, seed, n)
        z = abs(a - e.value) / e.std_error
        return Check("ber_exact_vs_mc", z <= 3, z, 3.0, "delta in standard errors")

    def acc_quad():
        a, b = metrics.acc_exact(cfg), metrics.acc_quadrature(cfg)
        return Check("acc_exact_vs_quadrature", _rel(a, b) <= 1e-3, _rel(a, b), 1e-3)

    def acc_mc():
        a = metrics.acc_exact(cfg)
        e = mc_oracle.estimate_capacity(cfg, seed, n)
        z = abs(a - e.value) / e.std_error
        return Check("acc_exact_vs_mc", z <= 3, z, 3.0, "delta in standard errors")

    out = [hop_ks, cdf_quad, cdf_mc, slope, ber_quad, ber_mc, acc_quad, acc_mc]
    if sc.K >= 2:
        out += _multirelay_checks(sc, seed, n)
    return out


def _multirelay_checks(sc: Scenario, seed, n):
    base = sc.dual_hop()

    def mr(scheme, db=None):
        b = base if db is None else base.with_gamma_bar(10 ** (db / 10))
        return MultiRelayConfig(b, sc.K, scheme)

    def ratio():
        m = mr("ARP")
        r = multirelay.brs_ser_asymptotic(m) / multirelay.arp_ser_asymptotic(m)
        d = _rel(multirelay.ser_ratio(m), r)
        return Check("ser_ratio_identity", d <= 1e-12, d, 1e-12)

    def slope(scheme):
        def run():
            vals = [mc_oracle.estimate_multirelay_ser(mr(scheme, x), seed, n).value
                    for x in SER_SLOPE_DB]
            s = _fit_slope(SER_SLOPE_DB, vals)
            target = sc.K * multirelay.dominant_term(mr(scheme)).G_d
            return Check(f"mc_ser_slope_{scheme.lower()}", abs(s + target) <= 0.1,
                         abs(s + target), 0.1, f"slope={s:.4f} K*G_d={target:.4f}")
        return run

    def order():
        a = mc_oracle.estimate_multirelay_ser(mr("ARP", 40.0), seed, n)
        b = mc_oracle.estimate_multirelay_ser(mr("BRS", 40.0), seed, n)
        return Check("mc_ser_brs_below_arp", b.value < a.value, a.value - b.value, 0.0,
                     f"arp={a.value:.6e} brs={b.value:.6e}")

    return [ratio, slope("ARP"), slope("BRS"), order]


def run_validate(sc: Scenario, seed: int = 0, n: int = DEFAULT_SAMPLES,
                 corrupt_coefficient: float = 1.0) -> List[Check]:
    """Run every agreement check; failures and exceptions become report lines."""
    out = []
    with coefficient_scale(corrupt_coefficient):
        for fn in _checks(sc, seed, n):
            try:
                out.append(fn())
            except Exception as exc:  # a crashing check is a failed check
                name = getattr(fn, "__name__", "check")
                out.append(Check(name, False, float("nan"), float("nan"),
                                 f"{type(exc).__name__}: {exc}"))
    return out


def format_report(checks: List[Check], sc: Optional[Scenario] = None, seed=None, n=None) -> str:
    lines = []
    if sc is not None:
        lines.append(f"# scenario gamma_bar_db={sc.gamma_bar_db} gamma_th_db={sc.gamma_th_db} "
                     f"C={sc.C} K={sc.K} seed={seed} samples={n}")
    lines += [c.line() for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"# {len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
