"""System metrics: outage, diversity order, average BER and average capacity."""

import warnings
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy import special as sp

from . import channel, e2e_stats
from .channel import BPSK, Modulation
from .e2e_stats import BfhfTerm, DualHopConfig, _check, _upper_log_limit
from .specfun import BivFoxHParams, ContourSpec, FoxHParams, JointPair

GAMMA_TH_DEFAULT = 10 ** 0.2  # 2 dB


def outage_exact(cfg: DualHopConfig, gamma_th: float = GAMMA_TH_DEFAULT,
                 contour: Optional[ContourSpec] = None) -> float:
    """P[γ_o < γ_th] from the exact end-to-end CDF."""
    if gamma_th < 0:
        raise ValueError("gamma_th must be non-negative")
    return float(e2e_stats.e2e_cdf(cfg, gamma_th, contour))


def outage_asymptotic(cfg: DualHopConfig, gamma_th: float = GAMMA_TH_DEFAULT,
                      variant="derived") -> float:
    return e2e_stats.e2e_cdf_asymptotic(cfg, gamma_th, variant).value


def diversity_order(cfg: DualHopConfig) -> float:
    """min(φ1/2, α1μ1/2, φ2, α2μ2)."""
    h1, h2 = cfg.hop1, cfg.hop2
    return float(min(h1.phi / 2, h1.alpha * h1.mu / 2, h2.phi, h2.alpha * h2.mu))


# -- average BER --------------------------------------------------------------

def ber_coupling_bfhf(cfg: DualHopConfig, mod: Modulation = BPSK) -> BfhfTerm:
    """Bivariate Fox H form of the coupling contribution to the average BER."""
    h1, h2 = cfg.hop1, cfg.hop2
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    c1, c2 = channel.hop_coefficients(h1), channel.hop_coefficients(h2)
    p, q = mod.p, mod.q
    params = BivFoxHParams(
        1, [JointPair(1 + p1 / 2 - p2 / 2, -a2 / 2, a1 / 2)],
        FoxHParams(1, 3, [(1, 1), (1 - m2 + p2 / a2, 1), (p2 / 2, a2 / 2), (1 + p2 / a2, 1)],
                   [(p2 / a2, 1), (0, 1)]),
        FoxHParams(1, 2, [(1, 1), (1 - m1 + p1 / a1, 1)],
                   [(p1 / 2 + p, a1 / 2), (0, 1), (p1 / 2, a1 / 2)]))
    x = cfg.gamma_bar2 ** (a2 / 2) / (c2.B * cfg.C ** (a2 / 2))
    y = (q * cfg.gamma_bar1) ** (a1 / 2) / c1.B
    pref = (c1.A * c2.A * cfg.gamma_bar1 ** (-p1 / 2) * cfg.gamma_bar2 ** (-p2 / 2)
            * cfg.C ** (p2 / 2) * q ** (-p1 / 2) / (a2 * sp.gamma(p)))
    return BfhfTerm(pref, params, x, y)


def avg_ber_exact(cfg: DualHopConfig, mod: Modulation = BPSK,
                  contour: Optional[ContourSpec] = None) -> float:
    """Average BER: single-hop Fox H term plus the bivariate Fox H coupling term."""
    first = channel.single_hop_avg_ber(cfg.hop1, cfg.gamma_bar1, mod, contour)
    second = ber_coupling_bfhf(cfg, mod).evaluate(contour)
    return float(min(max(first + second, 0.0), 0.5))


def avg_ber_quadrature(cfg: DualHopConfig, mod: Modulation = BPSK,
                       cdf: Optional[Callable[[float], float]] = None) -> float:
    """Oracle: (q^p / 2Γ(p)) ∫ γ^{p-1} e^{-qγ} F(γ) dγ by quadrature in log γ.

    `cdf` defaults to :func:`e2e_stats.e2e_cdf_quadrature`; any callable of
    one scalar may be supplied instead.
    """
    if cdf is None:
        def cdf(g):
            return e2e_stats.e2e_cdf_quadrature(cfg, g)
    p, q = mod.p, mod.q
    norm = q**p / (2 * sp.gamma(p))

    def f(v):
        g = np.exp(v)
        return norm * np.exp(p * v - q * g) * cdf(g)

    # below this point (qγ)^p < 1e-16
    lo = (np.log(1e-16) / p) - np.log(q)
    hi = np.log(1.0 / q)
    total = _quad_pieces(f, lo, hi, 8, epsabs=1e-11, epsrel=1e-9)
    # extend until the e^{-qγ} weight makes the next piece negligible
    while True:
        nxt = hi + np.log(2.0)
        piece = _quad_pieces(f, hi, nxt, 1, epsabs=1e-11, epsrel=1e-9)
        total += piece
        hi = nxt
        if q * np.exp(hi) > 30 and abs(piece) <= 1e-12 * abs(total):
            break
        if hi > np.log(1e4 / q):
            break
    return float(total)


def _quad_pieces(f, lo, hi, n, epsabs=1e-15, epsrel=1e-11):
    edges = np.linspace(lo, hi, n + 1)
    return sum(integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)[0]
               for a, b in zip(edges[:-1], edges[1:]))


def ber_asymptotic_terms(cfg: DualHopConfig, mod: Modulation = BPSK, variant="derived"):
    """High-SNR average BER terms, transcribed term by term.

    Each entry is an :class:`e2e_stats.AsymptoticTerm` with the γ exponent
    set to zero (the modulation constants are absorbed in the coefficient).
    ``variant="literal"`` keeps the printed form of terms 4 and 5.
    """
    if variant not in ("derived", "literal"):
        raise ValueError("variant must be 'derived' or 'literal'")
    h1, h2 = cfg.hop1, cfg.hop2
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    c1, c2 = channel.hop_coefficients(h1), channel.hop_coefficients(h2)
    A1, B1, A2, B2 = c1.A, c1.B, c2.A, c2.B
    p, q = mod.p, mod.q
    am1, am2 = a1 * m1, a2 * m2
    G = sp.gamma
    C = cfg.C
    Term = e2e_stats.AsymptoticTerm
    out = []

    _check([((am1 - p1) / a1, ("phi1", "alpha1*mu1"))])
    out.append(Term(A1 * G((am1 - p1) / a1) * G(p1 / a1) * G(p + p1 / 2)
                    / (a1 * G(1 + p1 / a1) * G(p)) * q ** (-p1 / 2), 0.0, p1 / 2, 0.0, "T1"))
    out.append(Term(A1 * B1 ** ((am1 - p1) / a1) * G(-(am1 - p1) / a1) * G(p + am1 / 2)
                    / (am1 * G(1 - (am1 - p1) / a1) * G(p)) * q ** (-am1 / 2),
                    0.0, am1 / 2, 0.0, "T2"))

    _check([((am2 - p2) / a2, ("phi2", "alpha2*mu2")), ((p1 - p2) / a1, ("phi1", "phi2")),
            (m1 - p2 / a1, ("alpha1*mu1", "phi2"))])
    out.append(Term(2 * A1 * A2 * B1 ** ((p2 - p1) / a1) * G((am2 - p2) / a2) * G((p1 - p2) / a1)
                    * G(m1 - p2 / a1) * G(p2 / a2) * G(p + p2 / 2)
                    / (a1 * a2 * G(1 - (p2 - p1) / a1) * G(1 + p2 / a2) * G(p))
                    * (C / q) ** (p2 / 2), 0.0, p2 / 2, p2 / 2, "T3"))

    g4 = (p1 - am2) / a1 if variant == "derived" else (p1 - am2) / a2
    _check([(-(am2 - p2) / a2, ("phi2", "alpha2*mu2")), (g4, ("phi1", "alpha2*mu2")),
            (m1 - am2 / a1, ("alpha1*mu1", "alpha2*mu2"))])
    out.append(Term(2 * A1 * A2 * B1 ** ((am2 - p1) / a1) * B2 ** ((am2 - p2) / a2)
                    * G(-(am2 - p2) / a2) * G(g4) * G(m1 - am2 / a1) * G(m2) * G(p + am2 / 2)
                    / (a1 * a2 * G(1 - (am2 - p2) / a2) * G(1 + p1 / a1 - am2 / a1) * G(1 + m2)
                       * G(p)) * (C / q) ** (am2 / 2), 0.0, am2 / 2, am2 / 2, "T4"))

    _check([(-(p1 - p2) / a2, ("phi1", "phi2")), (m2 - p1 / a2, ("phi1", "alpha2*mu2")),
            (m1 - p1 / a1, ("phi1", "alpha1*mu1"))])
    t5 = (2 * A1 * A2 * B2 ** ((p1 - p2) / a2) * G(-(p1 - p2) / a2) * G(m2 - p1 / a2)
          * G(m1 - p1 / a1) * G(p1 / a2) * G(p + p1 / 2)
          / (a2**2 * G(1 - (p1 - p2) / a2) * G(1 + p1 / a2) * G(p)))
    if variant == "literal":
        t5 /= G(1 - (p2 - p1) / a1 - (p1 - p2) / a2)
    out.append(Term(t5 * (C / q) ** (p1 / 2), 0.0, p1 / 2, p1 / 2, "T5"))

    _check([(-(am1 - p2) / a2, ("alpha1*mu1", "phi2")), (m2 - am1 / a2, ("alpha1*mu1", "alpha2*mu2")),
            (p1 / a1 - m1, ("phi1", "alpha1*mu1"))])
    out.append(Term(2 * A1 * A2 * B1 ** ((am1 - p1) / a1) * B2 ** ((am1 - p2) / a2)
                    * G(-(am1 - p2) / a2) * G(m2 - am1 / a2) * G(p1 / a1 - m1) * G(am1 / a2)
                    * G(p + am1 / 2)
                    / (a2**2 * G(1 - (am1 - p2) / a2) * G(1 + p1 / a1 - m1) * G(1 + am1 / a2) * G(p))
                    * (C / q) ** (am1 / 2), 0.0, am1 / 2, am1 / 2, "T6"))
    return tuple(out)


def avg_ber_asymptotic(cfg: DualHopConfig, mod: Modulation = BPSK, variant="derived") -> float:
    """Six-term high-SNR average BER."""
    return float(sum(t(1.0, cfg.gamma_bar1, cfg.gamma_bar2)
                     for t in ber_asymptotic_terms(cfg, mod, variant)))


def ber_from_cdf_term(term, mod: Modulation = BPSK):
    """Push one CDF power term c·γ^e through the BER integral (a pure gamma integral)."""
    e = term.gamma_exponent
    coef = term.coefficient * sp.gamma(mod.p + e) / (2 * sp.gamma(mod.p) * mod.q**e)
    return e2e_stats.AsymptoticTerm(coef, 0.0, term.gbar1_exponent, term.gbar2_exponent, term.label)


# -- average capacity -----------------------------------------------------------

def acc_bfhf(cfg: DualHopConfig) -> BfhfTerm:
    """Bivariate Fox H form of the average capacity (bits/s/Hz, with the 1/2 pre-log)."""
    h1, h2 = cfg.hop1, cfg.hop2
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    c1, c2 = channel.hop_coefficients(h1), channel.hop_coefficients(h2)
    params = BivFoxHParams(
        1, [JointPair(1 + p1 / 2 - p2 / 2, -a2 / 2, a1 / 2)],
        FoxHParams(0, 3, [(1, 1), (1 - m2 + p2 / a2, 1), (1 + p2 / 2, a2 / 2)], [(0, 1)]),
        FoxHParams(1, 3, [(1, 1), (1 - m1 + p1 / a1, 1), (1 + p1 / 2, a1 / 2)],
                   [(1 + p1 / 2, a1 / 2), (0, 1), (p1 / 2, a1 / 2)]))
    x = cfg.gamma_bar2 ** (a2 / 2) / (c2.B * cfg.C ** (a2 / 2))
    y = cfg.gamma_bar1 ** (a1 / 2) / c1.B
    pref = (c1.A * c2.A * cfg.gamma_bar1 ** (-p1 / 2) * cfg.gamma_bar2 ** (-p2 / 2)
            * cfg.C ** (p2 / 2) / (2 * np.log(2)))
    return BfhfTerm(pref, params, x, y)


def acc_exact(cfg: DualHopConfig, contour: Optional[ContourSpec] = None) -> float:
    """Average channel capacity in bits/s/Hz."""
    return float(max(acc_bfhf(cfg).evaluate(contour), 0.0))


def acc_quadrature(cfg: DualHopConfig, pdf: Optional[Callable[[float], float]] = None) -> float:
    """Oracle: (1 / 2 ln 2) ∫ ln(1+γ) f(γ) dγ by quadrature in log γ.

    `pdf` defaults to :func:`e2e_stats.e2e_pdf_quadrature`.  If that
    integral fails to converge, falls back to integration by parts,
    (1 / 2 ln 2) ∫ (1 - F(γ)) / (1 + γ) dγ, with the quadrature CDF.
    """
    hi = _upper_log_limit(cfg.hop1, cfg.gamma_bar1)
    lo = -40.0
    if pdf is None:
        def pdf(g):
            return e2e_stats.e2e_pdf_quadrature(cfg, g)

    def f(v):
        g = np.exp(v)
        return np.log1p(g) * pdf(g) * g

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val = _quad_pieces(f, lo, hi, 6, epsabs=0.0, epsrel=1e-8)
            if np.isfinite(val):
                return float(val / (2 * np.log(2)))
        except integrate.IntegrationWarning:
            pass

    def tail(v):
        g = np.exp(v)
        return (1.0 - e2e_stats.e2e_cdf_quadrature(cfg, g)) * g / (1 + g)

    return float(_quad_pieces(tail, lo, hi, 6, epsabs=0.0, epsrel=1e-8) / (2 * np.log(2)))
