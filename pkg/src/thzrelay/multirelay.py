"""High-SNR symbol error rate of K-relay cooperative schemes.

ARP combines all K branches with maximum ratio combining at power 1/(2K)
per node; BRS picks the best branch at power 1/2 per node.  Both are built
on the dominant power term F ≈ D·γ^v / γ̄^{G_d} of the single-relay CDF.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate
from scipy import special as sp

from . import e2e_stats
from .e2e_stats import DualHopConfig
from .metrics import diversity_order

SCHEMES = ("ARP", "BRS")


class DominantTermTieError(ValueError):
    """Two high-SNR terms share the smallest γ̄ exponent but differ in γ exponent."""


@dataclass(frozen=True)
class MultiRelayConfig:
    """K identical relay branches at a common average SNR."""

    base: DualHopConfig
    K: int = 1
    scheme: str = "ARP"
    M: int = 2

    def __post_init__(self):
        if not np.isclose(self.base.gamma_bar1, self.base.gamma_bar2, rtol=1e-12, atol=0):
            raise ValueError("multi-relay analysis needs equal per-hop average SNRs")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.M < 2:
            raise ValueError("M must be at least 2")

    @property
    def gamma_bar(self):
        return self.base.gamma_bar1


@dataclass(frozen=True)
class DominantTerm:
    """F(γ) ≈ D·γ^v / γ̄^G_d.

    `diagnostic` is non-empty when v differs from min(φ1/2, α1μ1/2, φ2/2, α2μ2/2).
    """

    D: float
    v: float
    G_d: float
    labels: tuple = ()
    diagnostic: str = ""


def dominant_term(cfg: Union[MultiRelayConfig, DualHopConfig], tol=1e-9) -> DominantTerm:
    """The CDF term with the smallest total γ̄ exponent (γ̄1 = γ̄2).

    Equal γ̄ exponents with equal γ exponents are merged by summing their
    coefficients; a tie with distinct γ exponents raises
    :class:`DominantTermTieError`.  Only the selected coefficients are
    computed, so collisions confined to sub-dominant terms do not matter.
    """
    base = cfg.base if isinstance(cfg, MultiRelayConfig) else cfg
    exps = e2e_stats.term_exponents(base)
    g_min = min(e1 + e2 for _, _, e1, e2 in exps)
    chosen = [(lab, e) for lab, e, e1, e2 in exps if abs(e1 + e2 - g_min) <= tol]
    vs = {round(e, 9) for _, e in chosen}
    if len(vs) > 1:
        raise DominantTermTieError(
            "terms " + ", ".join(lab for lab, _ in chosen)
            + f" share the smallest average-SNR exponent {g_min:g} with different SNR exponents")
    labels = tuple(lab for lab, _ in chosen)
    terms = e2e_stats.asymptotic_terms(base, labels=labels)
    D = float(sum(t.coefficient for t in terms))
    v = chosen[0][1]
    h1, h2 = base.hop1, base.hop2
    v_min = min(h1.phi, h1.alpha * h1.mu, h2.phi, h2.alpha * h2.mu) / 2
    diag = ""
    if abs(v - v_min) > tol:
        diag = (f"dominant term {'+'.join(labels)} has SNR exponent v = {v:g}, while the "
                f"smallest half-exponent is {v_min:g}; using the dominant term")
    g_d = diversity_order(base)
    if abs(g_d - g_min) > tol:
        diag += f"; dominant average-SNR exponent {g_min:g} differs from diversity order {g_d:g}"
    return DominantTerm(D, v, g_min, labels, diag)


def mgf_asymptotic(dom: DominantTerm, gamma_bar, s):
    """High-SNR MGF of a single branch, D Γ(v+1) s^{-v} / γ̄^{G_d}."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("s must be positive")
    out = dom.D * sp.gamma(dom.v + 1) * s ** (-dom.v) / gamma_bar**dom.G_d
    return out[()] if out.ndim == 0 else out


def scheme_mgf(dom: DominantTerm, gamma_bar, K, scheme, s):
    """High-SNR MGF of the combined SNR for ARP or BRS."""
    if scheme == "ARP":
        return mgf_asymptotic(dom, gamma_bar, np.asarray(s) / (2 * K)) ** K
    if scheme == "BRS":
        Kv = K * dom.v
        return (dom.D**K * 2**Kv * sp.gamma(Kv + 1) * np.asarray(s, dtype=float) ** (-Kv)
                / gamma_bar ** (K * dom.G_d))
    raise ValueError(f"unknown scheme {scheme!r}")


def arp_ser_asymptotic(cfg: MultiRelayConfig, dom: DominantTerm = None) -> float:
    """High-SNR BPSK SER of all-relay participation."""
    dom = dom or dominant_term(cfg)
    K, v = cfg.K, dom.v
    Kv = K * v
    return float(dom.D**K * sp.gamma(v + 1) ** K * sp.gamma(Kv + 0.5) * (2 * K) ** Kv
                 / (2 * np.sqrt(np.pi) * cfg.gamma_bar ** (K * dom.G_d) * sp.gamma(Kv + 1)))


def brs_ser_asymptotic(cfg: MultiRelayConfig, dom: DominantTerm = None) -> float:
    """High-SNR BPSK SER of best-relay selection."""
    dom = dom or dominant_term(cfg)
    Kv = cfg.K * dom.v
    return float(dom.D**cfg.K * sp.gamma(Kv + 0.5) * 2**Kv
                 / (2 * np.sqrt(np.pi) * cfg.gamma_bar ** (cfg.K * dom.G_d)))


def ser_ratio_kv(K: int, v: float) -> float:
    """BRS-to-ARP SER ratio Γ(Kv+1) / Γ(v+1)^K · K^{-Kv}, evaluated in log space."""
    if K == 1:
        return 1.0
    return float(np.exp(sp.gammaln(K * v + 1) - K * sp.gammaln(v + 1) - K * v * np.log(K)))


def ser_ratio(cfg: MultiRelayConfig) -> float:
    return ser_ratio_kv(cfg.K, dominant_term(cfg).v)


def mpsk_ser_from_mgf(dom: DominantTerm, gamma_bar, K: int, scheme: str, M: int = 2) -> float:
    """M-PSK SER, (1/π) ∫_0^{π - π/M} MGF(sin²(π/M) / sin²θ) dθ, by adaptive quadrature."""
    if M < 2:
        raise ValueError("M must be at least 2")
    g = np.sin(np.pi / M) ** 2

    def f(theta):
        st = np.sin(theta)
        if st == 0:
            return 0.0
        return scheme_mgf(dom, gamma_bar, K, scheme, g / st**2)

    val, _ = integrate.quad(f, 0.0, np.pi - np.pi / M, epsabs=0, epsrel=1e-12, limit=200)
    return float(val / np.pi)
