"""End-to-end SNR statistics of a dual-hop fixed-gain amplify-and-forward link.

The end-to-end SNR is γ_o = γ1·γ2/(γ2 + C).  Its CDF splits into the hop-1
CDF plus a coupling integral I1 = ∫ F2(Cγ/x) f1(x + γ) dx, which has a
closed form as a bivariate Fox H function.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import integrate
from scipy import special as sp

from . import channel
from .channel import DegenerateExponentError, HopParams
from .specfun import BivFoxHParams, ContourSpec, FoxHParams, JointPair, bivariate_fox_h, meijer_g


@dataclass(frozen=True)
class DualHopConfig:
    """Two hops, their average SNRs (linear) and the fixed relay gain constant `C`."""

    hop1: HopParams
    hop2: HopParams
    gamma_bar1: float
    gamma_bar2: float
    C: float = 1.7

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("relay gain constant C must be positive")
        if not (self.gamma_bar1 > 0 and self.gamma_bar2 > 0):
            raise ValueError("average SNRs must be positive")

    def with_gamma_bar(self, gamma_bar):
        """Copy with both hops at the same average SNR."""
        return replace(self, gamma_bar1=gamma_bar, gamma_bar2=gamma_bar)


@dataclass(frozen=True)
class BfhfTerm:
    """prefactor · H[x, y] for a bivariate Fox H representation."""

    prefactor: float
    params: BivFoxHParams
    x: float
    y: float

    def evaluate(self, contour: Optional[ContourSpec] = None):
        return self.prefactor * bivariate_fox_h(self.params, self.x, self.y, contour)


@dataclass(frozen=True)
class AsymptoticTerm:
    """coefficient · γ^gamma_exponent / (γ̄1^gbar1_exponent · γ̄2^gbar2_exponent)."""

    coefficient: float
    gamma_exponent: float
    gbar1_exponent: float
    gbar2_exponent: float
    label: str = ""

    def __call__(self, gamma, gamma_bar1, gamma_bar2):
        return (self.coefficient * np.asarray(gamma, dtype=float) ** self.gamma_exponent
                / (gamma_bar1**self.gbar1_exponent * gamma_bar2**self.gbar2_exponent))

    @property
    def gbar_exponent(self):
        return self.gbar1_exponent + self.gbar2_exponent


@dataclass(frozen=True)
class AsymptoticCdf:
    value: float
    terms: tuple
    variant: str = "derived"
    perturbed: bool = False


def _scalar_map(fn, gamma):
    g = np.asarray(gamma, dtype=float)
    out = np.array([fn(float(v)) for v in g.ravel()]).reshape(g.shape)
    return out[()] if out.ndim == 0 else out


# -- exact closed forms -----------------------------------------------------

def _common(cfg):
    h1, h2 = cfg.hop1, cfg.hop2
    c1, c2 = channel.hop_coefficients(h1), channel.hop_coefficients(h2)
    x = cfg.gamma_bar2 ** (h2.alpha / 2) / (c2.B * cfg.C ** (h2.alpha / 2))
    base = (c1.A * c2.A * cfg.gamma_bar1 ** (-h1.phi / 2) * cfg.gamma_bar2 ** (-h2.phi / 2)
            * cfg.C ** (h2.phi / 2))
    joint = [JointPair(1 + h1.phi / 2 - h2.phi / 2, -h2.alpha / 2, h1.alpha / 2)]
    return h1, h2, c1, c2, x, base, joint


def cdf_coupling_bfhf(cfg: DualHopConfig, gamma: float) -> BfhfTerm:
    """Bivariate Fox H representation of the coupling integral I1 at `gamma` > 0."""
    h1, h2, c1, c2, x, base, joint = _common(cfg)
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    inner_x = FoxHParams(1, 3, [(1, 1), (1 - m2 + p2 / a2, 1), (p2 / 2, a2 / 2), (1 + p2 / a2, 1)],
                         [(p2 / a2, 1), (0, 1)])
    inner_y = FoxHParams(0, 2, [(1, 1), (1 - m1 + p1 / a1, 1)], [(0, 1), (p1 / 2, a1 / 2)])
    y = cfg.gamma_bar1 ** (a1 / 2) / (c1.B * gamma ** (a1 / 2))
    pref = 2 * base * gamma ** (p1 / 2) / a2
    return BfhfTerm(pref, BivFoxHParams(1, joint, inner_x, inner_y), x, y)


def pdf_bfhf(cfg: DualHopConfig, gamma: float) -> BfhfTerm:
    """Bivariate Fox H representation of the end-to-end density at `gamma` > 0."""
    h1, h2, c1, c2, x, base, joint = _common(cfg)
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    inner_x = FoxHParams(0, 3, [(1, 1), (1 - m2 + p2 / a2, 1), (1 + p2 / 2, a2 / 2)], [(0, 1)])
    inner_y = FoxHParams(0, 2, [(1, 1), (1 - m1 + p1 / a1, 1)], [(0, 1), (1 + p1 / 2, a1 / 2)])
    y = cfg.gamma_bar1 ** (a1 / 2) / (c1.B * gamma ** (a1 / 2))
    pref = base * gamma ** (p1 / 2 - 1)
    return BfhfTerm(pref, BivFoxHParams(1, joint, inner_x, inner_y), x, y)


def coupling_integral(cfg: DualHopConfig, gamma: float, method="bfhf",
                      contour: Optional[ContourSpec] = None) -> float:
    """I1(γ) = ∫_0^∞ F2(Cγ/x) f1(x + γ) dx, the non-negative gap between e2e and hop-1 CDFs."""
    if gamma <= 0:
        return 0.0
    if method == "bfhf":
        return float(cdf_coupling_bfhf(cfg, gamma).evaluate(contour))
    if method == "quadrature":
        return _coupling_quadrature(cfg, gamma)
    raise ValueError(f"unknown method {method!r}")


def e2e_cdf(cfg: DualHopConfig, gamma, contour: Optional[ContourSpec] = None):
    """Exact end-to-end SNR CDF (hop-1 CDF plus the bivariate Fox H coupling term)."""
    def one(g):
        if g <= 0:
            return 0.0
        val = channel.hop_snr_cdf(cfg.hop1, cfg.gamma_bar1, g) + coupling_integral(cfg, g, "bfhf", contour)
        return float(min(max(val, 0.0), 1.0))
    return _scalar_map(one, gamma)


def e2e_pdf(cfg: DualHopConfig, gamma, contour: Optional[ContourSpec] = None):
    """Exact end-to-end SNR density via its bivariate Fox H form."""
    def one(g):
        if g <= 0:
            raise ValueError("e2e_pdf requires gamma > 0")
        return max(float(pdf_bfhf(cfg, g).evaluate(contour)), 0.0)
    return _scalar_map(one, gamma)


def _require_nakagami(cfg):
    if cfg.hop1.alpha != 2 or cfg.hop2.alpha != 2:
        raise ValueError("the Nakagami-m form requires alpha = 2 on both hops, got "
                         f"{cfg.hop1.alpha}, {cfg.hop2.alpha}")


def nakagami_constants(cfg: DualHopConfig):
    """(ζ1, ζ2, ζ3, ζ4): the hop constants A1, B1, A2, B2 at α = 2."""
    _require_nakagami(cfg)
    z = []
    for hop in (cfg.hop1, cfg.hop2):
        scale = hop.hf_hat * hop.h_l * hop.A_o
        z.append(hop.phi * hop.mu ** (hop.phi / 2) / (2 * scale**hop.phi * sp.gamma(hop.mu)))
        z.append(hop.mu / scale**2)
    return z[0], z[1], z[2], z[3]


def e2e_cdf_nakagami(cfg: DualHopConfig, gamma, contour: Optional[ContourSpec] = None):
    """End-to-end CDF when both hops are Nakagami-m (α1 = α2 = 2).

    Uses Meijer G for the hop-1 term and a bivariate Fox H with unit scales
    (up to sign) for the coupling term.
    """
    _require_nakagami(cfg)
    z1, z2, z3, z4 = nakagami_constants(cfg)
    m1, p1 = cfg.hop1.mu, cfg.hop1.phi
    m2, p2 = cfg.hop2.mu, cfg.hop2.phi
    G = FoxHParams(2, 1, [1 - p1 / 2, 1], [0, m1 - p1 / 2, -p1 / 2])
    params = BivFoxHParams(
        1, [JointPair(1 + p1 / 2 - p2 / 2, -1, 1)],
        FoxHParams(1, 3, [(1, 1), (1 - m2 + p2 / 2, 1), (p2 / 2, 1), (1 + p2 / 2, 1)],
                   [(p2 / 2, 1), (0, 1)]),
        FoxHParams(0, 2, [(1, 1), (1 - m1 + p1 / 2, 1)], [(0, 1), (p1 / 2, 1)]))
    x = cfg.gamma_bar2 / (z4 * cfg.C)

    def one(g):
        if g <= 0:
            return 0.0
        lead = z1 * cfg.gamma_bar1 ** (-p1 / 2) * g ** (p1 / 2)
        first = lead * meijer_g(G, z2 * g / cfg.gamma_bar1, contour)
        second = (lead * z3 * cfg.gamma_bar2 ** (-p2 / 2) * cfg.C ** (p2 / 2)
                  * bivariate_fox_h(params, x, cfg.gamma_bar1 / (z2 * g), contour))
        return float(min(max(first + second, 0.0), 1.0))
    return _scalar_map(one, gamma)


# -- quadrature oracles -------------------------------------------------------

def _upper_log_limit(hop, gamma_bar, offset=0.0):
    # f(x) carries exp(-B (x/γ̄)^{α/2}); beyond this point the exponent is < -750
    co = channel.hop_coefficients(hop)
    return np.log(gamma_bar * (750.0 / co.B) ** (2 / hop.alpha) + offset + 1.0)


def _log_quad(f, lo, hi, points, epsabs=1e-13, epsrel=1e-11):
    pts = sorted(p for p in points if lo < p < hi)
    edges = [lo] + pts + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=400)
        total += val
    return total


def _coupling_quadrature(cfg, gamma):
    h1, h2 = cfg.hop1, cfg.hop2
    Cg = cfg.C * gamma

    def f(u):
        xx = np.exp(u)
        return (channel.hop_snr_cdf(h2, cfg.gamma_bar2, Cg / xx)
                * channel.hop_snr_pdf(h1, cfg.gamma_bar1, xx + gamma) * xx)

    hi = _upper_log_limit(h1, cfg.gamma_bar1)
    lo = min(np.log(Cg), np.log(gamma), 0.0) - 40.0
    pts = [np.log(Cg), np.log(gamma), np.log(cfg.gamma_bar1), np.log(Cg / cfg.gamma_bar2)]
    pts += list(np.linspace(lo, hi, 12)[1:-1])
    return _log_quad(f, lo, hi, pts)


def e2e_cdf_quadrature(cfg: DualHopConfig, gamma):
    """Oracle: F(γ) = F1(γ) + ∫ F2(Cγ/x) f1(x + γ) dx by adaptive quadrature in log x."""
    def one(g):
        if g <= 0:
            return 0.0
        return float(channel.hop_snr_cdf(cfg.hop1, cfg.gamma_bar1, g) + _coupling_quadrature(cfg, g))
    return _scalar_map(one, gamma)


def e2e_pdf_quadrature(cfg: DualHopConfig, gamma):
    """Oracle: f(γ) = ∫ C(x+γ)/x² f2(Cγ/x) f1(x+γ) dx by adaptive quadrature in log x."""
    h1, h2 = cfg.hop1, cfg.hop2

    def one(g):
        if g <= 0:
            raise ValueError("e2e_pdf_quadrature requires gamma > 0")
        Cg = cfg.C * g

        def f(u):
            xx = np.exp(u)
            return (cfg.C * (xx + g) / xx * channel.hop_snr_pdf(h2, cfg.gamma_bar2, Cg / xx)
                    * channel.hop_snr_pdf(h1, cfg.gamma_bar1, xx + g))

        hi = _upper_log_limit(h1, cfg.gamma_bar1)
        # f2(Cγ/x) is negligible once Cγ/x is far in its tail
        lo = np.log(Cg) - _upper_log_limit(h2, cfg.gamma_bar2)
        pts = [np.log(Cg), np.log(g), np.log(cfg.gamma_bar1), np.log(Cg / cfg.gamma_bar2)]
        pts += list(np.linspace(lo, hi, 12)[1:-1])
        return _log_quad(f, lo, hi, pts)
    return _scalar_map(one, gamma)


# -- high-SNR expansion -------------------------------------------------------

def _pole(x, tol=1e-9):
    return x <= tol and abs(x - round(x)) < tol


def _check(args):
    for value, pair in args:
        if _pole(value):
            raise DegenerateExponentError(
                f"{pair[0]} and {pair[1]} collide (gamma pole at argument {value:.3g}); "
                "the high-SNR expansion is degenerate", pair)


TERM_LABELS = ("T1", "T2", "T3", "T4", "T5", "T6")


def term_exponents(cfg: DualHopConfig):
    """(label, γ exponent, γ̄1 exponent, γ̄2 exponent) of each high-SNR term, no coefficients."""
    h1, h2 = cfg.hop1, cfg.hop2
    p1, am1 = h1.phi, h1.alpha * h1.mu
    p2, am2 = h2.phi, h2.alpha * h2.mu
    return (("T1", p1 / 2, p1 / 2, 0.0), ("T2", am1 / 2, am1 / 2, 0.0),
            ("T3", p2 / 2, p2 / 2, p2 / 2), ("T4", am2 / 2, am2 / 2, am2 / 2),
            ("T5", p1 / 2, p1 / 2, p1 / 2), ("T6", am1 / 2, am1 / 2, am1 / 2))


def asymptotic_terms(cfg: DualHopConfig, variant="derived", labels=TERM_LABELS):
    """The six high-SNR CDF terms (or the subset named in `labels`).

    ``variant="derived"`` (default) uses gamma factors re-derived from the
    contour integral; ``variant="literal"`` reproduces the printed closed
    form, which differs in terms 3, 4 and 5.  Raises
    :class:`DegenerateExponentError` when any two of φ1, α1μ1, φ2, α2μ2
    produce a gamma pole in a requested term.
    """
    if variant not in ("derived", "literal"):
        raise ValueError("variant must be 'derived' or 'literal'")
    h1, h2 = cfg.hop1, cfg.hop2
    a1, m1, p1 = h1.alpha, h1.mu, h1.phi
    a2, m2, p2 = h2.alpha, h2.mu, h2.phi
    c1, c2 = channel.hop_coefficients(h1), channel.hop_coefficients(h2)
    A1, B1, A2, B2 = c1.A, c1.B, c2.A, c2.B
    am1, am2 = a1 * m1, a2 * m2
    s1 = (am1 - p1) / a1
    s2 = (am2 - p2) / a2
    G = sp.gamma
    C = cfg.C
    P_h1, P_h2, P_12 = ("phi1", "alpha1*mu1"), ("phi2", "alpha2*mu2"), ("phi1", "phi2")

    def t1():
        _check([(s1, P_h1)])
        return 2 * A1 * G(s1) * G(p1 / a1) / (a1 * G(1 + p1 / a1))

    def t2():
        _check([(-s1, P_h1)])
        return 2 * A1 * B1**s1 * G(-s1) / (am1 * G(1 - s1))

    def t3():
        _check([(s2, P_h2), ((p1 - p2) / a1, P_12), (m1 - p2 / a1, ("alpha1*mu1", "phi2"))])
        if variant == "derived":
            g3 = G(m1 - p2 / a1) * G(p2 / a2)
        else:
            g3 = G(m1 * p2 / a1) * G(p2 / 2)
        return (4 * A1 * A2 * B1 ** ((p2 - p1) / a1) * G(s2) * G((p1 - p2) / a1) * g3
                / (a1 * a2 * G(1 - (p2 - p1) / a1) * G(1 + p2 / a2)) * C ** (p2 / 2))

    def t4():
        g4_arg = (p1 - am2) / a1 if variant == "derived" else (p1 - am2) / a2
        _check([(-s2, P_h2), (g4_arg, ("phi1", "alpha2*mu2")),
                (m1 - am2 / a1, ("alpha1*mu1", "alpha2*mu2"))])
        return (4 * A1 * A2 * B1 ** ((am2 - p1) / a1) * B2**s2 * G(-s2) * G(g4_arg) * G(m1 - am2 / a1)
                * G(m2) / (a1 * a2 * G(1 - s2) * G(1 + p1 / a1 - am2 / a1) * G(1 + m2))
                * C ** (am2 / 2))

    def t5():
        _check([(-(p1 - p2) / a2, P_12), (m2 - p1 / a2, ("phi1", "alpha2*mu2")), (m1 - p1 / a1, P_h1)])
        out = (4 * A1 * A2 * B2 ** ((p1 - p2) / a2) * G(-(p1 - p2) / a2) * G(m2 - p1 / a2)
               * G(m1 - p1 / a1) * G(p1 / a2) / (a2**2 * G(1 - (p1 - p2) / a2) * G(1 + p1 / a2)))
        if variant == "literal":
            out /= G(1 - (p2 - p1) / a1 - (p1 - p2) / a2)
        return out * C ** (p1 / 2)

    def t6():
        _check([(-(am1 - p2) / a2, ("alpha1*mu1", "phi2")),
                (m2 - am1 / a2, ("alpha1*mu1", "alpha2*mu2")), (p1 / a1 - m1, P_h1)])
        return (4 * A1 * A2 * B1**s1 * B2 ** ((am1 - p2) / a2) * G(-(am1 - p2) / a2)
                * G(m2 - am1 / a2) * G(p1 / a1 - m1) * G(am1 / a2)
                / (a2**2 * G(1 - (am1 - p2) / a2) * G(1 + p1 / a1 - m1) * G(1 + am1 / a2))
                * C ** (am1 / 2))

    coef = {"T1": t1, "T2": t2, "T3": t3, "T4": t4, "T5": t5, "T6": t6}
    return tuple(AsymptoticTerm(float(coef[lab]()), e, e1, e2, lab)
                 for lab, e, e1, e2 in term_exponents(cfg) if lab in labels)


def e2e_cdf_asymptotic(cfg: DualHopConfig, gamma, variant="derived") -> AsymptoticCdf:
    """Six-term high-SNR approximation of the end-to-end CDF at a scalar `gamma`."""
    terms = asymptotic_terms(cfg, variant)
    value = float(sum(t(gamma, cfg.gamma_bar1, cfg.gamma_bar2) for t in terms))
    return AsymptoticCdf(value, terms, variant)


def perturb_degenerate(cfg: DualHopConfig, rel=1e-4, max_steps=6):
    """Nudge hop parameters off exponent collisions so the expansion exists.

    Returns ``(cfg, perturbed)``.  Hop-2 parameters (φ2, then μ2) are moved
    by a relative `rel` when they take part in the collision; a purely
    hop-1 collision moves φ1.
    """
    perturbed = False
    for _ in range(max_steps):
        try:
            asymptotic_terms(cfg)
            return cfg, perturbed
        except DegenerateExponentError as err:
            pair = err.pair
        perturbed = True
        if "phi2" in pair:
            cfg = replace(cfg, hop2=replace(cfg.hop2, phi=cfg.hop2.phi * (1 + rel)))
        elif "alpha2*mu2" in pair:
            cfg = replace(cfg, hop2=replace(cfg.hop2, mu=cfg.hop2.mu * (1 + rel)))
        else:
            cfg = replace(cfg, hop1=replace(cfg.hop1, phi=cfg.hop1.phi * (1 + rel)))
    asymptotic_terms(cfg)
    return cfg, perturbed
