"""Single THz hop: path loss, α-μ fading with pointing errors, per-hop SNR statistics."""

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .specfun import FoxHParams, fox_h, meijer_g, upper_incomplete_gamma

SPEED_OF_LIGHT = 299_792_458.0


class DegenerateExponentError(ValueError):
    """An asymptotic expansion hits a gamma pole because two exponents coincide."""

    def __init__(self, message, pair=()):
        super().__init__(message)
        self.pair = tuple(pair)


@dataclass(frozen=True)
class PathLossInputs:
    """Link budget inputs: carrier `f` [Hz], distance `d` [m], linear gains, absorption `beta` [1/m]."""

    f: float
    d: float
    G_t: float
    G_r: float
    beta: float = 0.0

    def __post_init__(self):
        for name in ("f", "d", "G_t", "G_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


@dataclass(frozen=True)
class HopParams:
    """One THz hop.

    Parameters
    ----------
    alpha, mu : α-μ fading shape parameters.
    phi : squared ratio of equivalent beam radius to pointing-jitter deviation.
    A_o : fraction of power collected with zero pointing error.
    hf_hat : α-root mean value of the fading envelope.
    h_l : deterministic path gain.
    """

    alpha: float
    mu: float
    phi: float
    A_o: float = 1.0
    hf_hat: float = 1.0
    h_l: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "mu", "phi", "A_o", "hf_hat", "h_l"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"HopParams.{name} must be positive and finite, got {v}")

    @property
    def degenerate(self) -> bool:
        """True when φ = αμ, where the high-SNR expansion has a double pole."""
        return bool(np.isclose(self.phi, self.alpha * self.mu, rtol=1e-12, atol=0))


@dataclass(frozen=True)
class HopCoefficients:
    A: float
    B: float


@dataclass(frozen=True)
class Modulation:
    """Modulation constants.

    `p`, `q` parametrise the unified BER integral; `M` is the PSK order used
    for symbol error rates.  Labels ``"BPSK"`` and ``"DPSK"`` pin (p, q).
    """

    p: float = 0.5
    q: float = 1.0
    label: str = "custom"
    M: int = 2

    _FIXED = {"BPSK": (0.5, 1.0), "DPSK": (1.0, 1.0)}

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError("modulation p and q must be positive")
        if self.M < 2:
            raise ValueError("M must be at least 2")
        if self.label not in ("BPSK", "DPSK", "custom"):
            raise ValueError(f"unknown modulation label {self.label!r}")
        if self.label in self._FIXED and (self.p, self.q) != self._FIXED[self.label]:
            raise ValueError(f"{self.label} requires (p, q) = {self._FIXED[self.label]}")

    @classmethod
    def from_label(cls, label, M=2):
        p, q = cls._FIXED[label.upper()]
        return cls(p, q, label.upper(), M)


BPSK = Modulation(0.5, 1.0, "BPSK")
DPSK = Modulation(1.0, 1.0, "DPSK")


def path_loss(inp: PathLossInputs) -> float:
    """Deterministic path gain h_l = c√(GtGr)/(4πfd)·exp(-βd/2)."""
    return (SPEED_OF_LIGHT * np.sqrt(inp.G_t * inp.G_r) / (4 * np.pi * inp.f * inp.d)
            * np.exp(-0.5 * inp.beta * inp.d))


def hop_coefficients(hop: HopParams) -> HopCoefficients:
    """The (A, B) constants of the per-hop SNR density.

    The pointing/fading scale enters A as ĥ_f**φ, which keeps the density
    normalised for any ĥ_f (the two forms coincide at ĥ_f = 1).
    """
    a, mu, phi = hop.alpha, hop.mu, hop.phi
    scale = hop.hf_hat * hop.h_l * hop.A_o
    A = phi * mu ** (phi / a) / (2 * scale**phi * sp.gamma(mu))
    B = mu / scale**a
    return HopCoefficients(float(A), float(B))


def _near_nonpositive_integer(s, tol=1e-3):
    # exact integers are fine (the recurrence starts from E1 there)
    return s <= tol and 0 < abs(s - round(s)) < tol


def hop_snr_pdf(hop: HopParams, gamma_bar, gamma, method="incomplete_gamma"):
    """Density of the per-hop SNR.

    ``method="incomplete_gamma"`` uses the closed form with Γ(s, x);
    ``method="meijer"`` evaluates the equivalent G^{2,0}_{1,2} representation
    (scalar `gamma` only per call, but arrays are looped).
    """
    co = hop_coefficients(hop)
    a, phi = hop.alpha, hop.phi
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise ValueError("hop_snr_pdf requires gamma > 0")
    s = hop.mu - phi / a
    w = co.B * (g / gamma_bar) ** (a / 2)
    pref = co.A * gamma_bar ** (-phi / 2) * g ** (phi / 2 - 1)
    if method == "incomplete_gamma" and _near_nonpositive_integer(s):
        method = "meijer"
    if method == "incomplete_gamma":
        out = pref * upper_incomplete_gamma(s, w)
    elif method == "meijer":
        P = FoxHParams(2, 0, [1.0], [0.0, s])
        out = pref * np.vectorize(lambda z: meijer_g(P, z))(w)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if np.ndim(out) == 0 else out


def hop_snr_cdf(hop: HopParams, gamma_bar, gamma, method="closed"):
    """CDF of the per-hop SNR.

    ``method="closed"`` uses P(μ, w) + (2A/φ)(γ/γ̄)^{φ/2} Γ(μ - φ/α, w) with
    w = B(γ/γ̄)^{α/2}; ``method="meijer"`` evaluates the G^{2,1}_{2,3} form.
    The closed form switches to the Meijer path automatically when μ - φ/α
    sits within 1e-3 of a non-positive integer, where Γ(s, w) loses digits.
    """
    co = hop_coefficients(hop)
    a, mu, phi = hop.alpha, hop.mu, hop.phi
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("hop_snr_cdf requires gamma >= 0")
    s = mu - phi / a
    if method == "closed" and _near_nonpositive_integer(s):
        method = "meijer"
    out = np.zeros(g.shape)
    pos = g > 0
    gp = g[pos]
    w = co.B * (gp / gamma_bar) ** (a / 2)
    if method == "closed":
        out[pos] = (sp.gammainc(mu, w)
                    + 2 * co.A / phi * (gp / gamma_bar) ** (phi / 2) * upper_incomplete_gamma(s, w))
    elif method == "meijer":
        P = FoxHParams(2, 1, [1 - phi / a, 1.0], [0.0, s, -phi / a])
        pref = 2 * co.A * gamma_bar ** (-phi / 2) * gp ** (phi / 2) / a
        out[pos] = pref * np.array([meijer_g(P, z) for z in np.atleast_1d(w)])
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def single_hop_outage(hop: HopParams, gamma_bar, gamma_th):
    """Outage probability of a single hop, P[γ < γ_th]."""
    return hop_snr_cdf(hop, gamma_bar, gamma_th)


def single_hop_cdf_terms(hop: HopParams):
    """High-SNR CDF terms as (coefficient, exponent) with F ≈ Σ c·(γ/γ̄)^e.

    Raises :class:`DegenerateExponentError` when φ = αμ.
    """
    co = hop_coefficients(hop)
    a, mu, phi = hop.alpha, hop.mu, hop.phi
    s = (a * mu - phi) / a
    if hop.degenerate or _is_pole(s) or _is_pole(-s):
        raise DegenerateExponentError(
            f"φ = {phi:g} and αμ = {a * mu:g} give a gamma pole in the high-SNR expansion",
            ("phi", "alpha*mu"))
    c1 = 2 * co.A * sp.gamma(s) * sp.gamma(phi / a) / (a * sp.gamma(1 + phi / a))
    c2 = 2 * co.A * co.B**s * sp.gamma(-s) / (a * mu * sp.gamma(1 - s))
    return [(float(c1), phi / 2), (float(c2), a * mu / 2)]


def _is_pole(x, tol=1e-12):
    return x <= tol and abs(x - round(x)) < tol


def single_hop_cdf_asymptotic(hop: HopParams, gamma_bar, gamma):
    """Two-term high-SNR approximation of the per-hop CDF."""
    r = np.asarray(gamma, dtype=float) / gamma_bar
    return sum(c * r**e for c, e in single_hop_cdf_terms(hop))


def single_hop_avg_ber(hop: HopParams, gamma_bar, mod: Modulation = BPSK, contour=None):
    """Average BER of a single hop for the (p, q) modulation family.

    Evaluated as an H^{2,2}_{3,3} Fox function of B/(qγ̄)^{α/2}.
    """
    co = hop_coefficients(hop)
    a, mu, phi = hop.alpha, hop.mu, hop.phi
    p, q = mod.p, mod.q
    x = co.B / (q * gamma_bar) ** (a / 2)
    P = FoxHParams(2, 2, [(1 - p - phi / 2, a / 2), (1 - phi / a, 1), (1, 1)],
                   [(0, 1), (mu - phi / a, 1), (-phi / a, 1)])
    pref = co.A * (q * gamma_bar) ** (-phi / 2) / (sp.gamma(p) * a)
    return float(pref * fox_h(P, x, contour))
