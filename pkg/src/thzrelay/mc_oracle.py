"""Monte-Carlo simulator of the physical link model.

Samples are drawn in fixed-size chunks.  Chunk ``i`` of stream ``tag`` uses
its own PCG64 generator seeded by ``SeedSequence(seed, spawn_key=(tag, i))``,
so results depend only on (seed, n, parameters) and never on how chunks are
scheduled.  Per-chunk moments are merged in chunk order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy import special as sp

from .channel import BPSK, HopParams, Modulation
from .e2e_stats import DualHopConfig

CHUNK = 1 << 18

# stream tags
_HOP1, _HOP2 = 1, 2


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error (sample std / √n)."""

    value: float
    std_error: float
    n: int

    def agrees_with(self, other, k=3.0):
        """True when the two estimates are within `k` combined standard errors."""
        if isinstance(other, McEstimate):
            s = np.hypot(self.std_error, other.std_error)
            return abs(self.value - other.value) <= k * s
        return abs(self.value - other) <= k * self.std_error


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x):
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return cls()
        m = float(x.mean())
        return cls(x.size, m, float(((x - m) ** 2).sum()))

    def merge(self, o: "_Moments") -> "_Moments":
        # Chan et al. pairwise update
        n = self.n + o.n
        if n == 0:
            return _Moments()
        d = o.mean - self.mean
        return _Moments(n, self.mean + d * o.n / n, self.m2 + o.m2 + d * d * self.n * o.n / n)

    def estimate(self) -> McEstimate:
        if self.n < 2:
            return McEstimate(self.mean, float("nan"), self.n)
        std = np.sqrt(self.m2 / (self.n - 1))
        return McEstimate(self.mean, float(std / np.sqrt(self.n)), self.n)


def _chunk_sizes(n):
    if n < 1:
        raise ValueError("n must be at least 1")
    full, rest = divmod(int(n), CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _rng(seed, tag, i):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(tag), int(i)))
    return np.random.Generator(np.random.PCG64(ss))


def _hop_chunk(hop: HopParams, gamma_bar, rng, size):
    # envelope h = h_l · h_f · h_p, SNR = γ̄ h²
    g = rng.standard_gamma(hop.mu, size)
    h_f = hop.hf_hat * (g / hop.mu) ** (1.0 / hop.alpha)
    h_p = hop.A_o * rng.random(size) ** (1.0 / hop.phi)
    return gamma_bar * (hop.h_l * h_f * h_p) ** 2


def _e2e_chunk(cfg: DualHopConfig, seed, i, size, branch=0, C=None):
    C = cfg.C if C is None else C
    g1 = _hop_chunk(cfg.hop1, cfg.gamma_bar1, _rng(seed, _HOP1 + 2 * branch, i), size)
    g2 = _hop_chunk(cfg.hop2, cfg.gamma_bar2, _rng(seed, _HOP2 + 2 * branch, i), size)
    if C == 0:
        return g1
    return g1 * g2 / (g2 + C)


def iter_hop_snr(hop: HopParams, gamma_bar, seed, n) -> Iterator[np.ndarray]:
    """Chunks of per-hop SNR samples."""
    for i, size in enumerate(_chunk_sizes(n)):
        yield _hop_chunk(hop, gamma_bar, _rng(seed, _HOP1, i), size)


def sample_hop_snr(hop: HopParams, gamma_bar, seed, n) -> np.ndarray:
    """`n` per-hop SNR samples, γ = γ̄ (h_l h_f h_p)²."""
    return np.concatenate(list(iter_hop_snr(hop, gamma_bar, seed, n)))


def iter_e2e_snr(cfg: DualHopConfig, seed, n, C=None) -> Iterator[np.ndarray]:
    if C is not None and C < 0:
        raise ValueError("C must be non-negative")
    for i, size in enumerate(_chunk_sizes(n)):
        yield _e2e_chunk(cfg, seed, i, size, C=C)


def sample_e2e_snr(cfg: DualHopConfig, seed, n, C=None) -> np.ndarray:
    """`n` end-to-end SNR samples γ₁γ₂/(γ₂ + C) from independent hops.

    `C` overrides ``cfg.C``; ``C=0`` returns the hop-1 samples unchanged.
    """
    return np.concatenate(list(iter_e2e_snr(cfg, seed, n, C)))


def _estimate(chunk_fn: Callable[[int, int], np.ndarray], n, jobs=1) -> McEstimate:
    sizes = _chunk_sizes(n)

    def one(args):
        i, size = args
        return _Moments.of(chunk_fn(i, size))

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(one, enumerate(sizes)))
    else:
        parts = [one(a) for a in enumerate(sizes)]
    acc = _Moments()
    for p in parts:
        acc = acc.merge(p)
    return acc.estimate()


def bit_error_weight(gamma, mod: Modulation = BPSK):
    """Conditional BER Γ(p, qγ) / (2Γ(p))."""
    return 0.5 * sp.gammaincc(mod.p, mod.q * np.asarray(gamma))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def mpsk_symbol_error_weight(gamma, M=2):
    """Conditional M-PSK SER, (1/π) ∫_0^{π-π/M} exp(-γ sin²(π/M)/sin²θ) dθ."""
    gamma = np.asarray(gamma, dtype=float)
    if M == 2:
        return 0.5 * sp.erfc(np.sqrt(gamma))
    hi = np.pi - np.pi / M
    theta = 0.5 * hi * (_GL_X + 1)
    w = 0.5 * hi * _GL_W / np.pi
    k = np.sin(np.pi / M) ** 2 / np.sin(theta) ** 2
    return np.exp(-np.multiply.outer(gamma, k)) @ w


def estimate_outage(cfg: DualHopConfig, gamma_th, seed, n, jobs=1) -> McEstimate:
    """Fraction of end-to-end SNR samples below `gamma_th`."""
    return _estimate(lambda i, s: (_e2e_chunk(cfg, seed, i, s) < gamma_th).astype(float), n, jobs)


def estimate_cdf(cfg: DualHopConfig, grid: Sequence[float], seed, n) -> list:
    """Empirical end-to-end CDF at every grid point from one sample set."""
    grid = np.asarray(grid, dtype=float)
    accs = [_Moments() for _ in grid]
    for i, size in enumerate(_chunk_sizes(n)):
        g = _e2e_chunk(cfg, seed, i, size)
        for j, t in enumerate(grid):
            accs[j] = accs[j].merge(_Moments.of((g < t).astype(float)))
    return [a.estimate() for a in accs]


def estimate_ber(cfg: DualHopConfig, mod: Modulation = BPSK, seed=0, n=10**6, jobs=1) -> McEstimate:
    """Mean conditional BER over end-to-end SNR samples."""
    return _estimate(lambda i, s: bit_error_weight(_e2e_chunk(cfg, seed, i, s), mod), n, jobs)


def estimate_capacity(cfg: DualHopConfig, seed=0, n=10**6, jobs=1) -> McEstimate:
    """Mean of (1/2) log2(1 + γ) over end-to-end SNR samples."""
    return _estimate(lambda i, s: 0.5 * np.log2(1 + _e2e_chunk(cfg, seed, i, s)), n, jobs)


def multirelay_snr_chunk(mcfg, seed, i, size):
    """Combined SNR of K independent relay branches for one chunk.

    ARP: (1/2K) Σ γ_o,k (MRC with per-node power 1/(2K)).
    BRS: (1/2) max γ_o,k (selection with per-node power 1/2).
    """
    branches = np.stack([_e2e_chunk(mcfg.base, seed, i, size, branch=k) for k in range(mcfg.K)])
    if mcfg.scheme == "ARP":
        return branches.sum(axis=0) / (2 * mcfg.K)
    return 0.5 * branches.max(axis=0)


def estimate_multirelay_ser(mcfg, seed=0, n=10**6, jobs=1) -> McEstimate:
    """Mean conditional M-PSK SER of the combined multi-relay SNR."""
    return _estimate(
        lambda i, s: mpsk_symbol_error_weight(multirelay_snr_chunk(mcfg, seed, i, s), mcfg.M), n, jobs)
