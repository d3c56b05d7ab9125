"""Scenario and sweep configuration from key-value files.

Sections: ``[scenario]``, ``[hop1]``, ``[hop2]``, ``[relay]``,
``[modulation]``, ``[sweep]``.  Keys are case-insensitive.  Quantities in
decibels are accepted only under keys ending in ``_db``; giving both the
linear and the dB key is an error.
"""

import configparser
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .. import channel
from ..channel import HopParams, Modulation, PathLossInputs
from ..e2e_stats import DualHopConfig


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


AXES = ("gamma_bar_db", "distance_m", "K")
ANALYTIC_METRICS = ("op", "op_asym", "ber", "ber_asym", "acc", "ser_arp", "ser_brs")
MC_METRICS = ("mc_op", "mc_ber", "mc_acc", "mc_ser_arp", "mc_ser_brs")
METRICS = ANALYTIC_METRICS + MC_METRICS


def db2lin(x):
    return 10.0 ** (x / 10.0)


@dataclass(frozen=True)
class HopSpec:
    alpha: float = 2.0
    mu: float = 1.0
    phi: float = 3.6333
    A_o: float = 1.0
    hf_hat: float = 1.0
    h_l: Optional[float] = None  # None: derive from the link budget


@dataclass(frozen=True)
class Scenario:
    """Full parameter record; defaults reproduce the symmetric reference setup."""

    hop1: HopSpec = HopSpec()
    hop2: HopSpec = HopSpec()
    gamma_bar_db: float = 20.0
    gamma_th_db: float = 2.0
    C: float = 1.7
    frequency: float = 300e9
    gain_t_db: float = 55.0
    gain_r_db: float = 55.0
    distance: float = 100.0  # total S-D distance; split evenly unless d1, d2 set
    d1: Optional[float] = None
    d2: Optional[float] = None
    beta: float = 0.0
    K: int = 1
    scheme: str = "ARP"
    modulation: Modulation = channel.BPSK
    perturb_degenerate: bool = True  # nudge exponent collisions for asymptotic metrics

    @property
    def gamma_th(self):
        return db2lin(self.gamma_th_db)

    @property
    def gamma_bar(self):
        return db2lin(self.gamma_bar_db)

    def hop_distances(self) -> Tuple[float, float]:
        d1 = self.d1 if self.d1 is not None else self.distance / 2
        d2 = self.d2 if self.d2 is not None else self.distance / 2
        return d1, d2

    def _hop(self, spec: HopSpec, d):
        h_l = spec.h_l
        if h_l is None:
            h_l = channel.path_loss(PathLossInputs(self.frequency, d, db2lin(self.gain_t_db),
                                                   db2lin(self.gain_r_db), self.beta))
        return HopParams(spec.alpha, spec.mu, spec.phi, spec.A_o, spec.hf_hat, float(h_l))

    def dual_hop(self) -> DualHopConfig:
        d1, d2 = self.hop_distances()
        g = self.gamma_bar
        return DualHopConfig(self._hop(self.hop1, d1), self._hop(self.hop2, d2), g, g, self.C)

    def at(self, axis, value) -> "Scenario":
        """Copy with one sweep axis set."""
        if axis == "gamma_bar_db":
            return replace(self, gamma_bar_db=float(value))
        if axis == "distance_m":
            return replace(self, distance=float(value), d1=None, d2=None)
        if axis == "K":
            if float(value) != int(value) or value < 1:
                raise ConfigError(f"K grid values must be positive integers, got {value}")
            return replace(self, K=int(value))
        raise ConfigError(f"unknown axis {axis!r}")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    grid: Tuple[float, ...]
    metrics: Tuple[str, ...]
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}")
        if len(self.grid) == 0:
            raise ConfigError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid[:-1], self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if len(self.metrics) == 0:
            raise ConfigError("no metrics selected")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise ConfigError(f"unknown metrics {bad}; choose from {METRICS}")


_HOP_KEYS = {"alpha", "mu", "phi", "a_o", "hf_hat", "h_l"}
_SCENARIO_KEYS = {"gamma_bar", "gamma_th", "c", "frequency", "gain_t", "gain_r",
                  "distance", "d1", "d2", "beta", "perturb_degenerate"}
_DB_KEYS = {"gamma_bar", "gamma_th", "gain_t", "gain_r"}
_LINEAR_ONLY = _SCENARIO_KEYS - _DB_KEYS


def _float(sec, key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key}: not a number: {raw!r}") from None


def _check_keys(name, section, allowed):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"[{name}] unknown key {key!r}")


def _db_pair(name, section, key, default_db):
    lin, db = section.get(key), section.get(key + "_db")
    if lin is not None and db is not None:
        raise ConfigError(f"[{name}] give either {key} or {key}_db, not both")
    if db is not None:
        return _float(name, key + "_db", db)
    if lin is not None:
        v = _float(name, key, lin)
        if v <= 0:
            raise ConfigError(f"[{name}] {key} must be positive")
        return float(10 * np.log10(v))
    return default_db


def _hop(name, section) -> HopSpec:
    _check_keys(name, section, _HOP_KEYS)
    base = HopSpec()
    kw = {}
    for key, attr in (("alpha", "alpha"), ("mu", "mu"), ("phi", "phi"), ("a_o", "A_o"),
                      ("hf_hat", "hf_hat"), ("h_l", "h_l")):
        if key in section:
            kw[attr] = _float(name, key, section[key])
    spec = replace(base, **kw)
    try:
        HopParams(spec.alpha, spec.mu, spec.phi, spec.A_o, spec.hf_hat, spec.h_l or 1.0)
    except ValueError as e:
        raise ConfigError(f"[{name}] {e}") from None
    return spec


def parse_grid(raw: str):
    """Comma list, or ``start:stop:step`` with `stop` included."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range must be start:stop:step, got {raw!r}")
        a, b, s = (_float("sweep", "grid", p) for p in parts)
        if s <= 0:
            raise ConfigError("grid step must be positive")
        n = int(np.floor((b - a) / s + 1e-9)) + 1
        return tuple(float(np.round(a + i * s, 12)) for i in range(n))
    return tuple(_float("sweep", "grid", p) for p in raw.split(",") if p.strip())


def parse_config(text: str) -> Tuple[Scenario, Optional[SweepSpec]]:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse config: {e}") from None
    known = {"scenario", "hop1", "hop2", "relay", "modulation", "sweep"}
    for sec in cp.sections():
        if sec not in known:
            raise ConfigError(f"unknown section [{sec}]")

    sc = dict(cp["scenario"]) if cp.has_section("scenario") else {}
    allowed = _LINEAR_ONLY | _DB_KEYS | {k + "_db" for k in _DB_KEYS}
    _check_keys("scenario", sc, allowed)
    d = Scenario()
    kw = dict(
        gamma_bar_db=_db_pair("scenario", sc, "gamma_bar", d.gamma_bar_db),
        gamma_th_db=_db_pair("scenario", sc, "gamma_th", d.gamma_th_db),
        gain_t_db=_db_pair("scenario", sc, "gain_t", d.gain_t_db),
        gain_r_db=_db_pair("scenario", sc, "gain_r", d.gain_r_db),
    )
    for key, attr in (("c", "C"), ("frequency", "frequency"), ("distance", "distance"),
                      ("d1", "d1"), ("d2", "d2"), ("beta", "beta")):
        if key in sc:
            kw[attr] = _float("scenario", key, sc[key])
    if "perturb_degenerate" in sc:
        raw = sc["perturb_degenerate"].strip().lower()
        if raw not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
            raise ConfigError("[scenario] perturb_degenerate must be a boolean")
        kw["perturb_degenerate"] = raw in ("true", "yes", "1", "on")
    if kw.get("C", 0.0) < 0:
        raise ConfigError("[scenario] c must be non-negative")
    for key in ("frequency", "distance", "d1", "d2"):
        if key in kw and not kw[key] > 0:
            raise ConfigError(f"[scenario] {key} must be positive")
    if kw.get("beta", 0.0) < 0:
        raise ConfigError("[scenario] beta must be non-negative")

    for name in ("hop1", "hop2"):
        kw[name] = _hop(name, dict(cp[name])) if cp.has_section(name) else HopSpec()

    if cp.has_section("relay"):
        rel = dict(cp["relay"])
        _check_keys("relay", rel, {"k", "scheme"})
        if "k" in rel:
            try:
                kw["K"] = int(rel["k"])
            except ValueError:
                raise ConfigError("[relay] k must be an integer") from None
            if kw["K"] < 1:
                raise ConfigError("[relay] k must be at least 1")
        if "scheme" in rel:
            kw["scheme"] = rel["scheme"].strip().upper()
            if kw["scheme"] not in ("ARP", "BRS"):
                raise ConfigError("[relay] scheme must be ARP or BRS")

    if cp.has_section("modulation"):
        mod = dict(cp["modulation"])
        _check_keys("modulation", mod, {"label", "p", "q", "m"})
        M = int(mod.get("m", 2))
        label = mod.get("label", "custom").strip()
        try:
            if label.upper() in ("BPSK", "DPSK"):
                if "p" in mod or "q" in mod:
                    raise ConfigError("[modulation] p, q are fixed by the label")
                kw["modulation"] = Modulation.from_label(label, M)
            else:
                p = _float("modulation", "p", mod.get("p", "0.5"))
                q = _float("modulation", "q", mod.get("q", "1.0"))
                kw["modulation"] = Modulation(p, q, "custom", M)
        except ValueError as e:
            raise ConfigError(f"[modulation] {e}") from None

    scenario = Scenario(**kw)
    try:
        scenario.dual_hop()
    except ValueError as e:
        raise ConfigError(str(e)) from None

    sweep = None
    if cp.has_section("sweep"):
        sw = dict(cp["sweep"])
        _check_keys("sweep", sw, {"axis", "grid", "metrics"})
        for k in ("axis", "grid", "metrics"):
            if k not in sw:
                raise ConfigError(f"[sweep] missing {k}")
        metrics = tuple(m.strip() for m in sw["metrics"].split(",") if m.strip())
        axis = sw["axis"].strip()
        if axis.lower() == "k":
            axis = "K"
        sweep = SweepSpec(axis, parse_grid(sw["grid"]), metrics, scenario)
    return scenario, sweep


def load_config(path) -> Tuple[Scenario, Optional[SweepSpec]]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)
