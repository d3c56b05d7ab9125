"""Parameter sweeps producing method-tagged rows."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .. import e2e_stats, mc_oracle, metrics, multirelay
from ..channel import DegenerateExponentError
from ..multirelay import DominantTermTieError, MultiRelayConfig
from .config import Scenario, SweepSpec

COLUMNS = ("axis", "axis_value", "metric", "method", "value", "stderr", "status")

METHOD = {
    "op": "exact", "ber": "exact", "acc": "exact",
    "op_asym": "asymptotic", "ber_asym": "asymptotic",
    "ser_arp": "asymptotic", "ser_brs": "asymptotic",
}


@dataclass(frozen=True)
class Row:
    axis: str
    axis_value: float
    metric: str
    method: str
    value: float
    stderr: Optional[float]
    status: str

    def as_dict(self):
        return {k: getattr(self, k) for k in COLUMNS}


ASYMPTOTIC = ("op_asym", "ber_asym", "ser_arp", "ser_brs")
OK_STATUS = ("ok", "perturbed")


def _mr(sc: Scenario, scheme, cfg=None):
    return MultiRelayConfig(cfg or sc.dual_hop(), sc.K, scheme, sc.modulation.M)


def _ser(sc: Scenario, scheme, cfg):
    m = _mr(sc, scheme, cfg)
    dom = multirelay.dominant_term(m)
    if m.M == 2:
        f = multirelay.arp_ser_asymptotic if scheme == "ARP" else multirelay.brs_ser_asymptotic
        return f(m, dom)
    return multirelay.mpsk_ser_from_mgf(dom, m.gamma_bar, m.K, scheme, m.M)


def evaluate_metric(sc: Scenario, metric: str, seed: int, samples: int, cfg=None):
    """Returns (value, stderr or None) for one metric at one scenario.

    `cfg` replaces the scenario's dual-hop configuration when given.
    """
    cfg = cfg or sc.dual_hop()
    mod = sc.modulation
    if metric == "op":
        return metrics.outage_exact(cfg, sc.gamma_th), None
    if metric == "op_asym":
        return metrics.outage_asymptotic(cfg, sc.gamma_th), None
    if metric == "ber":
        return metrics.avg_ber_exact(cfg, mod), None
    if metric == "ber_asym":
        return metrics.avg_ber_asymptotic(cfg, mod), None
    if metric == "acc":
        return metrics.acc_exact(cfg), None
    if metric == "ser_arp":
        return _ser(sc, "ARP", cfg), None
    if metric == "ser_brs":
        return _ser(sc, "BRS", cfg), None
    if metric == "mc_op":
        e = mc_oracle.estimate_outage(cfg, sc.gamma_th, seed, samples)
    elif metric == "mc_ber":
        e = mc_oracle.estimate_ber(cfg, mod, seed, samples)
    elif metric == "mc_acc":
        e = mc_oracle.estimate_capacity(cfg, seed, samples)
    elif metric == "mc_ser_arp":
        e = mc_oracle.estimate_multirelay_ser(_mr(sc, "ARP"), seed, samples)
    elif metric == "mc_ser_brs":
        e = mc_oracle.estimate_multirelay_ser(_mr(sc, "BRS"), seed, samples)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return e.value, e.std_error


def _status(exc: Exception) -> str:
    if isinstance(exc, DegenerateExponentError):
        return "degenerate"
    if isinstance(exc, DominantTermTieError):
        return "tie"
    return "error"


def _evaluate(sc: Scenario, metric, seed, samples):
    try:
        return (*evaluate_metric(sc, metric, seed, samples), "ok")
    except DegenerateExponentError:
        if metric not in ASYMPTOTIC or not sc.perturb_degenerate:
            raise
    # exponent collision: nudge the colliding parameter and label the row
    cfg, _ = e2e_stats.perturb_degenerate(sc.dual_hop())
    return (*evaluate_metric(sc, metric, seed, samples, cfg), "perturbed")


def _one(spec: SweepSpec, x, metric, seed, samples) -> Row:
    method = METHOD.get(metric, "mc")
    try:
        sc = spec.scenario.at(spec.axis, x)
        value, se, status = _evaluate(sc, metric, seed, samples)
        if not np.isfinite(value):
            status = "error"
    except Exception as exc:  # recorded in-row; the sweep continues
        value, se, status = float("nan"), None, _status(exc)
    return Row(spec.axis, float(x), metric, method, float(value), se, status)


def run_sweep(spec: SweepSpec, seed: int = 0, samples: int = 10**6, jobs: int = 1) -> List[Row]:
    """One row per (grid point, metric), ordered by (axis_value, metric)."""
    tasks = [(x, m) for x in spec.grid for m in spec.metrics]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(lambda t: _one(spec, t[0], t[1], seed, samples), tasks))
    else:
        rows = [_one(spec, x, m, seed, samples) for x, m in tasks]
    return sorted(rows, key=lambda r: (r.axis_value, r.metric))


def has_errors(rows) -> bool:
    return any(r.status not in OK_STATUS for r in rows)
