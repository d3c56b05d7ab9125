import numpy as np
import pytest

from thzrelay.channel import HopParams, PathLossInputs, path_loss
from thzrelay.e2e_stats import DualHopConfig

GAMMA_TH = 10 ** 0.2
GAINS = 10 ** 5.5


def hl(d):
    return path_loss(PathLossInputs(300e9, d, GAINS, GAINS))


def db(x):
    return 10 ** (x / 10)


SYM = HopParams(2, 1, 3.6333)

# one parameter set per dominant argument of min(φ1/2, α1μ1/2, φ2, α2μ2)
DOMINANCE_SETS = {
    "phi1": (HopParams(1.2, 3, 1), HopParams(1.3, 2, 3.6333), 0.5),
    "alpha1mu1": (HopParams(2, 1, 3.6333), HopParams(2, 1.5, 4.5), 1.0),
    "phi2": (HopParams(2, 3, 6.5), HopParams(1.5, 2.2, 1.2), 1.2),
    "alpha2mu2": (HopParams(2, 3, 6.5), HopParams(1.5, 0.8, 4), 1.2),
}


@pytest.fixture
def sym_cfg():
    return DualHopConfig(SYM, SYM, 10.0, 10.0, 1.7)


@pytest.fixture
def asym_cfg():
    return DualHopConfig(HopParams(1.2, 3, 1), HopParams(1.3, 2, 3.6333), 10.0, 10.0, 1.7)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running oracle comparisons")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
