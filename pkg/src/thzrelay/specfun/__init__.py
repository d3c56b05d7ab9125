"""Special functions: log-gamma, incomplete gamma, Meijer G and (bivariate) Fox H."""

from .foxh import (BivFoxHParams, FoxHParams, GammaPair, JointPair, bivariate_fox_h,
                   fox_h, meijer_g)
from .gamma import PoleError, log_gamma, upper_incomplete_gamma
from .mellin import (AccuracyNotReachedError, ContourPlacementError, ContourSpec,
                     MellinBarnesResult)

__all__ = [
    "AccuracyNotReachedError", "BivFoxHParams", "ContourPlacementError", "ContourSpec",
    "FoxHParams", "GammaPair", "JointPair", "MellinBarnesResult", "PoleError",
    "bivariate_fox_h", "fox_h", "log_gamma", "meijer_g", "upper_incomplete_gamma",
]
