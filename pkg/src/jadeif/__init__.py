"""Instantaneous phase and frequency estimation by DTW template alignment,
with Fast Iterative Filtering for multicomponent signals."""

from .core import NoiseSpec, Signal, SignalError
from .fif import Decomposition, FifConfig, decompose
from .jade import JadeConfig, JadeResult, estimate, reconstruct, relative_error

__all__ = [
    "Decomposition",
    "FifConfig",
    "JadeConfig",
    "JadeResult",
    "NoiseSpec",
    "Signal",
    "SignalError",
    "decompose",
    "estimate",
    "reconstruct",
    "relative_error",
]
