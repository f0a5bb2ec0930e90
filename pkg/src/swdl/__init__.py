"""Symplectic Wigner distribution in the linear canonical transform domain."""

__version__ = "0.1.0"

from .symplectic import SymplecticMatrix, optimal_a1, lfm_a2  # noqa: E402
from .signals import Signal, SampledSignal  # noqa: E402
from .tfd import TFGrid, compute  # noqa: E402

__all__ = ["SymplecticMatrix", "optimal_a1", "lfm_a2", "Signal", "SampledSignal", "TFGrid",
           "compute", "__version__"]
