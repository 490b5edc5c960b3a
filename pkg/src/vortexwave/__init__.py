"""Steady periodic two-layer interfacial waves carrying a point-vortex pair.

Spectral solver for the steady wave system in trace form, with Newton
correction, pseudo-arclength continuation in the vortex strength, and
branch termination classification.
"""

__version__ = "0.1.0"

from .spectral import CollocationGrid, EvenField, OddField  # noqa: F401
from .vortex import VortexPair  # noqa: F401
from .system import PhysicalParameters, WaveState, WaveSystem  # noqa: F401
from .continuation import (  # noqa: F401
    Alternative,
    Branch,
    BranchPoint,
    ContinuationEngine,
    ContinuationSettings,
)
from .config import RunConfig, load_config, load_config_file  # noqa: F401
