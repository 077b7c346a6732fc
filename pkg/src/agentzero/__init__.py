"""Agent-based simulation of fear-driven collective violence.

Agents on a toroidal grid learn affect from local threats, estimate risk
from a rolling memory, absorb contagion over a weighted tie network, and
fight, flee, or stay quiet depending on their net disposition.
"""

__version__ = "0.1.0"

from .config import SimConfig, parse_config  # noqa: E402
from .engine import init_model, run, step  # noqa: E402

__all__ = ["SimConfig", "parse_config", "init_model", "run", "step", "__version__"]
