"""Two competing oscillator networks with frustrated cross coupling."""
from ._backend import name as backend
from .dynamics import ModelConfig, PhaseState, integrate, rhs, uniform_frequencies
from .graph import complete_kary_tree, erdos_renyi, leaf_matching_cross, partition_red

__version__ = "0.1.0"

__all__ = [
    "ModelConfig",
    "PhaseState",
    "backend",
    "complete_kary_tree",
    "erdos_renyi",
    "integrate",
    "leaf_matching_cross",
    "partition_red",
    "rhs",
    "uniform_frequencies",
]
