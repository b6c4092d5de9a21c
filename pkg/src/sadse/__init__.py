"""Design space exploration for systolic-array CNN accelerators on small FPGAs."""
from importlib import resources as _resources

from .designspace import (DesignPoint, ExplorationParams, TileSchedule, TraversalOrder,
                          enumerate_points, gen_sa_channels, gen_sa_columns, gen_tile_schedules,
                          sa_rows, single_point)
from .dse import EvaluatedPoint, ExplorationReport, explore, pareto, rank
from .estimator import SystolicDSE
from .netmodel import (Activation, ChainWarning, LayerSpec, NetworkError, NetworkModel,
                       load_network, parse_network, serialize_network, slide_counts)
from .perfmodel import PerfEstimate, perf, tiling_factors
from .resources import HardwareBudget, ResourceEstimate, assess, load_budget
from .sim import SimResult, activation, maxpool, reference_layer, simulate_layer

__version__ = "0.1.0"

SAMPLES = {
    "tiny-yolo": "tiny_yolo.json",
    "tiny-yolo-literal": "tiny_yolo_literal.json",
    "fig1": "fig1.json",
    "artix7": "artix7.json",
}


def sample_path(name: str):
    """Path of a shipped sample file (network or budget)."""
    return _resources.files(__name__).joinpath("data", SAMPLES[name])


def load_sample_network(name: str) -> NetworkModel:
    return parse_network(sample_path(name).read_text(encoding="utf-8"))


def load_sample_budget(name: str = "artix7") -> HardwareBudget:
    return load_budget(sample_path(name))
