"""Cycle estimates for a design point.

Transfers and compute are composed sequentially. Every division by the
DRAM throughput rounds up to whole cycles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .designspace import DesignPoint, TraversalOrder
from .netmodel import FC, LayerSpec, NetworkModel
from .resources import HardwareBudget, mem_ifm, mem_weights


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class TilingFactors:
    alpha: int  # filter groups
    beta: int   # row tiles
    gamma: int  # channel groups

    @property
    def omega(self) -> int:
        return self.alpha * self.beta * self.gamma


@dataclass(frozen=True)
class LayerPerf:
    t_fm: int
    t_w: int
    t_sp: int
    t_sa: int
    t_out: int

    @property
    def t_layer(self) -> int:
        return self.t_fm + self.t_w + self.t_sp + self.t_sa + self.t_out

    def to_json(self) -> dict:
        return {"t_fm": self.t_fm, "t_w": self.t_w, "t_sp": self.t_sp,
                "t_sa": self.t_sa, "t_out": self.t_out, "t_layer": self.t_layer}


@dataclass(frozen=True)
class PerfEstimate:
    layers: Tuple[LayerPerf, ...]

    @property
    def t_total(self) -> int:
        return sum(lp.t_layer for lp in self.layers)

    def to_json(self) -> dict:
        return {"layers": [lp.to_json() for lp in self.layers], "t_total": self.t_total}

    @classmethod
    def from_json(cls, obj: Optional[dict]) -> Optional["PerfEstimate"]:
        if obj is None:
            return None
        layers = tuple(
            LayerPerf(lp["t_fm"], lp["t_w"], lp["t_sp"], lp["t_sa"], lp["t_out"]) for lp in obj["layers"]
        )
        return cls(layers)


def tiling_factors(dp: DesignPoint, layer: LayerSpec) -> TilingFactors:
    return TilingFactors(
        alpha=_ceil_div(layer.n_f, dp.c_sa),
        beta=_ceil_div(layer.r, dp.tile.rows(layer.index)),
        gamma=_ceil_div(layer.ch, dp.ch_sa),
    )


def cycles_ifm(dp: DesignPoint, layer: LayerSpec, budget: HardwareBudget) -> int:
    tf = tiling_factors(dp, layer)
    fetches = tf.beta * tf.gamma
    if dp.traversal is TraversalOrder.FILTER_REUSE:
        # tiles are streamed again for every filter group
        fetches *= tf.alpha
    return _ceil_div(fetches * mem_ifm(dp, layer), budget.w_words_per_cycle)


def cycles_weights(dp: DesignPoint, layer: LayerSpec, budget: HardwareBudget) -> int:
    tf = tiling_factors(dp, layer)
    fetches = tf.beta * tf.gamma
    if dp.traversal is TraversalOrder.FEATURE_MAP_REUSE:
        fetches *= tf.alpha
    return _ceil_div(fetches * mem_weights(dp, layer), budget.w_words_per_cycle)


def scratchpad_factor(layer: LayerSpec) -> int:
    return 1 if layer.kind == FC else layer.r_f


def cycles_scratchpad(dp: DesignPoint, layer: LayerSpec) -> int:
    omega = tiling_factors(dp, layer).omega
    return omega * (layer.d_h * layer.d_v + dp.r_sa - 1) * scratchpad_factor(layer)


def cycles_sa(dp: DesignPoint, layer: LayerSpec) -> int:
    omega = tiling_factors(dp, layer).omega
    return omega * dp.c_sa + cycles_scratchpad(dp, layer)


def cycles_writeback(dp: DesignPoint, layer: LayerSpec, budget: HardwareBudget) -> int:
    tf = tiling_factors(dp, layer)
    plane = _ceil_div(layer.d_h * layer.d_v, layer.s ** 2)
    return _ceil_div(tf.alpha * tf.beta * plane, budget.w_words_per_cycle)


def layer_perf(dp: DesignPoint, layer: LayerSpec, budget: HardwareBudget) -> LayerPerf:
    t_sp = cycles_scratchpad(dp, layer)
    return LayerPerf(
        t_fm=cycles_ifm(dp, layer, budget),
        t_w=cycles_weights(dp, layer, budget),
        t_sp=t_sp,
        t_sa=tiling_factors(dp, layer).omega * dp.c_sa + t_sp,
        t_out=cycles_writeback(dp, layer, budget),
    )


def perf(dp: DesignPoint, net: NetworkModel, budget: HardwareBudget) -> PerfEstimate:
    return PerfEstimate(tuple(layer_perf(dp, layer, budget) for layer in net))
