"""On-chip memory requirements and feasibility of a design point.

All memory quantities are in words. The budget is given in bits and
converted with ``word_bits``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

from .designspace import DesignPoint, TraversalOrder
from .netmodel import LayerSpec, NetworkModel

_BUDGET_KEYS = ("n_dsp", "m_bram_bits", "word_bits", "w_words_per_cycle")


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class HardwareBudget:
    n_dsp_avail: int
    m_bram_bits: int
    word_bits: int = 16
    w_words_per_cycle: int = 1

    def __post_init__(self):
        for name in ("n_dsp_avail", "m_bram_bits", "word_bits", "w_words_per_cycle"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"{name} must be an integer, got {value!r}")
        # a zero DSP/memory budget is allowed: everything is then infeasible
        if self.n_dsp_avail < 0 or self.m_bram_bits < 0:
            raise ValueError("budget quantities must be >= 0")
        if self.word_bits < 1 or self.w_words_per_cycle < 1:
            raise ValueError("word_bits and w_words_per_cycle must be >= 1")

    @property
    def capacity_words(self) -> int:
        return self.m_bram_bits // self.word_bits

    def to_json(self) -> dict:
        return {"n_dsp": self.n_dsp_avail, "m_bram_bits": self.m_bram_bits,
                "word_bits": self.word_bits, "w_words_per_cycle": self.w_words_per_cycle}

    @classmethod
    def from_json(cls, obj) -> "HardwareBudget":
        if not isinstance(obj, dict):
            raise ValueError("budget document must be a JSON object")
        unknown = set(obj) - set(_BUDGET_KEYS)
        if unknown:
            raise ValueError(f"unknown budget keys {sorted(unknown)}")
        if "n_dsp" not in obj or "m_bram_bits" not in obj:
            raise ValueError("budget needs 'n_dsp' and 'm_bram_bits'")
        return cls(obj["n_dsp"], obj["m_bram_bits"], obj.get("word_bits", 16),
                   obj.get("w_words_per_cycle", 1))


def load_budget(path: Union[str, Path]) -> HardwareBudget:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed budget document: {exc}") from exc
    return HardwareBudget.from_json(doc)


@dataclass(frozen=True)
class LayerResource:
    m_fm: int
    m_ps: int
    m_pool: int
    m_wsa: int
    m_t: int
    m_delta: int

    def to_json(self) -> dict:
        return {"m_fm": self.m_fm, "m_ps": self.m_ps, "m_pool": self.m_pool,
                "m_wsa": self.m_wsa, "m_t": self.m_t, "m_delta": self.m_delta}


@dataclass(frozen=True)
class ResourceEstimate:
    layers: Tuple[LayerResource, ...]
    mu: int
    n_dsp: int
    n_dsp_avail: int

    @property
    def memory_ok(self) -> bool:
        return self.mu > 0

    @property
    def dsp_ok(self) -> bool:
        return self.n_dsp <= self.n_dsp_avail

    @property
    def feasible(self) -> bool:
        return self.memory_ok and self.dsp_ok

    @property
    def worst_m_t(self) -> int:
        return max(lr.m_t for lr in self.layers)

    @property
    def violated_layers(self) -> Tuple[int, ...]:
        """1-based indices of layers whose margin is not positive."""
        return tuple(i for i, lr in enumerate(self.layers, 1) if lr.m_delta <= 0)

    def violations(self) -> list:
        out = []
        if not self.dsp_ok:
            out.append({"constraint": "dsp", "n_dsp": self.n_dsp, "n_dsp_avail": self.n_dsp_avail})
        if not self.memory_ok:
            out.append({"constraint": "memory", "mu": self.mu, "layers": list(self.violated_layers)})
        return out

    def to_json(self) -> dict:
        return {
            "layers": [lr.to_json() for lr in self.layers],
            "mu": self.mu,
            "n_dsp": self.n_dsp,
            "n_dsp_avail": self.n_dsp_avail,
            "feasible": self.feasible,
            "violations": self.violations(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ResourceEstimate":
        layers = tuple(LayerResource(**lr) for lr in obj["layers"])
        return cls(layers, obj["mu"], obj["n_dsp"], obj["n_dsp_avail"])


def mem_ifm(dp: DesignPoint, layer: LayerSpec) -> int:
    return dp.tile.rows(layer.index) * dp.tile.cols(layer.index) * dp.ch_sa


def mem_partial_sums(dp: DesignPoint, layer: LayerSpec) -> int:
    # feature-map reuse keeps every filter's plane alive while the tile is resident
    planes = layer.n_f if dp.traversal is TraversalOrder.FEATURE_MAP_REUSE else dp.c_sa
    return planes * layer.d_h * layer.d_v


def mem_pool(dp: DesignPoint, layer: LayerSpec) -> int:
    return _ceil_div(mem_partial_sums(dp, layer), layer.s ** 2)


def mem_weights(dp: DesignPoint, layer: LayerSpec) -> int:
    """One resident weight set: c_sa filters x ch_sa channels x filter taps."""
    return dp.c_sa * dp.ch_sa * layer.r_f * layer.c_f


def combine(m_fm: int, m_ps: int, m_pool: int, m_wsa: int, capacity_words: int) -> LayerResource:
    m_t = m_fm + m_ps + m_pool + m_wsa
    return LayerResource(m_fm, m_ps, m_pool, m_wsa, m_t, capacity_words - m_t)


def mem_total(dp: DesignPoint, layer: LayerSpec, budget: HardwareBudget) -> LayerResource:
    m_ps = mem_partial_sums(dp, layer)
    return combine(mem_ifm(dp, layer), m_ps, _ceil_div(m_ps, layer.s ** 2),
                   mem_weights(dp, layer), budget.capacity_words)


def assess(dp: DesignPoint, net: NetworkModel, budget: HardwareBudget) -> ResourceEstimate:
    layers = tuple(mem_total(dp, layer, budget) for layer in net)
    mu = min(lr.m_delta for lr in layers)
    return ResourceEstimate(layers, mu, dp.r_sa * dp.c_sa, budget.n_dsp_avail)
