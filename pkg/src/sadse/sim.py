"""Functional simulation of the tiled systolic-array dataflow.

Tensors are numpy arrays: feature maps are ``(channels, rows, cols)`` and
filter banks ``(n_f, ch, r_f, c_f)``. The simulator is not cycle accurate.
It executes the tile / filter-group / channel-group loop nest of the chosen
traversal order. It counts DRAM words and MACs, and it produces the output
feature map, which must match :func:`reference_layer`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .designspace import DesignPoint, TraversalOrder
from .netmodel import Activation, LayerSpec


def activation(x, kind: Union[str, Activation] = "none", param: Optional[float] = None):
    """Apply an activation to a scalar or array."""
    if isinstance(kind, Activation):
        kind, param = kind.kind, kind.param
    if kind == "none":
        return x
    if kind == "relu":
        return np.maximum(x, 0) if isinstance(x, np.ndarray) else max(0, x)
    if kind == "leaky-relu":
        slope = 0.1 if param is None else param
        if isinstance(x, np.ndarray):
            return np.where(x >= 0, x, slope * x)
        return x if x >= 0 else slope * x
    if kind == "elu":
        alpha = 1.0 if param is None else param
        if isinstance(x, np.ndarray):
            return np.where(x >= 0, x, alpha * np.expm1(np.minimum(x, 0)))
        return x if x >= 0 else alpha * math.expm1(x)
    raise ValueError(f"unknown activation {kind!r}")


def maxpool(plane, s: int) -> np.ndarray:
    """Non-overlapping s x s max pooling; edge windows cover what is left."""
    if s < 1:
        raise ValueError("pool stride must be >= 1")
    plane = np.asarray(plane)
    if s == 1:
        return plane.copy()
    rows, cols = plane.shape
    out = np.empty((-(-rows // s), -(-cols // s)), dtype=plane.dtype)
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            out[i, j] = plane[i * s:(i + 1) * s, j * s:(j + 1) * s].max()
    return out


def _check_shapes(layer: LayerSpec, ifm: np.ndarray, filters: np.ndarray):
    if ifm.shape != (layer.ch, layer.r, layer.c):
        raise ValueError(f"IFM shape {ifm.shape} != {(layer.ch, layer.r, layer.c)}")
    if filters.shape != (layer.n_f, layer.ch, layer.r_f, layer.c_f):
        raise ValueError(f"filter bank shape {filters.shape} != {(layer.n_f, layer.ch, layer.r_f, layer.c_f)}")


def _pad(layer: LayerSpec, ifm: np.ndarray) -> np.ndarray:
    p = layer.pad
    return np.pad(ifm, ((0, 0), (p, p), (p, p))) if p else ifm


def _finish(layer: LayerSpec, conv: np.ndarray, apply_activation: bool) -> np.ndarray:
    pooled = np.stack([maxpool(plane, layer.s) for plane in conv])
    return activation(pooled, layer.activation) if apply_activation else pooled


def reference_layer(layer: LayerSpec, ifm, filters, apply_activation: bool = True) -> np.ndarray:
    """Direct convolution, max-pool, then activation. No tiling."""
    ifm = np.asarray(ifm)
    filters = np.asarray(filters)
    _check_shapes(layer, ifm, filters)
    x = _pad(layer, ifm)
    dtype = np.result_type(ifm, filters)
    conv = np.zeros((layer.n_f, layer.d_h, layer.d_v), dtype=dtype)
    for f in range(layer.n_f):
        for i in range(layer.d_h):
            for j in range(layer.d_v):
                conv[f, i, j] = (x[:, i:i + layer.r_f, j:j + layer.c_f] * filters[f]).sum()
    return _finish(layer, conv, apply_activation)


@dataclass
class SimResult:
    ofm: np.ndarray
    counts: Dict[str, int]
    trace: List[Tuple] = field(default_factory=list)

    def trace_lines(self) -> List[str]:
        return [",".join("-" if v is None else str(v) for v in ev) for ev in self.trace]


def _groups(n: int, size: int) -> List[range]:
    return [range(lo, min(lo + size, n)) for lo in range(0, n, size)]


class _Layer:
    """Mutable state of one simulated layer: buffers, AB contents, counters."""

    def __init__(self, layer, dp, ifm, filters, record):
        self.layer = layer
        self.x = _pad(layer, ifm)
        self.w = filters
        self.r_t = dp.tile.rows(layer.index)
        self.tiles = _groups(layer.r, self.r_t)
        self.fgroups = _groups(layer.n_f, dp.c_sa)
        self.cgroups = _groups(layer.ch, dp.ch_sa)
        # output row -> owning tile (rows past the last tile go to the last one)
        self.owner = [min(o // self.r_t, len(self.tiles) - 1) for o in range(layer.d_h)]
        self.rows_of = [[o for o in range(layer.d_h) if self.owner[o] == b] for b in range(len(self.tiles))]
        self.acc = np.zeros((layer.n_f, layer.d_h, layer.d_v), dtype=np.result_type(ifm, filters))
        self.counts = {"ifm_words_fetched": 0, "weight_words_fetched": 0,
                       "ofm_words_written": 0, "macs_executed": 0}
        self.trace = [] if record else None
        self.plane_words = -(-layer.d_h * layer.d_v // layer.s ** 2)

    def _log(self, kind, b, a, g, words):
        if self.trace is not None:
            self.trace.append((kind, self.layer.index, b, a, g, words))

    def fetch_tile(self, b, g, a=None):
        words = len(self.tiles[b]) * self.layer.c * len(self.cgroups[g])
        self.counts["ifm_words_fetched"] += words
        self._log("ifm_fetch", b, a, g, words)

    def fetch_weights(self, a, g, b=None):
        words = len(self.fgroups[a]) * len(self.cgroups[g]) * self.layer.r_f * self.layer.c_f
        self.counts["weight_words_fetched"] += words
        self._log("weight_fetch", b, a, g, words)

    def flush(self, a, b):
        # the PAB FIFO drains one pooled plane per (filter group, tile) pass
        self.counts["ofm_words_written"] += self.plane_words
        self._log("ofm_write", b, a, None, self.plane_words)

    def compute(self, a, g, b):
        """One systolic pass: filter group a, channel group g, output rows of tile b.

        Each array column serves one filter. Operands stream through the
        column's PEs (one per channel x filter row) and the partial sum is
        accumulated PE by PE. Filter columns take separate passes and are
        summed in the accumulation block.
        """
        rows = self.rows_of[b]
        if not rows:
            return
        L = self.layer
        o = np.asarray(rows)
        for f in self.fgroups[a]:
            for kc in range(L.c_f):
                psum = np.zeros((len(rows), L.d_v), dtype=self.acc.dtype)
                for ch in self.cgroups[g]:
                    for kr in range(L.r_f):
                        operand = self.x[ch, o + kr, kc:kc + L.d_v]
                        psum = psum + operand * self.w[f, ch, kr, kc]
                        self.counts["macs_executed"] += psum.size
                self.acc[f, o, :] += psum


def simulate_layer(layer: LayerSpec, dp: DesignPoint, ifm, filters, trace: bool = False,
                   apply_activation: bool = True, _corrupt_weights: bool = False) -> SimResult:
    """Run one layer through the tiled dataflow of ``dp``.

    Fetch multiplicities follow the traversal order: feature-map reuse loads
    every (tile, channel group) once and a weight set per (filter group,
    channel group, tile); filter reuse loads every tile once per filter group
    and a weight set once per (tile, channel group).
    ``_corrupt_weights`` flips filter taps and exists only as a negative
    control for the checker.
    """
    ifm = np.asarray(ifm)
    filters = np.asarray(filters)
    _check_shapes(layer, ifm, filters)
    r_t = dp.tile.rows(layer.index)
    if r_t < 1:
        raise ValueError(f"tile rows {r_t} cannot cover layer {layer.index}")
    if dp.ch_sa < 1 or dp.c_sa < 1:
        raise ValueError("channel grouping must cover ch")
    if _corrupt_weights:
        filters = filters[:, :, ::-1, ::-1]

    st = _Layer(layer, dp, ifm, filters, trace)
    nA, nB, nG = len(st.fgroups), len(st.tiles), len(st.cgroups)
    if dp.traversal is TraversalOrder.FEATURE_MAP_REUSE:
        for b in range(nB):
            for g in range(nG):
                st.fetch_tile(b, g)
                for a in range(nA):
                    st.fetch_weights(a, g, b)
                    st.compute(a, g, b)
            for a in range(nA):
                st.flush(a, b)
    else:
        for g in range(nG):
            for b in range(nB):
                st.fetch_weights(0, g, b)
                for a in range(nA):
                    st.fetch_tile(b, g, a)
                    st.compute(a, g, b)
                    if g == nG - 1:
                        st.flush(a, b)

    ofm = _finish(layer, st.acc, apply_activation)
    return SimResult(ofm, st.counts, st.trace or [])
