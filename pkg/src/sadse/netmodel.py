"""CNN layer descriptions and the JSON network file format."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

CONV = "convolutional"
FC = "fully-connected"
KINDS = (CONV, FC)
ACTIVATIONS = ("none", "relu", "leaky-relu", "elu")

_LAYER_KEYS = ("n_f", "r_f", "c_f", "r", "c", "ch", "s", "pad", "kind", "activation")
_REQUIRED_KEYS = ("n_f", "r_f", "c_f", "r", "c", "ch")
_INT_KEYS = ("n_f", "r_f", "c_f", "r", "c", "ch", "s", "pad")


class NetworkError(ValueError):
    """Raised for malformed or inconsistent network descriptions."""


class ChainWarning(UserWarning):
    """Adjacent layers do not chain (channel or spatial mismatch)."""


@dataclass(frozen=True)
class Activation:
    kind: str = "none"
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ACTIVATIONS:
            raise NetworkError(f"unknown activation {self.kind!r}")
        if self.kind in ("leaky-relu", "elu") and self.param is None:
            # common defaults: leaky slope 0.1 (darknet), elu alpha 1
            object.__setattr__(self, "param", 0.1 if self.kind == "leaky-relu" else 1.0)
        if self.kind in ("none", "relu") and self.param is not None:
            raise NetworkError(f"activation {self.kind!r} takes no parameter")

    @classmethod
    def from_json(cls, obj) -> "Activation":
        if obj is None:
            return cls()
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, dict):
            extra = set(obj) - {"type", "slope", "alpha"}
            if extra or "type" not in obj:
                raise NetworkError(f"bad activation object {obj!r}")
            kind = obj["type"]
            param = obj.get("slope", obj.get("alpha"))
            if param is not None and (isinstance(param, bool) or not isinstance(param, (int, float))):
                raise NetworkError(f"activation parameter must be numeric, got {param!r}")
            return cls(kind, None if param is None else float(param))
        raise NetworkError(f"bad activation {obj!r}")

    def to_json(self):
        if self.kind == "leaky-relu":
            return {"type": self.kind, "slope": self.param}
        if self.kind == "elu":
            return {"type": self.kind, "alpha": self.param}
        return self.kind


@dataclass(frozen=True)
class LayerSpec:
    """One CNN layer.

    ``r``, ``c``, ``ch`` describe the input feature map, ``n_f`` filters of
    ``r_f x c_f`` are applied, and ``s`` is the pooling stride (1 = no pooling).
    """

    index: int
    n_f: int
    r_f: int
    c_f: int
    r: int
    c: int
    ch: int
    s: int = 1
    pad: int = 0
    kind: str = CONV
    activation: Activation = field(default_factory=Activation)

    def __post_init__(self):
        for name in ("index",) + _INT_KEYS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise NetworkError(f"layer {self.index}: {name} must be an integer, got {value!r}")
            lower = 0 if name == "pad" else 1
            if value < lower:
                raise NetworkError(f"layer {self.index}: {name}={value} must be >= {lower}")
        if self.kind not in KINDS:
            raise NetworkError(f"layer {self.index}: unknown kind {self.kind!r}")
        if self.r + 2 * self.pad < self.r_f:
            raise NetworkError(f"layer {self.index}: r_f={self.r_f} exceeds padded rows {self.r + 2 * self.pad}")
        if self.c + 2 * self.pad < self.c_f:
            raise NetworkError(f"layer {self.index}: c_f={self.c_f} exceeds padded cols {self.c + 2 * self.pad}")

    @property
    def d_h(self) -> int:
        return self.r + 2 * self.pad - self.r_f + 1

    @property
    def d_v(self) -> int:
        return self.c + 2 * self.pad - self.c_f + 1

    def to_json(self) -> dict:
        return {
            "n_f": self.n_f, "r_f": self.r_f, "c_f": self.c_f,
            "r": self.r, "c": self.c, "ch": self.ch,
            "s": self.s, "pad": self.pad, "kind": self.kind,
            "activation": self.activation.to_json(),
        }


def slide_counts(layer: LayerSpec) -> Tuple[int, int]:
    """Number of filter positions along rows and columns of one channel."""
    return layer.d_h, layer.d_v


@dataclass(frozen=True)
class NetworkModel:
    layers: Tuple[LayerSpec, ...]
    name: str = "network"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise NetworkError("network has no layers")
        for i, layer in enumerate(self.layers, start=1):
            if layer.index != i:
                raise NetworkError(f"layer indices must be contiguous from 1, got {layer.index} at position {i}")

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __getitem__(self, i):
        return self.layers[i]

    @property
    def max_r_f(self) -> int:
        return max(layer.r_f for layer in self.layers)

    def chain_mismatches(self):
        """Messages for adjacent layers that do not chain."""
        out = []
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.ch != prev.n_f:
                out.append(f"layer {nxt.index}: ch={nxt.ch} but layer {prev.index} has n_f={prev.n_f}")
            rows = -(-prev.d_h // prev.s)
            cols = -(-prev.d_v // prev.s)
            if (nxt.r, nxt.c) != (rows, cols):
                out.append(
                    f"layer {nxt.index}: input {nxt.r}x{nxt.c} but layer {prev.index} "
                    f"produces {rows}x{cols}"
                )
        return out

    def to_json(self) -> dict:
        return {"name": self.name, "layers": [layer.to_json() for layer in self.layers]}


def layer_from_json(obj, index: int) -> LayerSpec:
    if not isinstance(obj, dict):
        raise NetworkError(f"layer {index}: expected an object")
    unknown = set(obj) - set(_LAYER_KEYS)
    if unknown:
        raise NetworkError(f"layer {index}: unknown keys {sorted(unknown)}")
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise NetworkError(f"layer {index}: missing fields {missing}")
    kwargs = {k: obj[k] for k in _INT_KEYS if k in obj}
    return LayerSpec(
        index=index,
        kind=obj.get("kind", CONV),
        activation=Activation.from_json(obj.get("activation")),
        **kwargs,
    )


def network_from_json(doc) -> NetworkModel:
    if not isinstance(doc, dict):
        raise NetworkError("network document must be a JSON object")
    unknown = set(doc) - {"name", "layers"}
    if unknown:
        raise NetworkError(f"unknown top-level keys {sorted(unknown)}")
    if "layers" not in doc or not isinstance(doc["layers"], list):
        raise NetworkError("missing 'layers' list")
    name = doc.get("name", "network")
    if not isinstance(name, str):
        raise NetworkError("'name' must be a string")
    layers = [layer_from_json(obj, i) for i, obj in enumerate(doc["layers"], start=1)]
    net = NetworkModel(tuple(layers), name)
    for msg in net.chain_mismatches():
        warnings.warn(msg, ChainWarning, stacklevel=3)
    return net


def parse_network(text: str) -> NetworkModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"malformed network document: {exc}") from exc
    return network_from_json(doc)


def serialize_network(net: NetworkModel) -> str:
    return json.dumps(net.to_json(), indent=2) + "\n"


def load_network(path: Union[str, Path]) -> NetworkModel:
    return parse_network(Path(path).read_text(encoding="utf-8"))
