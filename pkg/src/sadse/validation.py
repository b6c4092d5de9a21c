"""Input coercion for the estimator API.

Accepts the forms users tend to have at hand and turns them into the
package's immutable model objects.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .netmodel import (LayerSpec, NetworkError, NetworkModel, load_network,
                       network_from_json, parse_network)
from .resources import HardwareBudget, load_budget

# column order for array-form networks; trailing s and pad are optional
ARRAY_COLUMNS = ("n_f", "r_f", "c_f", "r", "c", "ch", "s", "pad")


def check_network(X, name: str = "network") -> NetworkModel:
    """Coerce ``X`` into a :class:`NetworkModel`.

    ``X`` may be a NetworkModel, a parsed JSON dict, a JSON string, a path to
    a network file, or a 2-D integer array with one row per layer and
    columns ``n_f, r_f, c_f, r, c, ch[, s[, pad]]``.
    """
    if isinstance(X, NetworkModel):
        return X
    if isinstance(X, dict):
        return network_from_json(X)
    if isinstance(X, (str, os.PathLike)):
        text = str(X)
        if isinstance(X, str) and text.lstrip().startswith("{"):
            return parse_network(text)
        return load_network(Path(X))

    arr = np.asarray(X)
    if arr.ndim == 1 and arr.size:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise NetworkError(f"expected a 2-D array of layers, got shape {arr.shape}")
    if not 6 <= arr.shape[1] <= len(ARRAY_COLUMNS):
        raise NetworkError(f"expected 6 to {len(ARRAY_COLUMNS)} columns {ARRAY_COLUMNS}, got {arr.shape[1]}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise NetworkError("array-form network must hold integers")
        arr = arr.astype(np.int64)
    layers = []
    for i, row in enumerate(arr, start=1):
        kwargs = {k: int(v) for k, v in zip(ARRAY_COLUMNS, row)}
        layers.append(LayerSpec(index=i, **kwargs))
    return NetworkModel(tuple(layers), name)


def check_budget(budget) -> HardwareBudget:
    if isinstance(budget, HardwareBudget):
        return budget
    if isinstance(budget, dict):
        return HardwareBudget.from_json(budget)
    if isinstance(budget, (str, os.PathLike)):
        if isinstance(budget, str) and budget.lstrip().startswith("{"):
            return HardwareBudget.from_json(json.loads(budget))
        return load_budget(budget)
    raise TypeError(f"cannot interpret {type(budget).__name__} as a hardware budget")
