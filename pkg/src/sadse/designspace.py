"""Design-point generation: tile schedules, array shapes, channel parallelism."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .netmodel import NetworkModel

# generator rules
PAPER_RESULTS = "paper-results"        # geometric: halving tiles, powers of two
PAPER_EQUATIONS = "paper-equations"    # linear: r(1)/(p*F), 2*q, 2*r
GEN_RULES = (PAPER_RESULTS, PAPER_EQUATIONS)


class TraversalOrder(enum.Enum):
    """Which operand stays resident while the other streams through."""

    FEATURE_MAP_REUSE = "featuremap"
    FILTER_REUSE = "filter"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "TraversalOrder":
        if isinstance(value, cls):
            return value
        return cls(value)


BOTH = (TraversalOrder.FEATURE_MAP_REUSE, TraversalOrder.FILTER_REUSE)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class TileSchedule:
    p: int
    r_t: Tuple[int, ...]
    c_t: Tuple[int, ...]

    @property
    def nominal(self) -> int:
        """Rows of the first-layer tile."""
        return self.r_t[0]

    def rows(self, layer_index: int) -> int:
        return self.r_t[layer_index - 1]

    def cols(self, layer_index: int) -> int:
        return self.c_t[layer_index - 1]


@dataclass(frozen=True)
class DesignPoint:
    id: int
    tile: TileSchedule
    c_sa: int
    ch_sa: int
    r_sa: int
    traversal: TraversalOrder
    q: int = 1
    r: int = 1

    @property
    def p(self) -> int:
        return self.tile.p

    @property
    def n_dsp(self) -> int:
        return self.r_sa * self.c_sa

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "traversal": self.traversal.value,
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "r_t": list(self.tile.r_t),
            "c_t": list(self.tile.c_t),
            "c_sa": self.c_sa,
            "ch_sa": self.ch_sa,
            "r_sa": self.r_sa,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DesignPoint":
        tile = TileSchedule(obj["p"], tuple(obj["r_t"]), tuple(obj["c_t"]))
        return cls(obj["id"], tile, obj["c_sa"], obj["ch_sa"], obj["r_sa"],
                   TraversalOrder(obj["traversal"]), obj["q"], obj["r"])


@dataclass(frozen=True)
class ExplorationParams:
    F: int = 4
    P: int = 6
    Q: int = 4
    R: int = 4
    traversals: Tuple[TraversalOrder, ...] = BOTH
    gen_rule: str = PAPER_RESULTS

    def __post_init__(self):
        for name in ("F", "P", "Q", "R"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.gen_rule not in GEN_RULES:
            raise ValueError(f"gen_rule must be one of {GEN_RULES}, got {self.gen_rule!r}")
        travs = tuple(TraversalOrder.parse(t) for t in self.traversals)
        if not travs or len(set(travs)) != len(travs):
            raise ValueError("traversals must be a non-empty set of TraversalOrder")
        object.__setattr__(self, "traversals", travs)

    @property
    def n_points(self) -> int:
        return self.P * self.Q * self.R * len(self.traversals)

    def to_json(self) -> dict:
        return {"F": self.F, "P": self.P, "Q": self.Q, "R": self.R,
                "traversals": [t.value for t in self.traversals],
                "gen_rule": self.gen_rule}

    @classmethod
    def from_json(cls, obj: dict) -> "ExplorationParams":
        return cls(obj["F"], obj["P"], obj["Q"], obj["R"],
                   tuple(TraversalOrder(t) for t in obj["traversals"]), obj["gen_rule"])


def nominal_tile_rows(r1: int, F: int, p: int, gen_rule: str = PAPER_RESULTS) -> int:
    if gen_rule == PAPER_RESULTS:
        return _ceil_div(r1, F * 2 ** (p - 1))
    return _ceil_div(r1, p * F)


def gen_tile_schedules(net: NetworkModel, F: int, P: int, gen_rule: str = PAPER_RESULTS) -> List[TileSchedule]:
    """P tile schedules; schedule p clamps its nominal row count to each layer."""
    r1 = net.layers[0].r
    out = []
    for p in range(1, P + 1):
        nominal = nominal_tile_rows(r1, F, p, gen_rule)
        assert nominal >= 1
        out.append(TileSchedule(
            p=p,
            r_t=tuple(min(nominal, layer.r) for layer in net),
            c_t=tuple(layer.c for layer in net),
        ))
    return out


def gen_sa_columns(Q: int, gen_rule: str = PAPER_RESULTS) -> List[int]:
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if gen_rule == PAPER_RESULTS:
        return [2 ** q for q in range(1, Q + 1)]
    return [2 * q for q in range(1, Q + 1)]


def gen_sa_channels(R: int, gen_rule: str = PAPER_RESULTS) -> List[int]:
    if R < 1:
        raise ValueError("R must be >= 1")
    if gen_rule == PAPER_RESULTS:
        return [2 ** r for r in range(1, R + 1)]
    return [2 * r for r in range(1, R + 1)]


def sa_rows(ch_sa: int, net: NetworkModel) -> int:
    # each column stacks one filter-row tap per parallel channel
    return ch_sa * net.max_r_f


def enumerate_points(net: NetworkModel, params: ExplorationParams) -> List[DesignPoint]:
    """Cross product of tiles x columns x channels, once per traversal order.

    Points come out traversal-major, then (p, q, r) lexicographic, with ids
    0, 1, 2, ... in that order.
    """
    tiles = gen_tile_schedules(net, params.F, params.P, params.gen_rule)
    cols = gen_sa_columns(params.Q, params.gen_rule)
    chans = gen_sa_channels(params.R, params.gen_rule)
    points = []
    for trav in params.traversals:
        for tile, (q, c_sa), (r, ch_sa) in itertools.product(tiles, enumerate(cols, 1), enumerate(chans, 1)):
            points.append(DesignPoint(
                id=len(points), tile=tile, c_sa=c_sa, ch_sa=ch_sa,
                r_sa=sa_rows(ch_sa, net), traversal=trav, q=q, r=r,
            ))
    return points


def single_point(net: NetworkModel, r_t: Sequence[int] | int, c_sa: int, ch_sa: int,
                 traversal=TraversalOrder.FEATURE_MAP_REUSE, id: int = 0) -> DesignPoint:
    """Hand-built design point, e.g. for simulation or one-off estimates."""
    if isinstance(r_t, int):
        r_t = [min(r_t, layer.r) for layer in net]
    if len(r_t) != len(net):
        raise ValueError(f"need one r_t per layer ({len(net)}), got {len(r_t)}")
    tile = TileSchedule(1, tuple(r_t), tuple(layer.c for layer in net))
    return DesignPoint(id, tile, c_sa, ch_sa, sa_rows(ch_sa, net), TraversalOrder.parse(traversal))
