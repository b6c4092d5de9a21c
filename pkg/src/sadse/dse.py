"""Enumerate, filter and rank design points."""
from __future__ import annotations

import collections
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .designspace import (DesignPoint, ExplorationParams, TraversalOrder,
                          enumerate_points)
from .netmodel import NetworkModel
from .perfmodel import PerfEstimate, perf
from .resources import HardwareBudget, ResourceEstimate, assess


@dataclass(frozen=True)
class EvaluatedPoint:
    point: DesignPoint
    resources: ResourceEstimate
    perf: Optional[PerfEstimate] = None
    rank: Optional[int] = None
    rank_in_traversal: Optional[int] = None

    @property
    def feasible(self) -> bool:
        return self.resources.feasible

    @property
    def t_total(self) -> Optional[int]:
        return None if self.perf is None else self.perf.t_total

    def sort_key(self):
        return (self.perf.t_total, self.resources.n_dsp, self.resources.worst_m_t, self.point.id)

    def objectives(self) -> Tuple[int, int, int]:
        return (self.perf.t_total, self.resources.n_dsp, self.resources.worst_m_t)

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "resources": self.resources.to_json(),
            "perf": None if self.perf is None else self.perf.to_json(),
            "rank": self.rank,
            "rank_in_traversal": self.rank_in_traversal,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EvaluatedPoint":
        return cls(
            DesignPoint.from_json(obj["point"]),
            ResourceEstimate.from_json(obj["resources"]),
            PerfEstimate.from_json(obj["perf"]),
            obj["rank"],
            obj["rank_in_traversal"],
        )


@dataclass(frozen=True)
class ExplorationReport:
    network: str
    budget: HardwareBudget
    params: ExplorationParams
    points: Tuple[EvaluatedPoint, ...]
    perf_all: bool = False

    @property
    def feasible(self) -> List[EvaluatedPoint]:
        return [ep for ep in self.points if ep.feasible]

    def ranked(self, traversal: Optional[TraversalOrder] = None) -> List[EvaluatedPoint]:
        pts = [ep for ep in self.points if ep.rank is not None]
        if traversal is None:
            return sorted(pts, key=lambda ep: ep.rank)
        pts = [ep for ep in pts if ep.point.traversal is traversal]
        return sorted(pts, key=lambda ep: ep.rank_in_traversal)

    @property
    def best(self) -> Optional[EvaluatedPoint]:
        ranked = self.ranked()
        return ranked[0] if ranked else None

    def best_by_traversal(self) -> Dict[TraversalOrder, Optional[EvaluatedPoint]]:
        out = {}
        for trav in self.params.traversals:
            ranked = self.ranked(trav)
            out[trav] = ranked[0] if ranked else None
        return out

    def point(self, point_id: int) -> EvaluatedPoint:
        for ep in self.points:
            if ep.point.id == point_id:
                return ep
        raise KeyError(f"unknown point id {point_id}")

    def binding_constraints(self) -> Dict[str, int]:
        """How many points fail each constraint (a point may fail both)."""
        hist = collections.Counter({"dsp": 0, "memory": 0})
        for ep in self.points:
            for v in ep.resources.violations():
                hist[v["constraint"]] += 1
        return dict(sorted(hist.items()))

    def to_json(self) -> dict:
        best = self.best
        return {
            "network": self.network,
            "budget": self.budget.to_json(),
            "params": self.params.to_json(),
            "perf_all": self.perf_all,
            "n_points": len(self.points),
            "n_feasible": len(self.feasible),
            "best": None if best is None else best.point.id,
            "best_by_traversal": {
                t.value: (None if ep is None else ep.point.id) for t, ep in self.best_by_traversal().items()
            },
            "binding_constraints": self.binding_constraints(),
            "points": [ep.to_json() for ep in self.points],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExplorationReport":
        return cls(
            obj["network"],
            HardwareBudget.from_json(obj["budget"]),
            ExplorationParams.from_json(obj["params"]),
            tuple(EvaluatedPoint.from_json(ep) for ep in obj["points"]),
            obj["perf_all"],
        )


def _evaluate(args) -> EvaluatedPoint:
    dp, net, budget, perf_all = args
    res = assess(dp, net, budget)
    pe = perf(dp, net, budget) if (res.feasible or perf_all) else None
    return EvaluatedPoint(dp, res, pe)


def rank(points: Sequence[EvaluatedPoint]) -> List[EvaluatedPoint]:
    """Order by cycles, then DSPs, then worst-layer memory, then id."""
    return sorted(points, key=EvaluatedPoint.sort_key)


def pareto(points: Sequence[EvaluatedPoint]) -> List[EvaluatedPoint]:
    """Non-dominated points under (cycles, DSPs, worst-layer memory), all minimized.

    Points with identical objectives collapse to the best-ranked one.
    """
    front = []
    seen = set()
    for ep in rank(points):
        obj = ep.objectives()
        if obj in seen:
            continue
        dominated = any(
            all(a <= b for a, b in zip(other.objectives(), obj)) for other in front
        )
        if not dominated:
            front.append(ep)
            seen.add(obj)
    return front


def explore(net: NetworkModel, budget: HardwareBudget, params: ExplorationParams = ExplorationParams(),
            perf_all: bool = False, n_jobs: int = 1) -> ExplorationReport:
    """Assess every point; estimate cycles for feasible ones and rank them.

    Infeasible points stay in the report with their violations. With
    ``perf_all`` their cycles are computed as well, but they are never ranked.
    """
    points = enumerate_points(net, params)
    jobs = [(dp, net, budget, perf_all) for dp in points]
    if n_jobs == 1:
        evaluated = [_evaluate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=None if n_jobs < 1 else n_jobs) as pool:
            # map preserves enumeration order regardless of scheduling
            evaluated = list(pool.map(_evaluate, jobs, chunksize=16))

    ranks = {}
    for i, ep in enumerate(rank([ep for ep in evaluated if ep.feasible]), 1):
        ranks[ep.point.id] = [i, None]
    for trav in params.traversals:
        subset = [ep for ep in evaluated if ep.feasible and ep.point.traversal is trav]
        for i, ep in enumerate(rank(subset), 1):
            ranks[ep.point.id][1] = i
    evaluated = [
        replace(ep, rank=ranks[ep.point.id][0], rank_in_traversal=ranks[ep.point.id][1])
        if ep.point.id in ranks else ep
        for ep in evaluated
    ]
    return ExplorationReport(net.name, budget, params, tuple(evaluated), perf_all)
