"""scikit-learn style wrapper around the exploration engine."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .designspace import BOTH, PAPER_RESULTS, ExplorationParams, TraversalOrder
from .dse import explore, pareto
from .resources import HardwareBudget
from .validation import check_network

FEATURE_NAMES = (
    "id", "featuremap_reuse", "r_t", "c_sa", "ch_sa", "r_sa", "n_dsp",
    "mu_words", "worst_layer_m_t_words", "t_total_cycles", "feasible", "rank",
)

_TRAVERSALS = {
    "both": BOTH,
    "featuremap": (TraversalOrder.FEATURE_MAP_REUSE,),
    "filter": (TraversalOrder.FILTER_REUSE,),
}


class SystolicDSE(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Design-space explorer for systolic-array CNN accelerators.

    ``fit(X)`` explores the design space of network ``X`` against the
    hardware budget given by the constructor parameters. ``transform(X)``
    returns one row per design point (see ``FEATURE_NAMES``), and
    ``predict(X)`` returns the estimated total cycles per point (NaN where
    not estimated).

    Parameters
    ----------
    n_dsp, m_bram_bits, word_bits, w_words_per_cycle : int
        Hardware budget; defaults describe an Artix-7 class device.
    F, P, Q, R : int
        Tile-bound divisor and the number of tile sizes, array column
        counts and parallel-channel counts to enumerate.
    traversal : {"both", "featuremap", "filter"}
    gen_rule : {"paper-results", "paper-equations"}
    perf_all : bool
        Estimate cycles for infeasible points as well.
    n_jobs : int
        Worker processes for evaluation; results do not depend on it.
    """

    def __init__(self, n_dsp=220, m_bram_bits=5_017_600, word_bits=16, w_words_per_cycle=1,
                 F=4, P=6, Q=4, R=4, traversal="both", gen_rule=PAPER_RESULTS,
                 perf_all=False, n_jobs=1):
        self.n_dsp = n_dsp
        self.m_bram_bits = m_bram_bits
        self.word_bits = word_bits
        self.w_words_per_cycle = w_words_per_cycle
        self.F = F
        self.P = P
        self.Q = Q
        self.R = R
        self.traversal = traversal
        self.gen_rule = gen_rule
        self.perf_all = perf_all
        self.n_jobs = n_jobs

    def _budget(self) -> HardwareBudget:
        return HardwareBudget(self.n_dsp, self.m_bram_bits, self.word_bits, self.w_words_per_cycle)

    def _params(self) -> ExplorationParams:
        if self.traversal not in _TRAVERSALS:
            raise ValueError(f"traversal must be one of {sorted(_TRAVERSALS)}, got {self.traversal!r}")
        return ExplorationParams(self.F, self.P, self.Q, self.R, _TRAVERSALS[self.traversal], self.gen_rule)

    def _explore(self, X):
        return explore(check_network(X), self._budget(), self._params(),
                       perf_all=self.perf_all, n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        report = self._explore(X)
        self.report_ = report
        self.network_ = check_network(X)
        self.feasible_mask_ = np.array([ep.feasible for ep in report.points], dtype=bool)
        self.best_ = report.best
        self.best_by_traversal_ = report.best_by_traversal()
        self.n_points_ = len(report.points)
        return self

    @staticmethod
    def _rows(report) -> np.ndarray:
        out = np.full((len(report.points), len(FEATURE_NAMES)), np.nan)
        for i, ep in enumerate(report.points):
            dp = ep.point
            out[i] = (
                dp.id, dp.traversal is TraversalOrder.FEATURE_MAP_REUSE, dp.tile.nominal,
                dp.c_sa, dp.ch_sa, dp.r_sa, ep.resources.n_dsp, ep.resources.mu,
                ep.resources.worst_m_t,
                np.nan if ep.t_total is None else ep.t_total,
                ep.feasible,
                np.nan if ep.rank is None else ep.rank,
            )
        return out

    def transform(self, X=None):
        check_is_fitted(self, "report_")
        report = self.report_ if X is None else self._explore(X)
        return self._rows(report)

    def predict(self, X=None):
        return self.transform(X)[:, FEATURE_NAMES.index("t_total_cycles")]

    def pareto_front(self):
        """Ids of the non-dominated feasible points."""
        check_is_fitted(self, "report_")
        return [ep.point.id for ep in pareto(self.report_.feasible)]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)
