"""SOIL importances, threshold selection and selection-error counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadThreshold, LengthMismatch


@dataclass(frozen=True, eq=False)
class ImportanceVector:
    values: np.ndarray
    names: tuple = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        names = self.names or tuple(f"X{j + 1}" for j in range(len(v)))
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "names", tuple(names))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]


@dataclass(frozen=True)
class SelectionReport:
    selected: tuple
    threshold: float
    missed_true: int = None
    over_selected: int = None

    @property
    def symmetric_difference(self):
        if self.missed_true is None:
            return None
        return self.missed_true + self.over_selected


def soil(weights, cands, names=None):
    """S_j = sum_k w_k 1(j in A_k): total weight of candidates containing j."""
    w = np.asarray(weights, dtype=float)
    models = list(cands)
    if len(w) != len(models):
        raise LengthMismatch(f"{len(w)} weights for {len(models)} candidates")
    p = cands.p if hasattr(cands, "p") else models[0].p
    S = np.zeros(p)
    for wk, m in zip(w, models):
        if m.support:
            S[list(m.support)] += wk
    # clip floating slack only; anything larger is a caller bug and is left visible
    S = np.where((S < 0) & (S > -1e-12), 0.0, S)
    S = np.where((S > 1) & (S < 1 + 1e-12), 1.0, S)
    return ImportanceVector(S, names)


def threshold_select(imp, c, true_support=None):
    if not 0 < c < 1:
        raise BadThreshold(f"threshold must lie in (0, 1), got {c}")
    S = np.asarray(imp.values if isinstance(imp, ImportanceVector) else imp)
    selected = tuple(int(j) for j in np.flatnonzero(S > c))
    if true_support is None:
        return SelectionReport(selected, c)
    truth = set(int(j) for j in true_support)
    missed = sum(1 for j in truth if S[j] <= c)
    over = sum(1 for j in selected if j not in truth)
    return SelectionReport(selected, c, missed, over)


def rank_variables(imp):
    """Indices by decreasing importance, ties broken by lower index."""
    S = np.asarray(imp.values if isinstance(imp, ImportanceVector) else imp)
    return [int(j) for j in np.lexsort((np.arange(len(S)), -S))]


def weighted_symmetric_difference(weights, cands, true_support):
    """sum_k w_k |A_k symdiff A*| (the consistency functional for a weighting)."""
    truth = set(true_support)
    return float(sum(w * len(set(m.support) ^ truth) for w, m in zip(weights, cands)))
