"""Candidate model sets: supports harvested from solution paths or enumerated."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooLarge
from .fitting import PenaltySpec, default_lambda_grid, penalized_path

ALL_SUBSETS_MAX_P = 20


def complexity(s, p):
    """Description-length prior C = s log(e p / s) + 2 log(s + 2); 2 log 2 at s = 0."""
    if s == 0:
        return 2 * math.log(2)
    return s * math.log(math.e * p / s) + 2 * math.log(s + 2)


@dataclass(frozen=True)
class CandidateModel:
    support: tuple
    p: int

    def __post_init__(self):
        support = tuple(sorted(int(j) for j in self.support))
        if len(set(support)) != len(support):
            raise ValueError(f"duplicate indices in support {support}")
        if support and (support[0] < 0 or support[-1] >= self.p):
            raise ValueError(f"support {support} outside [0, {self.p})")
        object.__setattr__(self, "support", support)

    @property
    def size(self):
        return len(self.support)

    @property
    def complexity(self):
        return complexity(self.size, self.p)

    def __contains__(self, j):
        return j in self.support


def _order_key(support):
    return (len(support), support)


@dataclass(frozen=True)
class CandidateSet:
    models: tuple
    p: int

    @classmethod
    def from_supports(cls, supports, p):
        uniq = {tuple(sorted(int(j) for j in s)) for s in supports}
        models = tuple(CandidateModel(s, p) for s in sorted(uniq, key=_order_key))
        return cls(models, p)

    @property
    def supports(self):
        return [m.support for m in self.models]

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __getitem__(self, k):
        return self.models[k]

    def indicator(self):
        """(K, p) 0/1 membership matrix."""
        M = np.zeros((len(self.models), self.p))
        for k, m in enumerate(self.models):
            M[k, list(m.support)] = 1.0
        return M

    def index(self, support):
        support = tuple(sorted(support))
        for k, m in enumerate(self.models):
            if m.support == support:
                return k
        return None


def extract_supports(path, p):
    """One candidate per distinct nonzero pattern along a solution path."""
    return CandidateSet.from_supports((np.flatnonzero(c) for c in path.coefs), p)


def merge_sets(sets, max_support_size=None):
    """Union of candidate sets, deduplicated; models above the size cap are dropped."""
    sets = list(sets)
    if not sets:
        raise ValueError("nothing to merge")
    p = sets[0].p
    if any(s.p != p for s in sets):
        raise DimensionMismatch("candidate sets disagree on p")
    supports = [m.support for s in sets for m in s]
    if max_support_size is not None:
        supports = [s for s in supports if len(s) <= max_support_size]
    return CandidateSet.from_supports(supports, p)


def all_subsets(p):
    if p > ALL_SUBSETS_MAX_P:
        raise TooLarge(f"all-subsets enumeration refused for p={p} > {ALL_SUBSETS_MAX_P}")
    supports = [c for s in range(p + 1) for c in itertools.combinations(range(p), s)]
    return CandidateSet.from_supports(supports, p)


def default_max_support_size(n):
    return n // 2 - 2


def build_candidates(data, penalties=("lasso", "scad", "mcp"), n_lambda=100,
                     max_support_size=None, all_subsets_max_p=10):
    """Candidate set used by the experiments.

    All subsets when ``p <= all_subsets_max_p``; otherwise the merged
    solution paths of ``penalties`` with the size cap ``n // 2 - 2``.
    """
    if data.p <= all_subsets_max_p:
        return all_subsets(data.p)
    if max_support_size is None:
        max_support_size = default_max_support_size(data.n)
    grid = tuple(default_lambda_grid(data, n_lambda))
    sets = [extract_supports(penalized_path(data, PenaltySpec(kind, lambda_grid=grid)), data.p)
            for kind in penalties]
    return merge_sets(sets, max_support_size)
