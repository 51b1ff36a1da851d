"""Synthetic scenarios, replicated importance studies and guided cross-examination."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from .candidates import build_candidates
from .errors import BadRho, ConfigInvalid
from .fitting import Dataset, ols_fit
from .importance import rank_variables, soil, threshold_select, weighted_symmetric_difference
from .weighting import compute_weights

ADDONS = ("none", "confuser", "quadratics", "interactions")
HEADLINE_BETA = (4.0, 4.0, 4.0, -6 * math.sqrt(2), 0.75)


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    p_base: int
    beta_star: tuple
    rho: float = 0.0
    sigma2: float = 0.01
    task: str = "regression"
    addon: str = "none"
    replications: int = 100
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta_star)
        object.__setattr__(self, "beta_star", beta)
        if self.addon not in ADDONS:
            raise ConfigInvalid(f"unknown addon {self.addon!r}")
        if self.task not in ("regression", "classification"):
            raise ConfigInvalid(f"unknown task {self.task!r}")
        if not 0 <= self.rho < 1:
            raise ConfigInvalid(f"rho must lie in [0, 1), got {self.rho}")
        if self.task == "regression" and not self.sigma2 > 0:
            raise ConfigInvalid("sigma2 must be positive for regression")
        if self.n < 4 or self.p_base < 1 or self.replications < 1:
            raise ConfigInvalid("need n >= 4, p_base >= 1, replications >= 1")
        if len(beta) != self.p:
            raise ConfigInvalid(f"beta_star has {len(beta)} entries, design has {self.p} columns")
        if self.addon in ("quadratics", "interactions") and self.p_base < 4:
            raise ConfigInvalid(f"{self.addon} addon needs p_base >= 4")

    @property
    def p(self):
        extra = {"none": 0, "confuser": 1, "quadratics": self.p_base, "interactions": 6}[self.addon]
        return self.p_base + extra

    @property
    def true_support(self):
        return tuple(j for j, b in enumerate(self.beta_star) if b != 0)


def _padded(head, p):
    return tuple(head) + (0.0,) * (p - len(head))


def _example_table():
    weak = tuple(1 / k for k in range(1, 7)) + (0.0,)
    s2_base = (4.0, 4.0, -6 * math.sqrt(2), 0.75, 0.0, 0.0)
    return {
        "1": dict(n=100, p_base=200, beta_star=_padded(HEADLINE_BETA, 200)),
        "2": dict(n=150, p_base=14, beta_star=_padded(HEADLINE_BETA, 15), addon="confuser"),
        "3": dict(n=150, p_base=8, beta_star=(0.0,) * 8),
        "4": dict(n=150, p_base=8, beta_star=(1.0,) * 8),
        "5": dict(n=80, p_base=7, beta_star=weak, task="classification"),
        "6": dict(n=5000, p_base=7, beta_star=weak, task="classification"),
        "s1": dict(n=150, p_base=20, beta_star=_padded(HEADLINE_BETA, 20)),
        "s2": dict(n=150, p_base=6, beta_star=s2_base + (4.0, 0.0, 1.0, 0.0, 0.0, 0.0), addon="quadratics"),
        "s3": dict(n=150, p_base=6, beta_star=s2_base + (4.0, 2.0, 2.0, 0.0, 0.0, 0.0), addon="interactions"),
        "s4": dict(n=150, p_base=20, beta_star=_padded(HEADLINE_BETA, 20), task="classification"),
        "s5": dict(n=100, p_base=200, beta_star=_padded(HEADLINE_BETA, 200), task="classification"),
        # stability-selection comparison settings
        "c1": dict(n=100, p_base=20, beta_star=_padded(HEADLINE_BETA, 20), rho=0.0, sigma2=0.01),
        "c2": dict(n=100, p_base=20, beta_star=_padded((4.0, 0.0, 4.0, -6 * math.sqrt(2), 0.75), 20),
                   rho=0.7, sigma2=0.1),
    }


EXAMPLES = _example_table()


def example(name, **overrides):
    """ScenarioConfig for a named setting ('1'..'6', 's1'..'s5', 'c1', 'c2')."""
    key = str(name).lower()
    if key not in EXAMPLES:
        raise ConfigInvalid(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    kw = dict(EXAMPLES[key], name=key)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**kw)


def ar1_design(n, p, rho, rng):
    """Rows iid N(0, Sigma) with Sigma_ij = rho^|i-j|, via the AR(1) recursion across columns."""
    if not 0 <= rho < 1:
        raise BadRho(f"rho must lie in [0, 1), got {rho}")
    Z = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = Z[:, 0]
    innov = math.sqrt(1 - rho**2)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + innov * Z[:, j]
    return X


def replication_streams(seed, rep):
    """Independent (data, weighting) seed sequences for one replication."""
    data_ss, weight_ss = np.random.SeedSequence(seed, spawn_key=(rep,)).spawn(2)
    return data_ss, int(weight_ss.generate_state(1)[0])


def generate_scenario(cfg, replication_index=0, rng=None):
    if rng is None:
        rng = np.random.default_rng(replication_streams(cfg.seed, replication_index)[0])
    X = ar1_design(cfg.n, cfg.p_base, cfg.rho, rng)
    if cfg.addon == "confuser":
        e = rng.normal(0.0, 0.1, cfg.n)
        X = np.column_stack([X, 0.5 * X[:, 0] + 2 * X[:, 3] + e])
    elif cfg.addon == "quadratics":
        X = np.column_stack([X, X**2])
    elif cfg.addon == "interactions":
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        X = np.column_stack([X] + [X[:, a] * X[:, b] for a, b in pairs])
    eta = X @ np.array(cfg.beta_star)
    if cfg.task == "regression":
        y = eta + rng.normal(0.0, math.sqrt(cfg.sigma2), cfg.n)
    else:
        y = (rng.random(cfg.n) < 1 / (1 + np.exp(-eta))).astype(float)
    return Dataset(X, y, cfg.task, true_support=cfg.true_support)


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisSettings:
    methods: tuple = ("arm", "bic-p")
    thresholds: tuple = (0.5,)
    psi: float = 0.5
    n_splits: int = 100
    gamma_f: float = 1.0
    penalties: tuple = ("lasso", "scad", "mcp")
    n_lambda: int = 100
    all_subsets_max_p: int = 10


@dataclass
class StudyResult:
    names: tuple
    methods: tuple
    thresholds: tuple
    true_support: tuple
    per_replication: dict
    mean_importance: dict = field(default_factory=dict)
    se_importance: dict = field(default_factory=dict)
    selection_stats: dict = field(default_factory=dict)
    weighted_symdiff: dict = field(default_factory=dict)
    top_is_truth: dict = field(default_factory=dict)
    truth_in_candidates: np.ndarray = None
    n_candidates: np.ndarray = None

    @property
    def replications(self):
        return len(self.truth_in_candidates)


def analyze(data, settings, weight_seed, candidates=None):
    """Candidates, weights and SOIL vector per method for one dataset."""
    cands = candidates if candidates is not None else build_candidates(
        data, settings.penalties, settings.n_lambda, all_subsets_max_p=settings.all_subsets_max_p)
    truth = data.true_support
    rec = {"importance": {}, "wsd": {}, "top": {}, "sel": {},
           "n_candidates": len(cands),
           "truth_in": truth is not None and tuple(truth) in set(cands.supports)}
    for method in settings.methods:
        w = compute_weights(method, data, cands, settings.psi, settings.n_splits, weight_seed, settings.gamma_f)
        imp = soil(w, cands, data.names)
        rec["importance"][method] = imp.values
        if truth is not None:
            rec["wsd"][method] = weighted_symmetric_difference(w, cands, truth)
            rec["top"][method] = cands[int(np.argmax(w))].support == tuple(truth)
            rec["sel"][method] = [
                (r.missed_true, r.over_selected)
                for r in (threshold_select(imp, c, truth) for c in settings.thresholds)
            ]
    return rec


def _aggregate(records, names, settings, truth):
    methods = tuple(settings.methods)
    per = {m: np.array([r["importance"][m] for r in records]) for m in methods}
    res = StudyResult(names, methods, tuple(settings.thresholds), truth, per)
    R = len(records)
    for m in methods:
        res.mean_importance[m] = per[m].sum(axis=0) / R
        res.se_importance[m] = per[m].std(axis=0, ddof=1) / math.sqrt(R) if R > 1 else np.zeros(len(names))
        if truth is not None:
            res.weighted_symdiff[m] = np.array([r["wsd"][m] for r in records])
            res.top_is_truth[m] = np.array([r["top"][m] for r in records])
            sel = np.array([r["sel"][m] for r in records], dtype=float)  # (R, C, 2)
            res.selection_stats[m] = {
                c: {"missed_true": float(sel[:, i, 0].mean()),
                    "over_selected": float(sel[:, i, 1].mean()),
                    "symmetric_difference": float(sel[:, i].sum(axis=1).mean())}
                for i, c in enumerate(settings.thresholds)
            }
    res.truth_in_candidates = np.array([r["truth_in"] for r in records])
    res.n_candidates = np.array([r["n_candidates"] for r in records])
    return res


def resolve_workers(workers=None):
    if workers is None:
        workers = int(os.environ.get("SOIL_THREADS", "1") or 1)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _map(fn, items, workers):
    workers = resolve_workers(workers)
    if workers == 1 or len(items) == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _study_replicate(rep, cfg, settings, candidate_fn):
    data_ss, weight_seed = replication_streams(cfg.seed, rep)
    data = generate_scenario(cfg, rng=np.random.default_rng(data_ss))
    cands = candidate_fn(data) if candidate_fn is not None else None
    return analyze(data, settings, weight_seed, cands)


def run_study(cfg, settings=AnalysisSettings(), candidate_fn=None, workers=None):
    """Replicate ``cfg`` and collect SOIL importances for every weighting method.

    Each replication draws its data and ARM splits from streams keyed on
    ``(cfg.seed, replication)``, so results do not depend on ``workers``.
    ``candidate_fn(data) -> CandidateSet`` overrides the default recipe.
    """
    if not settings.methods:
        raise ConfigInvalid("no weighting methods requested")
    fn = partial(_study_replicate, cfg=cfg, settings=settings, candidate_fn=candidate_fn)
    records = _map(fn, list(range(cfg.replications)), workers)
    names = tuple(f"X{j + 1}" for j in range(cfg.p))
    return _aggregate(records, names, settings, cfg.true_support)


def _guided_replicate(rep, data, fitted, sigma, selected, seed, settings):
    data_ss, weight_seed = replication_streams(seed, rep)
    rng = np.random.default_rng(data_ss)
    y_new = fitted + sigma * rng.standard_normal(data.n)
    sim = Dataset(data.X, y_new, "regression", data.names, true_support=selected)
    return analyze(sim, settings, weight_seed)


def cross_examination(data, base_importance, top_m, replications=100, seed=0,
                      settings=AnalysisSettings(), workers=None):
    """Guided simulation from the model suggested by ``base_importance``.

    The ``top_m`` highest-ranked variables are refitted by least squares;
    new responses ``X beta_hat + sigma_hat * N(0, 1)`` are drawn on the
    original design, and every method in ``settings`` is recomputed on each
    draw. ``sigma_hat`` is the residual standard error RSS / (n - s - 1).
    """
    if data.task != "regression":
        raise ConfigInvalid("cross-examination is defined for regression data")
    if not 1 <= top_m <= data.p:
        raise ConfigInvalid(f"top_m must lie in [1, {data.p}]")
    selected = tuple(sorted(rank_variables(base_importance)[:top_m]))
    fit = ols_fit(data, selected)
    dof = data.n - len(selected) - 1
    sigma = math.sqrt(fit.rss / dof) if dof > 0 else fit.sigma_hat
    fn = partial(_guided_replicate, data=data, fitted=fit.predict(data.X), sigma=sigma,
                 selected=selected, seed=seed, settings=settings)
    records = _map(fn, list(range(replications)), workers)
    return _aggregate(records, data.names, settings, selected)


def with_overrides(cfg, **kw):
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
