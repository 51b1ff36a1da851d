"""Model weights over a candidate set: ARM, BIC-p and generalized fiducial.

Everything is accumulated as log-scores and normalized with a log-sum-exp,
since the raw likelihood products underflow for n in the hundreds.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln

from .errors import AllInfinite, InvalidDataset, NoFittableCandidate, OneClassOnly
from .fitting import (
    SIGMA_FLOOR,
    bernoulli_log_likelihood,
    design_stack,
    logistic_batch,
    ols_batch,
    stack_predict,
)

METHODS = ("arm", "bic-p", "fiducial")


@dataclass(frozen=True)
class ArmConfig:
    psi: float = 0.5
    n_splits: int = 100
    seed: int = 0
    sigma_floor: float = SIGMA_FLOOR

    def __post_init__(self):
        if self.n_splits < 1:
            raise ValueError("n_splits must be >= 1")
        if self.psi < 0:
            raise ValueError("psi must be >= 0")
        if not self.sigma_floor > 0:
            raise ValueError("sigma_floor must be positive")


def normalize_log_weights(log_scores):
    s = np.asarray(log_scores, dtype=float)
    s = np.where(np.isnan(s), -np.inf, s)
    finite = np.isfinite(s)
    if not finite.any():
        raise AllInfinite("every candidate has log-score -inf")
    w = np.zeros_like(s)
    shifted = s[finite] - s[finite].max()
    e = np.exp(shifted)
    w[finite] = e / e.sum()
    return w


def _models(cands):
    models = list(cands)
    if not models:
        raise ValueError("empty candidate list")
    return models


def _size_groups(models):
    groups = defaultdict(list)
    for k, m in enumerate(models):
        groups[m.size].append(k)
    return {s: (np.array(idx), np.array([models[k].support for k in idx], dtype=int).reshape(len(idx), s))
            for s, idx in sorted(groups.items())}


def _complexities(models):
    return np.array([m.complexity for m in models])


def split_indices(n, seed, split):
    """Training/test halves for one ARM split; the stream depends only on (seed, split)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(split,)))
    perm = rng.permutation(n)
    n1 = (n + 1) // 2
    return np.sort(perm[:n1]), np.sort(perm[n1:])


def arm_split_scores_regression(X1, y1, X2, y2, groups, prior, sigma_floor):
    """Per-candidate ARM log-scores for one split (prior term included)."""
    scores = np.full(len(prior), -np.inf)
    n2 = len(y2)
    for _, (idx, supports) in groups.items():
        coef, rss, ok = ols_batch(X1, y1, supports)
        if not ok.any():
            continue
        sigma = np.maximum(np.sqrt(rss[ok] / len(y1)), sigma_floor)
        resid = y2 - stack_predict(design_stack(X2, supports[ok]), coef[ok])
        sq = np.einsum("bn,bn->b", resid, resid)
        scores[idx[ok]] = prior[idx[ok]] - n2 * np.log(sigma) - sq / (2 * sigma**2)
    return scores


def arm_weights_regression(data, cands, cfg=ArmConfig()):
    """Adaptive regression by mixing with a size prior exp(-psi C_k).

    Each split fits every candidate by least squares on one half and scores
    its Gaussian predictive likelihood on the other; the per-split weights
    are averaged over ``cfg.n_splits`` random splits.
    """
    if data.task != "regression":
        raise InvalidDataset("arm_weights_regression needs a regression dataset")
    if data.n < 4:
        raise InvalidDataset("ARM needs at least 4 rows")
    models = _models(cands)
    groups = _size_groups(models)
    prior = -cfg.psi * _complexities(models)
    total = np.zeros(len(models))
    for split in range(cfg.n_splits):
        tr, te = split_indices(data.n, cfg.seed, split)
        scores = arm_split_scores_regression(data.X[tr], data.y[tr], data.X[te], data.y[te],
                                             groups, prior, cfg.sigma_floor)
        try:
            total += normalize_log_weights(scores)
        except AllInfinite:
            raise NoFittableCandidate(f"no candidate could be fitted on split {split}") from None
    return total / cfg.n_splits


def arm_weights_logistic(data, cands, cfg=ArmConfig()):
    """ARM for binary responses: logistic fits on one half, Bernoulli likelihood on the other."""
    if data.task != "classification":
        raise InvalidDataset("arm_weights_logistic needs a classification dataset")
    if np.all(data.y == data.y[0]):
        raise OneClassOnly("response has a single class")
    models = _models(cands)
    groups = _size_groups(models)
    prior = -cfg.psi * _complexities(models)
    # full-data fits only seed IRLS; each split still iterates to its own optimum
    warm = {s: logistic_batch(data.X, data.y, supports)[0] for s, (_, supports) in groups.items()}
    total = np.zeros(len(models))
    for split in range(cfg.n_splits):
        tr, te = split_indices(data.n, cfg.seed, split)
        y1 = data.y[tr]
        scores = np.full(len(models), -np.inf)
        if not np.all(y1 == y1[0]):
            X1, X2, y2 = data.X[tr], data.X[te], data.y[te]
            for s, (idx, supports) in groups.items():
                coef, _, ok, _, _ = logistic_batch(X1, y1, supports, init=warm[s])
                if not ok.any():
                    continue
                prob = expit(stack_predict(design_stack(X2, supports[ok]), coef[ok]))
                scores[idx[ok]] = prior[idx[ok]] + bernoulli_log_likelihood(y2, prob)
        try:
            total += normalize_log_weights(scores)
        except AllInfinite:
            raise NoFittableCandidate(f"no candidate could be fitted on split {split}") from None
    return total / cfg.n_splits


def arm_weights(data, cands, cfg=ArmConfig()):
    if data.task == "classification":
        return arm_weights_logistic(data, cands, cfg)
    return arm_weights_regression(data, cands, cfg)


def full_data_log_likelihoods(data, cands, sigma_floor=SIGMA_FLOOR):
    """Maximized log-likelihood per candidate on all rows (-inf when unfittable)."""
    models = _models(cands)
    ll = np.full(len(models), -np.inf)
    if data.task == "classification" and np.all(data.y == data.y[0]):
        raise OneClassOnly("response has a single class")
    for _, (idx, supports) in _size_groups(models).items():
        if data.task == "classification":
            _, loglik, ok, _, _ = logistic_batch(data.X, data.y, supports)
            ll[idx[ok]] = loglik[ok]
        else:
            _, rss, ok = ols_batch(data.X, data.y, supports)
            sigma = np.maximum(np.sqrt(rss[ok] / data.n), sigma_floor)
            ll[idx[ok]] = -0.5 * data.n * np.log(2 * math.pi * sigma**2) - rss[ok] / (2 * sigma**2)
    return ll


def bic_p_log_scores(data, cands, psi=0.5, bic_multiplier=None):
    """-I_k / 2 - psi C_k with I_k = -2 log L_k + m s_k log n.

    ``m`` defaults to 1 for regression and 2 for classification.
    """
    models = _models(cands)
    if bic_multiplier is None:
        bic_multiplier = 2.0 if data.task == "classification" else 1.0
    sizes = np.array([m.size for m in models])
    info = -2 * full_data_log_likelihoods(data, models) + bic_multiplier * sizes * math.log(data.n)
    return -info / 2 - psi * _complexities(models)


def bic_p_weights(data, cands, psi=0.5, bic_multiplier=None):
    return normalize_log_weights(bic_p_log_scores(data, cands, psi, bic_multiplier))


def fiducial_log_scores(data, cands, gamma_f=1.0, rss_floor=1e-12):
    models = _models(cands)
    if data.task != "regression":
        raise InvalidDataset("fiducial weighting is defined for regression only")
    n, p = data.n, data.p
    scores = np.full(len(models), -np.inf)
    for s, (idx, supports) in _size_groups(models).items():
        if n - s < 2:
            continue
        _, rss, ok = ols_batch(data.X, data.y, supports)
        rss = np.maximum(rss[ok], rss_floor)
        log_binom = gammaln(p + 1) - gammaln(s + 1) - gammaln(p - s + 1)
        scores[idx[ok]] = (gammaln((n - s) / 2) - (n - s - 1) / 2 * np.log(math.pi * rss)
                           - (s + 1) / 2 * math.log(n) - gamma_f * log_binom)
    return scores


def fiducial_weights(data, cands, gamma_f=1.0):
    """Generalized fiducial model probabilities, normalized over the candidates."""
    return normalize_log_weights(fiducial_log_scores(data, cands, gamma_f))


def compute_weights(method, data, cands, psi=0.5, n_splits=100, seed=0, gamma_f=1.0):
    if method == "arm":
        return arm_weights(data, cands, ArmConfig(psi=psi, n_splits=n_splits, seed=seed))
    if method == "bic-p":
        return bic_p_weights(data, cands, psi)
    if method == "fiducial":
        return fiducial_weights(data, cands, gamma_f)
    raise ValueError(f"unknown weighting method {method!r}; expected one of {METHODS}")
