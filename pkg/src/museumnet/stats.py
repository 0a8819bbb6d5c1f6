"""Contingency tables, plug-in mutual information and BIC scores.

All logarithms are natural. Scores are log-likelihoods minus a penalty
``kappa`` per free parameter (higher is better); the default
``kappa = ln(N) / 2`` makes ``-2 * score`` the usual BIC.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ingest import IndicatorDataset


@dataclass(frozen=True)
class ScoreConfig:
    """Penalty per free parameter; ``None`` means ln(N)/2."""

    penalty: float | None = None

    def __post_init__(self):
        if self.penalty is not None and self.penalty < 0:
            raise ValueError("penalty must be non-negative")

    def kappa(self, N: int) -> float:
        if self.penalty is None:
            return math.log(N) / 2.0
        return float(self.penalty)


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    cells: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def total(self) -> int:
        return int(self.cells.sum())

    @property
    def T(self) -> "ContingencyTable":
        return ContingencyTable(self.cells.T.copy())


def pair_counts(ds: IndicatorDataset, i: int, j: int) -> ContingencyTable:
    if i == j:
        raise ValueError("pair_counts needs two distinct variables")
    xi, xj = ds.column(i), ds.column(j)
    ri, rj = ds.cardinality(i), ds.cardinality(j)
    flat = np.bincount(xi.astype(np.int64) * rj + xj, minlength=ri * rj)
    return ContingencyTable(flat.reshape(ri, rj))


def _xlogx_ratio(counts: np.ndarray, denom: np.ndarray) -> float:
    """sum of c * ln(c / d) over cells with c > 0, exactly rounded (order-free)."""
    mask = counts > 0
    return math.fsum((counts[mask] * np.log(counts[mask] / denom[mask])).tolist())


def mutual_information(tab: ContingencyTable) -> float:
    """Plug-in estimate of I(X;Y) in nats, with 0 ln 0 = 0."""
    cells = np.asarray(tab.cells, dtype=float)
    N = cells.sum()
    if N <= 0:
        raise ValueError("empty contingency table")
    outer = np.outer(cells.sum(axis=1), cells.sum(axis=0)) / N
    mi = _xlogx_ratio(cells, outer) / N
    return max(mi, 0.0)


def entropy(counts: Iterable[float]) -> float:
    c = np.asarray(list(counts), dtype=float)
    p = c[c > 0] / c.sum()
    return float(-np.sum(p * np.log(p)))


def bic_edge_weight(ds: IndicatorDataset, i: int, j: int,
                    cfg: ScoreConfig | None = None) -> float:
    """BIC decrease from adding edge (i, j) to a forest.

    ``2 N MI(i; j) - 2 kappa (r_i - 1)(r_j - 1)``; with the default kappa
    this is ``2 N MI - ln(N) * df``.
    """
    cfg = cfg or ScoreConfig()
    N = ds.N
    if N < 2:
        raise ValueError("need at least two rows")
    mi = mutual_information(pair_counts(ds, i, j))
    df = (ds.cardinality(i) - 1) * (ds.cardinality(j) - 1)
    return 2.0 * N * mi - 2.0 * cfg.kappa(N) * df


def family_loglik(ds: IndicatorDataset, child: int, parents: Iterable[int]) -> float:
    """Maximised log-likelihood of ``child`` given its parent configuration."""
    parents = tuple(parents)
    if child in parents:
        raise ValueError("child cannot be its own parent")
    rc = ds.cardinality(child)
    config = np.zeros(ds.N, dtype=np.int64)
    n_configs = 1
    for p in parents:
        r = ds.cardinality(p)
        config = config * r + ds.column(p)
        n_configs *= r
    joint = np.bincount(config * rc + ds.column(child), minlength=n_configs * rc)
    joint = joint.reshape(n_configs, rc).astype(float)
    marg = np.broadcast_to(joint.sum(axis=1, keepdims=True), joint.shape)
    return _xlogx_ratio(joint, marg)


def family_df(ds: IndicatorDataset, child: int, parents: Iterable[int]) -> int:
    return (ds.cardinality(child) - 1) * math.prod(ds.cardinality(p) for p in parents)


def dag_family_score(ds: IndicatorDataset, child: int, parents: Iterable[int],
                     cfg: ScoreConfig | None = None) -> float:
    """Penalised log-likelihood of one family: ``loglik - kappa * df``."""
    cfg = cfg or ScoreConfig()
    parents = tuple(parents)
    return family_loglik(ds, child, parents) - cfg.kappa(ds.N) * family_df(ds, child, parents)


def graph_space_size(n: int) -> int:
    """Number of labelled undirected graphs on ``n`` vertices, 2**(n(n-1)/2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return 1 << (n * (n - 1) // 2)
