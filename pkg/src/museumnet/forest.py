"""Minimum-BIC forest learning (maximum-weight spanning forest)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ingest import IndicatorDataset
from .stats import ScoreConfig, bic_edge_weight, dag_family_score


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        """Merge the sets of i and j; False if they were already joined."""
        i, j = self.find(i), self.find(j)
        if i == j:
            return False
        if self.size[i] < self.size[j]:
            i, j = j, i
        self.parent[j] = i
        self.size[i] += self.size[j]
        return True


def _normalise(vertices: Sequence[str], edges: Iterable[tuple[str, str]]):
    pos = {v: k for k, v in enumerate(vertices)}
    out = set()
    for u, v in edges:
        if u not in pos or v not in pos:
            raise ValueError(f"edge ({u}, {v}) has an unknown endpoint")
        if u == v:
            raise ValueError(f"self-loop on {u}")
        out.add((u, v) if pos[u] < pos[v] else (v, u))
    return frozenset(out)


@dataclass(frozen=True)
class Forest:
    """Undirected acyclic graph. Edges are stored with endpoints in vertex order."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex names")
        edges = _normalise(vertices, edges)
        uf = UnionFind(len(vertices))
        pos = {v: k for k, v in enumerate(vertices)}
        for u, v in edges:
            if not uf.union(pos[u], pos[v]):
                raise ValueError(f"edge ({u}, {v}) closes a cycle")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return sorted(self.edges, key=lambda e: (pos[e[0]], pos[e[1]]))

    def neighbours(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.sorted_edges():
            adj[u].append(v)
            adj[v].append(u)
        return adj


def _resolve_variables(ds: IndicatorDataset, variables, include_status: bool) -> list[int]:
    if variables is None:
        idx = list(range(len(ds.variable_names)))
    else:
        idx = [ds.index(v) if isinstance(v, str) else int(v) for v in variables]
    if include_status:
        if not ds.has_status:
            raise ValueError("dataset has no status column")
        status = len(ds.variable_names)
        if status not in idx:
            idx.append(status)
    if not idx:
        raise ValueError("empty variable set")
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate variables")
    return idx


def edge_weights(ds: IndicatorDataset, idx: Sequence[int],
                 cfg: ScoreConfig | None = None) -> dict[tuple[int, int], float]:
    """BIC edge weight for every pair of positions in ``idx``."""
    return {(a, b): bic_edge_weight(ds, idx[a], idx[b], cfg)
            for a, b in combinations(range(len(idx)), 2)}


def learn_min_bic_forest(ds: IndicatorDataset, variables=None, include_status: bool = False,
                         cfg: ScoreConfig | None = None) -> Forest:
    """Greedy maximum-weight spanning forest over positive BIC edge weights.

    Candidate edges are visited by decreasing weight, ties broken by the
    (lower, higher) positions of the endpoints; an edge is kept when its
    weight is positive and it joins two different trees.
    """
    idx = _resolve_variables(ds, variables, include_status)
    if ds.N < 2:
        raise ValueError("need at least two rows")
    names = [ds.names[k] for k in idx]
    weights = edge_weights(ds, idx, cfg)
    order = sorted(weights, key=lambda e: (-weights[e], e[0], e[1]))
    uf = UnionFind(len(idx))
    chosen = []
    for a, b in order:
        if weights[(a, b)] <= 0:
            break
        if uf.union(a, b):
            chosen.append((names[a], names[b]))
    return Forest(names, chosen)


def connected_components(f: Forest) -> list[list[str]]:
    """Trees of the forest, each listed in vertex order, ordered by first vertex."""
    pos = {v: k for k, v in enumerate(f.vertices)}
    uf = UnionFind(len(f.vertices))
    for u, v in f.edges:
        uf.union(pos[u], pos[v])
    groups: dict[int, list[str]] = {}
    for v in f.vertices:
        groups.setdefault(uf.find(pos[v]), []).append(v)
    return list(groups.values())


def orient_forest(f: Forest, roots: Iterable[str] | None = None) -> dict[str, str | None]:
    """Parent map obtained by rooting every tree.

    By default each tree is rooted at its first vertex in vertex order.
    """
    adj = f.neighbours()
    chosen = list(roots or ())
    parent: dict[str, str | None] = {}
    for comp in connected_components(f):
        picks = [r for r in chosen if r in comp]
        if len(picks) > 1:
            raise ValueError(f"several roots given for one tree: {picks}")
        root = picks[0] if picks else comp[0]
        parent[root] = None
        stack = [root]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in parent:
                    parent[w] = u
                    stack.append(w)
    return {v: parent[v] for v in f.vertices}


def forest_bic(ds: IndicatorDataset, f: Forest) -> float:
    """BIC (-2 loglik + ln(N) * df) of the forest model fitted by maximum likelihood.

    Computed by rooting each tree and summing family log-likelihoods, which
    is independent of the mutual-information route used for learning.
    """
    cfg = ScoreConfig(math.log(ds.N) / 2.0)
    score = 0.0
    for child, par in orient_forest(f).items():
        parents = () if par is None else (ds.index(par),)
        score += dag_family_score(ds, ds.index(child), parents, cfg)
    return -2.0 * score
