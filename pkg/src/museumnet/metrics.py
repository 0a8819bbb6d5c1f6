"""Degree, betweenness and closeness centrality on small undirected graphs.

Betweenness counts ordered (source, target) pairs, so the centre of a
star on n vertices scores (n-1)(n-2). Closeness is (n-1) / sum of
distances, and 0 for a vertex that does not reach every other vertex.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Protocol


class Graph(Protocol):
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class UndirectedGraph:
    """General undirected graph; cycles allowed (unlike ``Forest``)."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        vertices = tuple(vertices)
        known = set(vertices)
        norm = set()
        for u, v in edges:
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) has an unknown endpoint")
            if u != v:
                norm.add((u, v) if vertices.index(u) < vertices.index(v) else (v, u))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(norm))


@dataclass(frozen=True)
class VertexMetrics:
    vertex: str
    degree: int
    betweenness: float
    closeness: float


def _adjacency(g: Graph) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {v: [] for v in g.vertices}
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _check(g: Graph, v: str) -> None:
    if v not in g.vertices:
        raise KeyError(f"unknown vertex {v!r}")


def _bfs(adj, source):
    """Distances and shortest-path counts from ``source``, plus visit order."""
    dist = {source: 0}
    sigma = {source: 1}
    order = []
    queue = deque([source])
    while queue:
        u = queue.popleft()
        order.append(u)
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                sigma[w] = 0
                queue.append(w)
            if dist[w] == dist[u] + 1:
                sigma[w] += sigma[u]
    return dist, sigma, order


def degree(g: Graph, v: str) -> int:
    _check(g, v)
    return sum(v in e for e in g.edges)


def all_betweenness(g: Graph) -> dict[str, float]:
    """Brandes accumulation over every source; sums ordered pairs."""
    adj = _adjacency(g)
    score = {v: 0.0 for v in g.vertices}
    for s in g.vertices:
        dist, sigma, order = _bfs(adj, s)
        delta = {v: 0.0 for v in order}
        for w in reversed(order):
            for u in adj[w]:
                if dist.get(u) == dist[w] - 1:
                    delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    return score


def betweenness(g: Graph, v: str) -> float:
    _check(g, v)
    return all_betweenness(g)[v]


def closeness(g: Graph, v: str) -> float:
    _check(g, v)
    n = len(g.vertices)
    dist, _, _ = _bfs(_adjacency(g), v)
    if n < 2 or len(dist) < n:
        return 0.0
    return (n - 1) / sum(dist.values())


def metrics_report(g: Graph) -> list[VertexMetrics]:
    """Per-vertex metrics, vertices in lexicographic order."""
    btw = all_betweenness(g)
    return [VertexMetrics(v, degree(g, v), btw[v], closeness(g, v))
            for v in sorted(g.vertices)]
