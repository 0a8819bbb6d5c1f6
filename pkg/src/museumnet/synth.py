"""Synthetic ground-truth models, ancestral sampling and itinerary logs.

Randomness comes from numpy's PCG64 generator seeded through a
SeedSequence, so outputs are reproducible across platforms for a given
numpy version.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dag import Dag, statistical_time
from .forest import Forest, orient_forest
from .ingest import IndicatorDataset, TransactionLog, TransactionRecord

ROW_TOL = 1e-12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


@dataclass(frozen=True, eq=False)
class GroundTruthModel:
    """Binary network with one conditional table per vertex.

    ``cpts[v]`` has shape ``(2**k, 2)`` for ``k`` parents: row = parent
    configuration (parents in vertex order, first parent most significant),
    column = value of ``v``. For a ``Forest`` structure the parents are
    those obtained by rooting each tree at its first vertex, so roots
    carry a marginal and every other vertex an edge conditional.
    """

    structure: Forest | Dag
    cpts: Mapping[str, np.ndarray]
    temporal_order: tuple[str, ...] | None = None
    parent_map: dict[str, tuple[str, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        verts = self.structure.vertices
        pos = {v: k for k, v in enumerate(verts)}
        if isinstance(self.structure, Forest):
            pm = {v: (() if p is None else (p,)) for v, p in orient_forest(self.structure).items()}
        else:
            pm = {v: tuple(sorted((u for u, w in self.structure.arcs if w == v), key=pos.get))
                  for v in verts}
        object.__setattr__(self, "parent_map", pm)
        cpts = {}
        for v in verts:
            if v not in self.cpts:
                raise ValueError(f"missing table for {v!r}")
            t = np.asarray(self.cpts[v], dtype=float)
            if t.shape != (2 ** len(pm[v]), 2):
                raise ValueError(f"table for {v!r} has shape {t.shape}, "
                                 f"expected {(2 ** len(pm[v]), 2)}")
            if (t < 0).any() or np.abs(t.sum(axis=1) - 1.0).max() > ROW_TOL:
                raise ValueError(f"table rows for {v!r} must be probabilities summing to 1")
            cpts[v] = t
        object.__setattr__(self, "cpts", cpts)
        if self.temporal_order is not None:
            order = tuple(self.temporal_order)
            if sorted(order) != sorted(verts):
                raise ValueError("temporal_order must be a permutation of the items")
            object.__setattr__(self, "temporal_order", order)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.structure.vertices

    def as_dag(self) -> Dag:
        return Dag(self.vertices, [(u, v) for v, ps in self.parent_map.items() for u in ps])


def _ancestral(model: GroundTruthModel, N: int, rng: np.random.Generator) -> np.ndarray:
    verts = model.vertices
    col = {v: k for k, v in enumerate(verts)}
    out = np.zeros((N, len(verts)), dtype=np.int8)
    for v in statistical_time(model.as_dag()):
        config = np.zeros(N, dtype=np.int64)
        for p in model.parent_map[v]:
            config = config * 2 + out[:, col[p]]
        p_one = model.cpts[v][config, 1]
        out[:, col[v]] = rng.random(N) < p_one
    return out


def sample_dag_model(model: GroundTruthModel, N: int, seed: int) -> IndicatorDataset:
    """Draw N independent rows by sampling vertices in topological order."""
    if N < 1:
        raise ValueError("N must be at least 1")
    rows = _ancestral(model, N, make_rng(seed))
    return IndicatorDataset(model.vertices, rows)


def reroot_forest_model(model: GroundTruthModel, roots: Sequence[str]) -> GroundTruthModel:
    """Same joint distribution, trees re-oriented away from ``roots``."""
    if not isinstance(model.structure, Forest):
        raise TypeError("model structure must be a Forest")
    marg: dict[str, np.ndarray] = {}
    for v in statistical_time(model.as_dag()):
        ps = model.parent_map[v]
        marg[v] = model.cpts[v][0] if not ps else marg[ps[0]] @ model.cpts[v]
    new_parent = orient_forest(model.structure, roots)
    cpts = {}
    for v, p in new_parent.items():
        if p is None:
            cpts[v] = marg[v][None, :]
            continue
        if model.parent_map[v] == (p,):
            joint = marg[p][:, None] * model.cpts[v]
        else:  # edge flipped: p(p, v) = p(v) p(p | v)
            joint = (marg[v][:, None] * model.cpts[p]).T
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = joint / joint.sum(axis=1, keepdims=True)
        cond[~np.isfinite(cond).all(axis=1)] = 0.5
        cpts[v] = cond
    dag = Dag(model.vertices, [(p, v) for v, p in new_parent.items() if p is not None])
    return GroundTruthModel(dag, cpts, model.temporal_order)


def sample_forest_model(model: GroundTruthModel, N: int, seed: int,
                        roots: Sequence[str] | None = None) -> IndicatorDataset:
    """Sample a forest model; each tree rooted at its first vertex unless ``roots`` says otherwise."""
    if not isinstance(model.structure, Forest):
        raise TypeError("model structure must be a Forest")
    if roots:
        model = reroot_forest_model(model, roots)
    return sample_dag_model(model, N, seed)


def sample_itineraries(model: GroundTruthModel, N: int, seed: int,
                       year: int = 2012) -> TransactionLog:
    """Visit log whose per-subject visit order follows ``model.temporal_order``.

    Subjects with at least one visit get one record per visited item, with
    day stamps spaced evenly across the year in temporal order. Subjects
    who visit nothing produce no records.
    """
    if model.temporal_order is None:
        raise ValueError("model has no temporal_order")
    rows = _ancestral(model, N, make_rng(seed))
    status = make_rng(seed, 1).integers(0, 3, size=N)
    start = dt.date(year, 1, 1)
    n_days = (dt.date(year + 1, 1, 1) - start).days
    col = {v: k for k, v in enumerate(model.vertices)}
    order_cols = [col[v] for v in model.temporal_order]
    if len(order_cols) + 1 > n_days:
        raise ValueError("too many items to give each visit its own day")
    width = len(str(N))
    records = []
    for s in range(N):
        visited = [model.temporal_order[k] for k, c in enumerate(order_cols) if rows[s, c]]
        k = len(visited)
        for m, item in enumerate(visited):
            day = (m + 1) * n_days // (k + 1)
            records.append(TransactionRecord(f"c{s:0{width}d}", item,
                                             start + dt.timedelta(days=day), int(status[s])))
    return TransactionLog.from_records(records)


# -- random ground-truth models -------------------------------------------

def item_names(n: int) -> list[str]:
    return [f"M{k:03d}" for k in range(n)]


def random_spanning_tree(vertices: Sequence[str], rng: np.random.Generator) -> Forest:
    """Uniform labelled spanning tree via a random Pruefer sequence."""
    n = len(vertices)
    if n < 2:
        return Forest(vertices)
    seq = list(rng.integers(0, n, size=n - 2))
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    edges = []
    for x in seq:
        leaf = min(k for k in range(n) if deg[k] == 1)
        edges.append((vertices[leaf], vertices[x]))
        deg[leaf] -= 1
        deg[x] -= 1
    u, v = [k for k in range(n) if deg[k] == 1]
    edges.append((vertices[u], vertices[v]))
    return Forest(vertices, edges)


def tree_model(forest: Forest, agreement: float = 0.9, root_p: float = 0.5,
               temporal_order: Sequence[str] | None = None) -> GroundTruthModel:
    """Each child copies its parent with probability ``agreement``."""
    a = agreement
    cpts = {}
    for v, p in orient_forest(forest).items():
        cpts[v] = (np.array([[1 - root_p, root_p]]) if p is None
                   else np.array([[a, 1 - a], [1 - a, a]]))
    return GroundTruthModel(forest, cpts, temporal_order)


def random_dag_model(vertices: Sequence[str], rng: np.random.Generator,
                     arc_prob: float = 0.5, low: float = 0.05, high: float = 0.95,
                     with_temporal_order: bool = False) -> GroundTruthModel:
    """Random DAG consistent with a random vertex order, uniform CPT entries.

    With ``with_temporal_order`` the hidden causal order doubles as the
    visiting order, so every arc points forward in time.
    """
    order = [vertices[k] for k in rng.permutation(len(vertices))]
    arcs = [(order[a], order[b]) for a in range(len(order)) for b in range(a + 1, len(order))
            if rng.random() < arc_prob]
    cpts = {}
    for v in vertices:
        n_par = sum(w == v for _, w in arcs)
        p_one = rng.uniform(low, high, size=2 ** n_par)
        cpts[v] = np.column_stack([1 - p_one, p_one])
    return GroundTruthModel(Dag(vertices, arcs), cpts,
                            tuple(order) if with_temporal_order else None)


def collider_model(noise: float = 0.1, names: Sequence[str] = ("X", "Y", "Z")) -> GroundTruthModel:
    """X, Y fair coins; Z = X xor Y, flipped with probability ``noise``."""
    x, y, z = names
    flip = noise
    # rows: (x, y) = 00, 01, 10, 11
    cz = np.array([[1 - flip, flip], [flip, 1 - flip], [flip, 1 - flip], [1 - flip, flip]])
    fair = np.array([[0.5, 0.5]])
    return GroundTruthModel(Dag(names, [(x, z), (y, z)]), {x: fair, y: fair, z: cz})
