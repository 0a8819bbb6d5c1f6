"""Score-based DAG learning by hill climbing under a penalised BIC score."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ingest import IndicatorDataset
from .stats import ScoreConfig, family_df, family_loglik

# Moves must raise the score by more than this; stops covered-arc reversals
# (score-equivalent up to rounding) from cycling.
IMPROVEMENT_TOL = 1e-9

MOVE_ORDER = ("add", "delete", "reverse")


class CycleError(ValueError):
    pass


def is_acyclic(vertices: Iterable[str], arcs: Iterable[tuple[str, str]]) -> bool:
    """Kahn elimination: True iff every vertex can be removed in topological order."""
    vertices = list(vertices)
    indeg = {v: 0 for v in vertices}
    children: dict[str, list[str]] = {v: [] for v in vertices}
    for u, v in arcs:
        if u not in indeg or v not in indeg:
            raise ValueError(f"arc ({u}, {v}) references an unknown vertex")
        children[u].append(v)
        indeg[v] += 1
    ready = [v for v in vertices if indeg[v] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for w in children[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == len(vertices)


@dataclass(frozen=True)
class Dag:
    vertices: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]

    def __init__(self, vertices: Iterable[str], arcs: Iterable[tuple[str, str]] = ()):
        vertices = tuple(vertices)
        arcs = frozenset((u, v) for u, v in arcs)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex names")
        for u, v in arcs:
            if u == v:
                raise ValueError(f"self-arc on {u}")
        if not is_acyclic(vertices, arcs):
            raise CycleError("arcs contain a directed cycle")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "arcs", arcs)

    def sorted_arcs(self) -> list[tuple[str, str]]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return sorted(self.arcs, key=lambda a: (pos[a[0]], pos[a[1]]))


def parents(g: Dag, v: str) -> set[str]:
    if v not in g.vertices:
        raise KeyError(f"unknown vertex {v!r}")
    return {u for u, w in g.arcs if w == v}


def statistical_time(g: Dag) -> list[str]:
    """Lexicographically smallest topological order of ``g``."""
    if not is_acyclic(g.vertices, g.arcs):
        raise CycleError("graph is cyclic")
    indeg = {v: 0 for v in g.vertices}
    children: dict[str, list[str]] = {v: [] for v in g.vertices}
    for u, v in g.arcs:
        children[u].append(v)
        indeg[v] += 1
    heap = [v for v in g.vertices if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for w in children[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order


@dataclass(frozen=True)
class SearchConfig:
    penalty: float | None = None  # None -> ln(N)/2
    restarts: int = 500
    perturbation_size: int = 2
    seed: int = 0
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.penalty is not None and self.penalty < 0:
            raise ValueError("penalty must be non-negative")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")
        if self.perturbation_size < 1:
            raise ValueError("perturbation_size must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def score_config(self) -> ScoreConfig:
        return ScoreConfig(self.penalty)


def score_dag(ds: IndicatorDataset, g: Dag, cfg: SearchConfig | ScoreConfig | None = None) -> float:
    """Sum of penalised family scores; higher is better."""
    if not is_acyclic(g.vertices, g.arcs):
        raise CycleError("graph is cyclic")
    kappa = _kappa(ds, cfg)
    total = 0.0
    for v in g.vertices:
        child = ds.index(v)
        pa = sorted(ds.index(u) for u in parents(g, v))
        total += family_loglik(ds, child, pa) - kappa * family_df(ds, child, pa)
    return total


def _kappa(ds, cfg) -> float:
    if cfg is None:
        cfg = ScoreConfig()
    elif isinstance(cfg, SearchConfig):
        cfg = cfg.score_config()
    return cfg.kappa(ds.N)


@dataclass(frozen=True)
class Move:
    kind: str
    parent: str
    child: str
    delta: float


@dataclass(frozen=True)
class TraceStep:
    climb: int
    move: Move
    score: float
    arcs: frozenset[tuple[str, str]]


@dataclass
class HillClimbResult:
    dag: Dag
    score: float
    trace: list[TraceStep] = field(default_factory=list)
    climb_start_scores: list[float] = field(default_factory=list)
    empty_score: float = 0.0


class _FamilyScorer:
    """Cached penalised family scores over dataset column indices."""

    def __init__(self, ds: IndicatorDataset, cols: Sequence[int], kappa: float):
        self.ds, self.cols, self.kappa = ds, list(cols), kappa
        self.cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def __call__(self, child: int, pa: Iterable[int]) -> float:
        key = (child, tuple(sorted(pa)))
        hit = self.cache.get(key)
        if hit is None:
            c = self.cols[child]
            p = [self.cols[k] for k in key[1]]
            hit = family_loglik(self.ds, c, p) - self.kappa * family_df(self.ds, c, p)
            self.cache[key] = hit
        return hit


class _State:
    """Mutable parent/child sets over vertex positions 0..n-1."""

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        self.n = n
        self.pa = [set() for _ in range(n)]
        self.ch = [set() for _ in range(n)]
        for u, v in arcs:
            self.add(u, v)

    def add(self, u, v):
        self.pa[v].add(u)
        self.ch[u].add(v)

    def remove(self, u, v):
        self.pa[v].discard(u)
        self.ch[u].discard(v)

    def arcs(self):
        return frozenset((u, v) for v in range(self.n) for u in self.pa[v])

    def reaches(self, src, dst, skip=None) -> bool:
        """Directed path src ~> dst, optionally ignoring the arc ``skip``."""
        stack, seen = [src], {src}
        while stack:
            u = stack.pop()
            for w in self.ch[u]:
                if (u, w) == skip:
                    continue
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False


def _best_move(st: _State, fam, fam_now):
    """Steepest improving move; ties go to the first in (kind, parent, child) order."""
    best = None
    best_delta = IMPROVEMENT_TOL
    n = st.n
    for u in range(n):
        for v in range(n):
            if u == v or u in st.pa[v] or v in st.pa[u]:
                continue
            if st.reaches(v, u):
                continue
            d = fam(v, st.pa[v] | {u}) - fam_now[v]
            if d > best_delta:
                best, best_delta = ("add", u, v), d
    existing = sorted((u, v) for v in range(n) for u in st.pa[v])
    for u, v in existing:
        d = fam(v, st.pa[v] - {u}) - fam_now[v]
        if d > best_delta:
            best, best_delta = ("delete", u, v), d
    for u, v in existing:
        if st.reaches(u, v, skip=(u, v)):
            continue
        d = (fam(v, st.pa[v] - {u}) - fam_now[v]
             + fam(u, st.pa[u] | {v}) - fam_now[u])
        if d > best_delta:
            best, best_delta = ("reverse", u, v), d
    return best, best_delta


def _climb(st: _State, fam, names, max_iterations, climb_id, trace):
    fam_now = [fam(v, st.pa[v]) for v in range(st.n)]
    score = sum(fam_now)
    for _ in range(max_iterations):
        move, delta = _best_move(st, fam, fam_now)
        if move is None:
            break
        kind, u, v = move
        if kind == "add":
            st.add(u, v)
        elif kind == "delete":
            st.remove(u, v)
        else:
            st.remove(u, v)
            st.add(v, u)
            fam_now[u] = fam(u, st.pa[u])
        fam_now[v] = fam(v, st.pa[v])
        score = sum(fam_now)
        trace.append(TraceStep(
            climb_id, Move(kind, names[u], names[v], delta), score,
            frozenset((names[a], names[b]) for a, b in st.arcs())))
    return score


def _perturb(st: _State, rng: np.random.Generator, k: int) -> None:
    """Toggle ``k`` random arcs, skipping toggles that would break acyclicity."""
    n = st.n
    if n < 2:
        return
    done = attempts = 0
    while done < k and attempts < 100 * k:
        attempts += 1
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if u in st.pa[v]:
            st.remove(u, v)
        elif v in st.pa[u] or st.reaches(v, u):
            continue
        else:
            st.add(u, v)
        done += 1


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """PCG64 stream private to one restart."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, restart])))


def hill_climb(ds: IndicatorDataset, cfg: SearchConfig | None = None,
               variables=None, include_status: bool = False) -> HillClimbResult:
    """Steepest-ascent search over add/delete/reverse moves from the empty DAG.

    Each restart perturbs the first local optimum with its own seeded
    stream and climbs again; the best DAG overall wins, ties going to the
    lexicographically smallest arc set. The status variable is left out
    unless ``include_status`` is set.
    """
    cfg = cfg or SearchConfig()
    if variables is None:
        cols = list(range(len(ds.variable_names)))
    else:
        cols = [ds.index(v) if isinstance(v, str) else int(v) for v in variables]
    if include_status:
        if not ds.has_status:
            raise ValueError("dataset has no status column")
        if len(ds.variable_names) not in cols:
            cols.append(len(ds.variable_names))
    if ds.N < 1:
        raise ValueError("empty dataset")
    names = [ds.names[c] for c in cols]
    fam = _FamilyScorer(ds, cols, _kappa(ds, cfg))
    n = len(cols)

    empty_score = sum(fam(v, ()) for v in range(n))
    trace: list[TraceStep] = []
    starts = [empty_score]
    st = _State(n)
    score = _climb(st, fam, names, cfg.max_iterations, 0, trace)
    local_opt = st.arcs()
    best_key = (score, tuple(sorted(local_opt)))

    for r in range(cfg.restarts):
        st = _State(n, local_opt)
        _perturb(st, restart_rng(cfg.seed, r), cfg.perturbation_size)
        starts.append(sum(fam(v, st.pa[v]) for v in range(n)))
        s = _climb(st, fam, names, cfg.max_iterations, r + 1, trace)
        arcs = tuple(sorted(st.arcs()))
        if s > best_key[0] or (s == best_key[0] and arcs < best_key[1]):
            best_key = (s, arcs)

    best_score, best_arcs = best_key
    dag = Dag(names, [(names[u], names[v]) for u, v in best_arcs])
    return HillClimbResult(dag, best_score, trace, starts, empty_score)
