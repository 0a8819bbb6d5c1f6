import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from museumnet.dag import Dag, score_dag
from museumnet.ingest import IndicatorDataset
from museumnet.stats import (ContingencyTable, ScoreConfig, bic_edge_weight, dag_family_score,
                             entropy, graph_space_size, mutual_information, pair_counts)

from oracles import dag_loglik_counts, plugin_mi


def dataset(rows, names=None, status=None):
    rows = np.asarray(rows)
    names = names or tuple(f"X{k}" for k in range(rows.shape[1]))
    return IndicatorDataset(tuple(names), rows, status)


def test_pair_counts():
    ds = dataset([[1, 1], [0, 0], [1, 0]])
    np.testing.assert_array_equal(pair_counts(ds, 0, 1).cells, [[1, 0], [1, 1]])
    assert pair_counts(ds, 0, 1).total == 3


def test_pair_counts_constant_and_status():
    ds = dataset([[1, 0], [1, 1], [1, 1]], status=[0, 2, 2])
    tab = pair_counts(ds, 0, 1)
    assert (tab.cells[0] == 0).all() and tab.cells[1].sum() == 3
    st_tab = pair_counts(ds, 2, 0)
    assert st_tab.dims == (3, 2) and st_tab.total == 3
    with pytest.raises(IndexError):
        pair_counts(ds, 0, 5)
    with pytest.raises(ValueError):
        pair_counts(ds, 1, 1)


@pytest.mark.parametrize("cells, expected", [
    ([[50, 0], [0, 50]], math.log(2)),
    ([[1, 1], [1, 1]], 0.0),
    ([[40, 10], [10, 40]], plugin_mi([[40, 10], [10, 40]])),
])
def test_mutual_information_examples(cells, expected):
    assert mutual_information(ContingencyTable(np.array(cells))) == pytest.approx(expected, abs=1e-12)


def test_mutual_information_frozen_value():
    # frozen from the plug-in oracle
    assert mutual_information(ContingencyTable(np.array([[40, 10], [10, 40]]))) == \
        pytest.approx(0.19274475702175753, abs=1e-12)
    with pytest.raises(ValueError):
        mutual_information(ContingencyTable(np.zeros((2, 2))))


tables = arrays(np.int64, st.sampled_from([(2, 2), (3, 2), (2, 3)]),
                elements=st.integers(0, 40)).filter(lambda a: a.sum() > 0)


@given(tables)
def test_mi_symmetry_and_bounds(cells):
    tab = ContingencyTable(cells)
    mi = mutual_information(tab)
    assert mi == mutual_information(tab.T)
    assert mi >= 0
    h = min(entropy(cells.sum(axis=1)), entropy(cells.sum(axis=0)))
    assert mi <= h + 1e-12
    assert mi == pytest.approx(plugin_mi(cells), abs=1e-12)


def test_bic_edge_weight_examples():
    col = np.array([0] * 50 + [1] * 50)
    ds = dataset(np.column_stack([col, col]))
    assert bic_edge_weight(ds, 0, 1) == pytest.approx(134.02426592600096, abs=1e-9)
    ds = dataset([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert bic_edge_weight(ds, 0, 1) == pytest.approx(-math.log(4), abs=1e-12)


def test_bic_edge_weight_status_df():
    ds = dataset([[0], [1], [0], [1], [1], [0]], status=[0, 1, 2, 0, 1, 2])
    mi = plugin_mi(pair_counts(ds, 0, 1).cells)
    expected = 2 * 6 * mi - 2 * math.log(6)
    assert bic_edge_weight(ds, 0, 1) == pytest.approx(expected, abs=1e-12)


def test_family_score_examples():
    ds = dataset(np.array([[1]] * 40 + [[0]] * 60))
    assert dag_family_score(ds, 0, (), ScoreConfig(0)) == pytest.approx(
        60 * math.log(0.6) + 40 * math.log(0.4), abs=1e-9)
    assert dag_family_score(ds, 0, (), ScoreConfig(0)) == pytest.approx(-67.30116670092565, abs=1e-9)
    rng = np.random.default_rng(1)
    col = rng.integers(0, 2, 77)
    ds = dataset(np.column_stack([col, col]))
    assert dag_family_score(ds, 1, (0,), ScoreConfig(0)) == 0.0


def test_family_penalty_difference():
    rng = np.random.default_rng(2)
    ds = dataset(rng.integers(0, 2, (300, 3)), status=rng.integers(0, 3, 300))
    for child, pa in [(0, ()), (1, (0,)), (0, (1, 3)), (3, (0, 2))]:
        df = (ds.cardinality(child) - 1) * math.prod(ds.cardinality(p) for p in pa)
        diff = dag_family_score(ds, child, pa, ScoreConfig(200)) - \
            dag_family_score(ds, child, pa, ScoreConfig(0))
        assert diff == pytest.approx(-200 * df, abs=1e-9)
    with pytest.raises(ValueError):
        dag_family_score(ds, 1, (1,))


def test_family_matches_counting_oracle():
    rng = np.random.default_rng(3)
    X = rng.integers(0, 2, (500, 4))
    ds = dataset(X, names=("a", "b", "c", "d"))
    arcs = [("a", "c"), ("b", "c"), ("c", "d")]
    got = score_dag(ds, Dag(ds.names, arcs), ScoreConfig(1.7))
    assert got == pytest.approx(dag_loglik_counts(X, ds.names, arcs, 1.7), abs=1e-8)


def test_default_penalty_is_half_log_n():
    assert ScoreConfig().kappa(100) == pytest.approx(math.log(100) / 2)
    with pytest.raises(ValueError):
        ScoreConfig(-1)


def test_decomposability():
    rng = np.random.default_rng(4)
    ds = dataset(rng.integers(0, 2, (400, 4)))
    before = [dag_family_score(ds, v, pa) for v, pa in [(0, ()), (1, (0,)), (2, ()), (3, (2,))]]
    after = [dag_family_score(ds, v, pa) for v, pa in [(0, ()), (1, (0,)), (2, (0, 1)), (3, (2,))]]
    assert before[0] == after[0] and before[1] == after[1] and before[3] == after[3]


@pytest.mark.parametrize("seed", range(5))
def test_edge_weight_is_twice_score_gain(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, 1000)
    y = np.where(rng.random(1000) < 0.7, x, rng.integers(0, 2, 1000))
    ds = dataset(np.column_stack([x, y]), names=("i", "j"))
    gain = score_dag(ds, Dag(("i", "j"), [("i", "j")])) - score_dag(ds, Dag(("i", "j")))
    assert gain == pytest.approx(bic_edge_weight(ds, 0, 1) / 2, abs=1e-9)


def test_graph_space_size():
    assert graph_space_size(1) == 1
    assert graph_space_size(3) == 8
    assert graph_space_size(23) == 2 ** 253
    assert f"{graph_space_size(23):.2e}" == "1.45e+76"
    assert str(graph_space_size(23)).startswith("144")
    with pytest.raises(ValueError):
        graph_space_size(0)
