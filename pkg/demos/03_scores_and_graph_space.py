# %% [markdown]
# # Scores and the size of the search space

# %%
import math

import numpy as np

from museumnet import (ContingencyTable, IndicatorDataset, ScoreConfig, bic_edge_weight,
                       dag_family_score, graph_space_size, mutual_information)

# %% [markdown]
# 23 variables already allow 2^253 undirected graphs, about 1.45e76, which is
# why the undirected search is restricted to forests.

# %%
g = graph_space_size(23)
print(g)
print(f"{g:.3e}")

# %% [markdown]
# Plug-in mutual information, in nats:

# %%
for cells in ([[50, 0], [0, 50]], [[1, 1], [1, 1]], [[40, 10], [10, 40]]):
    print(cells, round(mutual_information(ContingencyTable(np.array(cells))), 5))

# %% [markdown]
# An edge pays off when 2N * MI beats ln(N) per extra parameter:

# %%
col = np.array([0] * 50 + [1] * 50)
ds = IndicatorDataset(("A", "B"), np.column_stack([col, col]))
print("copy:", bic_edge_weight(ds, 0, 1), "=", 200 * math.log(2) - math.log(100))

# %% [markdown]
# Family scores are log-likelihood minus penalty * parameters. Going from
# penalty 0 to 200 on a child with two binary parents costs 200 * 4.

# %%
rng = np.random.default_rng(0)
X = rng.integers(0, 2, (1000, 3))
ds = IndicatorDataset(("A", "B", "C"), X)
s0 = dag_family_score(ds, 2, (0, 1), ScoreConfig(0))
s200 = dag_family_score(ds, 2, (0, 1), ScoreConfig(200))
print(s0, s200, s0 - s200)
