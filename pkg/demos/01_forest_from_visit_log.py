# %% [markdown]
# # From a visit log to a minimum-BIC forest
#
# A subscription card lets each holder enter every museum in a network for a
# year. The log records one row per visit. Here we simulate such a log from a
# known tree, recover the tree, and rank museums by centrality.

# %%
import io

from museumnet import (build_indicator_dataset, connected_components, learn_min_bic_forest,
                       metrics_report, parse_transactions, select_main_items, visit_counts,
                       write_transactions)
from museumnet.export import forest_to_dot, metrics_tsv
from museumnet.synth import item_names, make_rng, random_spanning_tree, sample_itineraries, tree_model

# %% [markdown]
# ## A synthetic year of visits
# Twelve museums linked by a random tree. A visitor of a museum's neighbour
# visits it too with probability 0.9. Visits are spread over 2012 in a
# fixed itinerary order.

# %%
names = item_names(12)
rng = make_rng(2012)
truth = random_spanning_tree(names, rng)
order = [names[k] for k in rng.permutation(len(names))]
model = tree_model(truth, agreement=0.9, temporal_order=order)
log = sample_itineraries(model, N=20_000, seed=1, year=2012)

# round-trip through the CSV format the command line reads
buf = io.StringIO()
write_transactions(log, buf)
log = parse_transactions(io.StringIO(buf.getvalue()), year=2012)
print(buf.getvalue().splitlines()[:4])

# %% [markdown]
# ## Main museums
# Repeat visits are collapsed. A museum is "main" when its visit count is
# strictly above the nearest-rank percentile of all counts.

# %%
counts = visit_counts(log)
main = select_main_items(counts, 0.25)
print(f"{len(log.subjects())} card-holders, {counts.total()} distinct visits")
print(f"{len(main)} of {len(counts.counts)} museums above the 25th percentile")

# %% [markdown]
# ## The forest
# Every museum is kept here so we can compare against the true tree. Edge
# weights are 2N * mutual information minus ln(N) per extra parameter. The
# greedy spanning forest over positive weights is the BIC-optimal forest.

# %%
ds = build_indicator_dataset(log, names, include_status=True)
forest = learn_min_bic_forest(ds)
true_edges = {frozenset(e) for e in truth.edges}
found = {frozenset(e) for e in forest.edges}
print(f"recovered {len(found & true_edges)}/{len(true_edges)} true edges, "
      f"{len(found - true_edges)} spurious")
print(f"{len(connected_components(forest))} tree(s)")
print(forest_to_dot(forest))

# %% [markdown]
# Adding the 3-level subscriber status as a node: statuses are drawn
# independently of visits in this simulation, so it should stay isolated.

# %%
with_status = learn_min_bic_forest(ds, include_status=True)
print("status neighbours:", [e for e in with_status.edges if "S" in e])

# %% [markdown]
# ## Centrality
# Betweenness counts ordered pairs of endpoints. Closeness is (n-1) over the
# summed distance.

# %%
report = metrics_report(forest)
print(metrics_tsv(report))
top = max(report, key=lambda r: r.betweenness)
print("most central:", top.vertex, "degree", top.degree)
