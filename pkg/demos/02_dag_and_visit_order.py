# %% [markdown]
# # DAGs, statistical time and the visiting order
#
# A BIC-scored DAG orders the museums: any topological order of it is a
# "statistical time". We compare each arc with physical time, meaning which
# museum most card-holders visited first.

# %%
from museumnet import (SearchConfig, conjecture_check, deduplicate, hill_climb,
                       statistical_time, build_indicator_dataset)
from museumnet.export import agreement_tsv, dag_to_dot
from museumnet.synth import item_names, make_rng, random_dag_model, sample_itineraries

# %% [markdown]
# ## A model whose causal order is the visiting order

# %%
names = item_names(7)
model = random_dag_model(names, make_rng(4), arc_prob=0.4, with_temporal_order=True)
print("true arcs:", sorted(model.structure.arcs))
print("visiting order:", model.temporal_order)
log = sample_itineraries(model, N=15_000, seed=4)
ds = build_indicator_dataset(log, names)
visits = deduplicate(log)

# %% [markdown]
# ## The generating DAG agrees with physical time by construction

# %%
print(agreement_tsv(conjecture_check(model.structure, visits, min_support=1)))

# %% [markdown]
# ## Learning the DAG
# Hill climbing starts from the empty graph and applies the best add,
# delete or reverse move until none helps. Restarts perturb the result and
# climb again. Arcs that are not part of a v-structure can come out in
# either direction, so some of them may disagree with the visiting order.

# %%
res = hill_climb(ds, SearchConfig(restarts=50, seed=0))
print(f"score {res.score:.2f} (empty graph {res.empty_score:.2f}), {len(res.trace)} moves")
print("statistical time:", statistical_time(res.dag))
report = conjecture_check(res.dag, visits, min_support=30)
print(report.counts, "agreement:", report.agreement)
print(dag_to_dot(res.dag, report))

# %% [markdown]
# ## Heavier penalties
# The penalty is charged per free parameter. The default is ln(N)/2;
# raising it to 200 keeps only the strongest dependencies.

# %%
for penalty in (None, 20.0, 200.0):
    r = hill_climb(ds, SearchConfig(penalty=penalty, restarts=20, seed=0))
    print(f"penalty {penalty!s:>6}: {len(r.dag.arcs)} arcs")
