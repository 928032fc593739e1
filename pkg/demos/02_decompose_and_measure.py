"""
Clustering entities and scoring the result
==========================================

Entities that the same functionalities touch end up similar; average
linkage over the similarity matrix gives a deterministic dendrogram we
can cut at any cluster count. Each cut is scored by cohesion, coupling,
and migration complexity, and a grid search picks the best weighting.
"""

from mono2ddd import (
    SimilarityWeights,
    build_similarity,
    decompose,
    measure,
    parse_model,
    rank_decompositions,
    report_tsv,
    search_candidates,
)

ACCESSES = """
{
  "functionalities": [
    {"name": "f1", "trace": [["A", "R"], ["B", "W"], ["A", "W"]]},
    {"name": "f2", "trace": [["C", "R"], ["D", "R"], ["C", "W"]]},
    {"name": "f3", "trace": [["A", "R"], ["C", "W"]]},
    {"name": "f4", "trace": [["C", "R"], ["A", "W"], ["B", "R"]]}
  ]
}
"""

model = parse_model(ACCESSES)

# Pure access similarity: how much two entities share their callers.
weights = SimilarityWeights(access=1.0, write=0.0, read=0.0, sequence=0.0)
matrix = build_similarity(model, weights)
print("sim(A, B) =", round(matrix.similarity("A", "B"), 4))
print("sim(A, D) =", round(matrix.similarity("A", "D"), 4))

# Cut the dendrogram at two clusters.
two = decompose(model, weights, 2)
for name, members in two.clusters:
    print(name, "=", ", ".join(members))

# The measure report renders as a TSV table, one row per cluster plus a
# decomposition summary row.
print()
print(report_tsv(measure(model, two)), end="")

# Grid-search every weight combination at the given step, then apply the
# selection rule: lowest coupling first, then highest cohesion, and the
# lowest complexity inside the resulting short list.
candidates = search_candidates(model, step=0.5, n_values=(2, 3))
best = rank_decompositions(candidates, top_k=10)
print()
print("best weights:", best.weights.as_tuple())
for name, members in best.clusters:
    print(name, "=", ", ".join(members))
