"""
Refactoring functionalities into sagas
======================================

Once entities are split across clusters, a functionality's flat access
trace becomes a sequence of cluster-local steps. Consecutive accesses in
one cluster collapse into a step, and a later step merges into an
earlier step of its cluster whenever no conflicting access sits between
them (two accesses to one entity conflict when at least one writes).
"""

from mono2ddd import (
    SimilarityWeights,
    decompose,
    parse_model,
    refactor_functionality,
    refactor_model,
    sagas_to_json,
    stats_tsv,
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
decomposition = decompose(model, SimilarityWeights(1.0, 0.0, 0.0, 0.0), 2)

# One functionality in detail: f4 starts in Cluster1, then finishes in
# Cluster0, so two coarse-grained steps replace three raw accesses.
saga, stats = refactor_functionality(model, decomposition, "f4")
print("orchestrator:", saga.orchestrator)
for step in saga.steps:
    ops = ", ".join(f"{a.entity}:{a.mode}" for a in step.accesses)
    print(f"  step {step.index} [{step.cluster}] {ops}")
print(f"CGI {stats.cgi} / FGI {stats.fgi}, reduction {stats.reduction_pct:.0%}")

# The orchestrator policy picks which cluster owns the saga. "first"
# takes the opening step's cluster; "max-accesses" takes the busiest one.
busiest, _ = refactor_functionality(
    model, decomposition, "f4", orchestrator_policy="max-accesses"
)
print("max-accesses orchestrator:", busiest.orchestrator)

# Whole-model refactoring gives the reduction table and a JSON document
# that round-trips through parse_sagas.
results = refactor_model(model, decomposition)
print()
print(stats_tsv([st for _, st in results]), end="")
print()
print(sagas_to_json([s for s, _ in results])[:200], "...")
