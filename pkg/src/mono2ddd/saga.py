"""Rewrite fine-grained access traces as coarse-grained sagas.

A functionality's trace is first collapsed into maximal same-cluster runs,
then steps are merged backward into earlier same-cluster steps whenever the
reordering cannot change the outcome of any read/write conflict. The result
is a saga: an ordered list of cluster-local steps plus an orchestrator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .decompose import Decomposition
from .errors import ContractError, SagaError
from .model import WRITE, Access, MonolithModel

ORCHESTRATOR_POLICIES = ("first", "max-accesses")


@dataclass(frozen=True)
class Step:
    cluster: str
    accesses: tuple[Access, ...]
    index: int


@dataclass(frozen=True)
class Saga:
    functionality: str
    orchestrator: str
    steps: tuple[Step, ...]

    def clusters(self) -> tuple[str, ...]:
        seen: list[str] = []
        for step in self.steps:
            if step.cluster not in seen:
                seen.append(step.cluster)
        return tuple(seen)


@dataclass(frozen=True)
class ReductionStats:
    functionality: str
    clusters_touched: int
    cgi: int
    fgi: int
    reduction_pct: float


def collapse_runs(
    trace: tuple[Access, ...], entity_to_cluster: dict[str, str]
) -> list[tuple[str, list[Access]]]:
    """Group consecutive accesses that stay within one cluster."""
    steps: list[tuple[str, list[Access]]] = []
    for access in trace:
        try:
            cluster = entity_to_cluster[access.entity]
        except KeyError:
            raise SagaError(f"entity {access.entity!r} is not mapped to a cluster") from None
        if steps and steps[-1][0] == cluster:
            steps[-1][1].append(access)
        else:
            steps.append((cluster, [access]))
    return steps


def _blocks(moved: list[Access], intervening: list[Access]) -> bool:
    """True when reordering would swap two conflicting accesses."""
    writes = {a.entity for a in moved if a.mode == WRITE}
    touched = {a.entity for a in moved}
    for a in intervening:
        if a.entity in writes:
            return True
        if a.mode == WRITE and a.entity in touched:
            return True
    return False


def merge_steps(
    steps: list[tuple[str, list[Access]]]
) -> list[tuple[str, list[Access]]]:
    """Merge steps into earlier same-cluster steps where conflicts allow.

    One scan moves at most one step, then collapses any adjacency it
    created and starts over; the loop stops at a fixpoint.
    """
    steps = [(cluster, list(accesses)) for cluster, accesses in steps]
    changed = True
    while changed:
        changed = False
        for i in range(1, len(steps)):
            cluster, accesses = steps[i]
            target = None
            for j in range(i - 1, -1, -1):
                if steps[j][0] == cluster:
                    target = j
                    break
            if target is None:
                continue
            between = [a for _, acc in steps[target + 1 : i] for a in acc]
            if _blocks(accesses, between):
                continue
            steps[target][1].extend(accesses)
            del steps[i]
            collapsed: list[tuple[str, list[Access]]] = []
            for c, acc in steps:
                if collapsed and collapsed[-1][0] == c:
                    collapsed[-1][1].extend(acc)
                else:
                    collapsed.append((c, acc))
            steps = collapsed
            changed = True
            break
    return steps


def _pick_orchestrator(steps: list[tuple[str, list[Access]]], policy: str) -> str:
    if policy == "first":
        return steps[0][0]
    if policy == "max-accesses":
        counts: dict[str, int] = {}
        for cluster, accesses in steps:
            counts[cluster] = counts.get(cluster, 0) + len(accesses)
        best = max(counts.values())
        return min(c for c, n in counts.items() if n == best)
    raise SagaError(f"unknown orchestrator policy {policy!r}")


def refactor_functionality(
    model: MonolithModel,
    decomposition: Decomposition,
    name: str,
    orchestrator_policy: str = "first",
) -> tuple[Saga, ReductionStats]:
    functionality = model.functionality(name)
    mapping = decomposition.assignment()
    raw = collapse_runs(functionality.trace, mapping)
    merged = merge_steps(raw)

    saga = Saga(
        functionality=name,
        orchestrator=_pick_orchestrator(merged, orchestrator_policy),
        steps=tuple(
            Step(cluster, tuple(accesses), index)
            for index, (cluster, accesses) in enumerate(merged)
        ),
    )
    fgi = len(functionality.trace)
    cgi = len(merged)
    stats = ReductionStats(
        functionality=name,
        clusters_touched=len({cluster for cluster, _ in merged}),
        cgi=cgi,
        fgi=fgi,
        reduction_pct=1.0 - cgi / fgi,
    )
    return saga, stats


def refactor_model(
    model: MonolithModel,
    decomposition: Decomposition,
    orchestrator_policy: str = "first",
) -> list[tuple[Saga, ReductionStats]]:
    return [
        refactor_functionality(model, decomposition, f.name, orchestrator_policy)
        for f in model.functionalities
    ]


def sagas_to_json(sagas: list[Saga]) -> str:
    doc = {
        "sagas": [
            {
                "functionality": s.functionality,
                "orchestrator": s.orchestrator,
                "steps": [
                    {
                        "cluster": step.cluster,
                        "accesses": [[a.entity, a.mode] for a in step.accesses],
                    }
                    for step in s.steps
                ],
            }
            for s in sagas
        ]
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_sagas(text: str) -> list[Saga]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("sagas", None), list):
        raise ContractError("sagas document must have a 'sagas' list")
    result = []
    for i, raw in enumerate(doc["sagas"]):
        loc = f"sagas[{i}]"
        if not isinstance(raw, dict):
            raise ContractError("saga must be an object", loc)
        name = raw.get("functionality")
        orchestrator = raw.get("orchestrator")
        raw_steps = raw.get("steps")
        if not isinstance(name, str) or not name:
            raise ContractError("missing functionality name", loc)
        if not isinstance(orchestrator, str) or not orchestrator:
            raise ContractError("missing orchestrator", loc)
        if not isinstance(raw_steps, list) or not raw_steps:
            raise ContractError("missing steps", loc)
        steps = []
        for j, rs in enumerate(raw_steps):
            sloc = f"{loc}.steps[{j}]"
            if not isinstance(rs, dict) or not isinstance(rs.get("cluster"), str):
                raise ContractError("step must name a cluster", sloc)
            accesses = []
            raw_accesses = rs.get("accesses")
            if not isinstance(raw_accesses, list) or not raw_accesses:
                raise ContractError("step must list accesses", sloc)
            for entry in raw_accesses:
                if (
                    not isinstance(entry, list)
                    or len(entry) != 2
                    or not all(isinstance(x, str) for x in entry)
                ):
                    raise ContractError("access must be [entity, mode]", sloc)
                try:
                    accesses.append(Access(entry[0], entry[1]))
                except ValueError as exc:
                    raise ContractError(str(exc), sloc) from exc
            steps.append(Step(rs["cluster"], tuple(accesses), j))
        result.append(Saga(name, orchestrator, tuple(steps)))
    return result


def stats_tsv(stats: list[ReductionStats]) -> str:
    lines = ["name\tclusters\tCGI\tFGI\treduction%"]
    for s in stats:
        lines.append(
            "\t".join(
                (
                    s.functionality,
                    str(s.clusters_touched),
                    str(s.cgi),
                    str(s.fgi),
                    f"{s.reduction_pct * 100:.2f}",
                )
            )
        )
    return "\n".join(lines) + "\n"
