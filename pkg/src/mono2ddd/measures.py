"""Modularity measures over a decomposition and the candidate ranking rule.

Cohesion rewards clusters whose entities are used together; coupling counts
cross-cluster hops in the traces; complexity estimates migration cost by
counting read/write interleavings between functionalities that span more
than one cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decompose import Decomposition, decomposition_to_json, search_decompositions
from .errors import DecompositionError
from .model import READ, WRITE, Functionality, MonolithModel


@dataclass(frozen=True)
class ClusterMeasures:
    name: str
    size: int
    functionalities: int
    cohesion: float
    coupling: float
    complexity: float


@dataclass(frozen=True)
class MeasureReport:
    clusters: tuple[ClusterMeasures, ...]
    cohesion: float
    coupling: float
    complexity: float

    def cluster(self, name: str) -> ClusterMeasures:
        for c in self.clusters:
            if c.name == name:
                return c
        raise DecompositionError(f"unknown cluster {name!r}")


def _touching(model: MonolithModel, members: tuple[str, ...]) -> list[Functionality]:
    member_set = set(members)
    return [f for f in model.functionalities if f.entities() & member_set]


def cohesion(model: MonolithModel, decomposition: Decomposition, name: str) -> float:
    members = decomposition.members(name)
    touching = _touching(model, members)
    if not touching:
        return 0.0
    member_set = set(members)
    total = sum(len(f.entities() & member_set) / len(members) for f in touching)
    return total / len(touching)


def coupling(model: MonolithModel, decomposition: Decomposition, name: str) -> float:
    if len(decomposition.clusters) == 1:
        return 0.0
    members = set(decomposition.members(name))
    assignment = decomposition.assignment()

    followed: dict[str, set[str]] = {}
    for f in model.functionalities:
        for prev, cur in zip(f.trace, f.trace[1:]):
            if prev.entity in members and cur.entity not in members:
                followed.setdefault(assignment[cur.entity], set()).add(cur.entity)

    total = 0.0
    for other, other_members in decomposition.clusters:
        if other == name:
            continue
        total += len(followed.get(other, ())) / len(other_members)
    return total / (len(decomposition.clusters) - 1)


def _distributed(model: MonolithModel, decomposition: Decomposition) -> dict[str, Functionality]:
    assignment = decomposition.assignment()
    result = {}
    for f in model.functionalities:
        clusters = {assignment[a.entity] for a in f.trace}
        if len(clusters) > 1:
            result[f.name] = f
    return result


def complexity(model: MonolithModel, decomposition: Decomposition, name: str) -> float:
    """Complexity of one functionality under the given decomposition."""
    f = model.functionality(name)
    distributed = _distributed(model, decomposition)
    if f.name not in distributed:
        return 0.0

    writers: dict[str, set[str]] = {}
    readers: dict[str, set[str]] = {}
    for g in distributed.values():
        if g.name == f.name:
            continue
        for a in g.trace:
            table = writers if a.mode == WRITE else readers
            table.setdefault(a.entity, set()).add(g.name)

    total = 0
    for a in f.trace:
        if a.mode == READ:
            total += len(writers.get(a.entity, ()))
        else:
            total += len(readers.get(a.entity, ()))
    return float(total)


def measure(model: MonolithModel, decomposition: Decomposition) -> MeasureReport:
    """Per-cluster and decomposition-level measures in one pass."""
    by_functionality = {
        f.name: complexity(model, decomposition, f.name) for f in model.functionalities
    }

    rows = []
    for name, members in decomposition.clusters:
        touching = _touching(model, members)
        cluster_complexity = (
            sum(by_functionality[f.name] for f in touching) / len(touching)
            if touching
            else 0.0
        )
        rows.append(
            ClusterMeasures(
                name=name,
                size=len(members),
                functionalities=len(touching),
                cohesion=cohesion(model, decomposition, name),
                coupling=coupling(model, decomposition, name),
                complexity=cluster_complexity,
            )
        )

    k = len(rows)
    total_functionalities = len(model.functionalities)
    return MeasureReport(
        clusters=tuple(rows),
        cohesion=sum(r.cohesion for r in rows) / k,
        coupling=sum(r.coupling for r in rows) / k,
        complexity=(
            sum(by_functionality.values()) / total_functionalities
            if total_functionalities
            else 0.0
        ),
    )


def search_candidates(
    model: MonolithModel,
    step: float,
    n_values: list[int] | tuple[int, ...],
    threads: int | None = None,
) -> list[tuple[Decomposition, MeasureReport]]:
    """Grid-search decompositions and attach measures to each candidate."""
    return [
        (d, measure(model, d))
        for d in search_decompositions(model, step, n_values, threads)
    ]


def rank_decompositions(
    candidates: list[tuple[Decomposition, MeasureReport]],
    top_k: int = 100,
) -> Decomposition:
    """Pick the best candidate per the coupling/cohesion/complexity rule.

    Candidates are ordered by coupling ascending then cohesion descending;
    within the first ``top_k`` the one with minimal complexity wins. The
    serialized decomposition is the last tie-break at both stages, which
    makes the result independent of input order.
    """
    if not candidates:
        raise DecompositionError("no candidates to rank")
    if top_k < 1:
        raise DecompositionError(f"topK must be positive, got {top_k}")

    keyed = [
        (report.coupling, -report.cohesion, decomposition_to_json(d), report.complexity, d)
        for d, report in candidates
    ]
    keyed.sort(key=lambda item: item[:3])
    short_list = keyed[:top_k]
    _, _, _, _, winner = min(short_list, key=lambda item: (item[3], item[2]))
    return winner


def report_tsv(report: MeasureReport) -> str:
    """Render the per-cluster table plus a decomposition summary row."""
    lines = ["cluster\tentities\tfunctionalities\tcohesion\tcoupling\tcomplexity"]
    for row in report.clusters:
        lines.append(
            "\t".join(
                (
                    row.name,
                    str(row.size),
                    str(row.functionalities),
                    f"{row.cohesion:.6f}",
                    f"{row.coupling:.6f}",
                    f"{row.complexity:.6f}",
                )
            )
        )
    lines.append(
        "\t".join(
            (
                "(decomposition)",
                str(sum(r.size for r in report.clusters)),
                "",
                f"{report.cohesion:.6f}",
                f"{report.coupling:.6f}",
                f"{report.complexity:.6f}",
            )
        )
    )
    return "\n".join(lines) + "\n"
