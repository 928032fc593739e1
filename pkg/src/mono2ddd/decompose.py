"""Similarity-driven clustering of entities into candidate decompositions.

The pipeline is: trace statistics -> pairwise similarity -> agglomerative
clustering (average linkage on distance ``1 - s``) -> named clusters. A grid
search enumerates weight combinations and cluster counts to produce candidate
decompositions for later ranking.

Everything here is deterministic: ties in the linkage step are broken by the
lexicographically smallest pair of cluster representatives, and cluster names
are assigned by each cluster's smallest member.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ContractError, DecompositionError
from .model import READ, WRITE, MonolithModel

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SimilarityWeights:
    """Convex weights for the four similarity criteria."""

    access: float
    write: float
    read: float
    sequence: float

    def __post_init__(self):
        values = self.as_tuple()
        for v in values:
            if v < -WEIGHT_TOLERANCE or v > 1 + WEIGHT_TOLERANCE:
                raise DecompositionError(f"weight out of range: {v}")
        if abs(sum(values) - 1.0) > WEIGHT_TOLERANCE:
            raise DecompositionError(f"weights must sum to 1, got {sum(values)}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.access, self.write, self.read, self.sequence)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric entity similarity, keyed by sorted entity names."""

    entities: tuple[str, ...]
    values: dict[tuple[str, str], float] = field(compare=False)

    def similarity(self, e1: str, e2: str) -> float:
        if e1 == e2:
            return 1.0
        return self.values.get((min(e1, e2), max(e1, e2)), 0.0)

    def distance(self, e1: str, e2: str) -> float:
        return 1.0 - self.similarity(e1, e2)


@dataclass(frozen=True)
class Decomposition:
    """A named partition of the model's entities."""

    weights: SimilarityWeights
    n: int
    clusters: tuple[tuple[str, tuple[str, ...]], ...]

    def cluster_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.clusters)

    def members(self, name: str) -> tuple[str, ...]:
        for cname, members in self.clusters:
            if cname == name:
                return members
        raise DecompositionError(f"unknown cluster {name!r}")

    def cluster_of(self, entity: str) -> str:
        for cname, members in self.clusters:
            if entity in members:
                return cname
        raise DecompositionError(f"entity {entity!r} is not in any cluster")

    def assignment(self) -> dict[str, str]:
        return {e: name for name, members in self.clusters for e in members}


def _accessors(model: MonolithModel, mode: str | None = None) -> dict[str, set[str]]:
    table: dict[str, set[str]] = {e: set() for e in model.entity_names()}
    for f in model.functionalities:
        for a in f.trace:
            if mode is None or a.mode == mode:
                table.setdefault(a.entity, set()).add(f.name)
    return table


def build_similarity(model: MonolithModel, weights: SimilarityWeights) -> SimilarityMatrix:
    """Compute the symmetrized similarity matrix for all model entities."""
    entities = model.entity_names()
    acc = _accessors(model)
    wr = _accessors(model, WRITE)
    rd = _accessors(model, READ)

    pair_counts: dict[tuple[str, str], int] = {}
    for f in model.functionalities:
        for prev, cur in zip(f.trace, f.trace[1:]):
            if prev.entity != cur.entity:
                key = (min(prev.entity, cur.entity), max(prev.entity, cur.entity))
                pair_counts[key] = pair_counts.get(key, 0) + 1
    max_pair = max(pair_counts.values(), default=0)

    def ratio(shared: set[str], base: set[str]) -> float:
        if not base:
            return 0.0
        return len(shared & base) / len(base)

    def directed(e1: str, e2: str) -> float:
        s_access = ratio(acc[e2], acc[e1])
        s_write = ratio(wr[e2], wr[e1])
        s_read = ratio(rd[e2], rd[e1])
        follows = pair_counts.get((min(e1, e2), max(e1, e2)), 0)
        s_seq = follows / max_pair if max_pair else 0.0
        return (
            weights.access * s_access
            + weights.write * s_write
            + weights.read * s_read
            + weights.sequence * s_seq
        )

    values: dict[tuple[str, str], float] = {}
    for i, e1 in enumerate(entities):
        for e2 in entities[i + 1 :]:
            values[(e1, e2)] = (directed(e1, e2) + directed(e2, e1)) / 2.0
    return SimilarityMatrix(entities, values)


def cluster(matrix: SimilarityMatrix, weights: SimilarityWeights, n: int) -> Decomposition:
    """Agglomerate entities into ``n`` clusters with average linkage.

    Cluster distance is the mean pairwise entity distance; ties are broken
    by the lexicographically smallest (first, second) member pair so equal
    inputs always produce equal outputs.
    """
    entities = matrix.entities
    if n < 1:
        raise DecompositionError(f"cluster count must be positive, got {n}")
    if n > len(entities):
        raise DecompositionError(f"cannot make {n} clusters from {len(entities)} entities")

    clusters: list[list[str]] = [[e] for e in entities]
    while len(clusters) > n:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                total = sum(
                    matrix.distance(x, y) for x in clusters[i] for y in clusters[j]
                )
                d = total / (len(clusters[i]) * len(clusters[j]))
                lo, hi = sorted((clusters[i][0], clusters[j][0]))
                key = (d, lo, hi)
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, i, j = best
        merged = sorted(clusters[i] + clusters[j])
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)]
        clusters.append(merged)
        clusters.sort(key=lambda c: c[0])

    clusters.sort(key=lambda c: c[0])
    named = tuple(
        (f"Cluster{idx}", tuple(members)) for idx, members in enumerate(clusters)
    )
    return Decomposition(weights, n, named)


def decompose(model: MonolithModel, weights: SimilarityWeights, n: int) -> Decomposition:
    return cluster(build_similarity(model, weights), weights, n)


def weight_grid(step: float) -> list[SimilarityWeights]:
    """All weight combinations on a grid of the given step, summing to 1."""
    if step <= 0 or step > 1:
        raise DecompositionError(f"grid step must be in (0, 1], got {step}")
    parts = round(1.0 / step)
    if abs(parts * step - 1.0) > WEIGHT_TOLERANCE:
        raise DecompositionError(f"grid step {step} does not divide 1")
    grid = []
    for a in range(parts + 1):
        for w in range(parts - a + 1):
            for r in range(parts - a - w + 1):
                s = parts - a - w - r
                grid.append(
                    SimilarityWeights(a * step, w * step, r * step, s * step)
                )
    return grid


def default_thread_count() -> int:
    raw = os.environ.get("MONO2DDD_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ContractError(f"MONO2DDD_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ContractError(f"MONO2DDD_THREADS must be positive, got {value}")
    return value


def search_decompositions(
    model: MonolithModel,
    step: float,
    n_values: list[int] | tuple[int, ...],
    threads: int | None = None,
) -> list[Decomposition]:
    """Cluster the model for every grid weight and every requested size.

    Results come back sorted by (weights, n) regardless of thread count, so
    parallel and serial runs are byte-identical downstream.
    """
    if not n_values:
        raise DecompositionError("no cluster counts requested")
    for n in n_values:
        if n < 1 or n > len(model.entity_names()):
            raise DecompositionError(f"cluster count {n} out of range for this model")
    if threads is None:
        threads = default_thread_count()

    combos = [
        (weights, n) for weights in weight_grid(step) for n in sorted(set(n_values))
    ]

    def job(combo):
        weights, n = combo
        return decompose(model, weights, n)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, combos))
    else:
        results = [job(c) for c in combos]
    results.sort(key=lambda d: (d.weights.as_tuple(), d.n))
    return results


def decomposition_to_json(decomposition: Decomposition) -> str:
    doc = {
        "params": {
            "weights": list(decomposition.weights.as_tuple()),
            "n": decomposition.n,
        },
        "clusters": {name: list(members) for name, members in decomposition.clusters},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_decomposition(text: str) -> Decomposition:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "clusters" not in doc:
        raise ContractError("decomposition document must have a 'clusters' object")
    params = doc.get("params", {})
    raw_weights = params.get("weights", [1.0, 0.0, 0.0, 0.0])
    if not isinstance(raw_weights, list) or len(raw_weights) != 4:
        raise ContractError("params.weights must be a list of four numbers")
    weights = SimilarityWeights(*[float(v) for v in raw_weights])
    raw_clusters = doc["clusters"]
    if not isinstance(raw_clusters, dict) or not raw_clusters:
        raise ContractError("'clusters' must be a non-empty object")
    clusters = []
    seen: set[str] = set()
    for name in sorted(raw_clusters):
        members = raw_clusters[name]
        if not isinstance(members, list) or not members:
            raise ContractError(f"cluster {name!r} must list at least one entity")
        for m in members:
            if not isinstance(m, str):
                raise ContractError(f"cluster {name!r} has a non-string member")
            if m in seen:
                raise ContractError(f"entity {m!r} appears in more than one cluster")
            seen.add(m)
        clusters.append((name, tuple(sorted(members))))
    n = params.get("n", len(clusters))
    if n != len(clusters):
        raise ContractError(f"params.n is {n} but document has {len(clusters)} clusters")
    return Decomposition(weights, len(clusters), tuple(clusters))
