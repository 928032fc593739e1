"""Similarity construction, clustering determinism, and the weight grid."""

from __future__ import annotations

import random

import pytest

from helpers import UNIT_WEIGHTS, random_model
from oracles import oracle_cluster, oracle_similarity

from mono2ddd.decompose import (
    Decomposition,
    SimilarityWeights,
    build_similarity,
    cluster,
    decompose,
    decomposition_to_json,
    parse_decomposition,
    search_decompositions,
    weight_grid,
)
from mono2ddd.errors import ContractError, DecompositionError
from mono2ddd.ingest import parse_model

TOL = 1e-9


@pytest.mark.parametrize("bad", [(0.5, 0.5, 0.5, 0.5), (1.0, 0.1, -0.1, 0.0)])
def test_weights_must_be_convex(bad):
    with pytest.raises(DecompositionError):
        SimilarityWeights(*bad)


def test_identical_access_sets_have_similarity_one():
    model = parse_model(
        '{"functionalities": ['
        '{"name": "f1", "trace": [["A", "R"], ["B", "R"]]},'
        '{"name": "f2", "trace": [["B", "W"], ["A", "W"]]}]}'
    )
    matrix = build_similarity(model, UNIT_WEIGHTS)
    assert matrix.similarity("A", "B") == pytest.approx(1.0, abs=TOL)


def test_never_coaccessed_entities_have_similarity_zero():
    model = parse_model(
        '{"functionalities": ['
        '{"name": "f1", "trace": [["A", "R"]]},'
        '{"name": "f2", "trace": [["B", "W"]]}]}'
    )
    for weights in weight_grid(0.5):
        matrix = build_similarity(model, weights)
        assert matrix.similarity("A", "B") == 0.0


def test_fixture_a_similarity_values(fixture_a):
    matrix = build_similarity(fixture_a, UNIT_WEIGHTS)
    # A is accessed by f1,f3,f4 and B by f1,f4: one-way 2/3 and 1.
    assert matrix.similarity("A", "B") == pytest.approx(5 / 6, abs=TOL)
    # B={f1,f4} vs C={f2,f3,f4}: one-way 1/2 and 1/3.
    assert matrix.similarity("B", "C") == pytest.approx(5 / 12, abs=TOL)
    assert matrix.similarity("A", "D") == 0.0
    oracle = oracle_similarity(fixture_a, UNIT_WEIGHTS)
    for (lo, hi), value in matrix.values.items():
        assert value == pytest.approx(oracle[frozenset((lo, hi))], abs=TOL)


def test_similarity_matches_oracle_on_random_models():
    rng = random.Random(20240811)
    for _ in range(60):
        model = random_model(rng)
        weights = rng.choice(weight_grid(0.25))
        matrix = build_similarity(model, weights)
        oracle = oracle_similarity(model, weights)
        for (lo, hi), value in matrix.values.items():
            assert abs(value - oracle[frozenset((lo, hi))]) < TOL
            assert 0.0 <= value <= 1.0 + TOL


def test_fixture_a_two_clusters(fixture_a):
    result = decompose(fixture_a, UNIT_WEIGHTS, 2)
    assert dict(result.clusters) == {"Cluster0": ("A", "B"), "Cluster1": ("C", "D")}


def test_cluster_degenerate_cuts(fixture_a):
    singletons = decompose(fixture_a, UNIT_WEIGHTS, 4)
    assert all(len(m) == 1 for _, m in singletons.clusters)
    whole = decompose(fixture_a, UNIT_WEIGHTS, 1)
    assert dict(whole.clusters) == {"Cluster0": ("A", "B", "C", "D")}


def test_cluster_count_bounds(fixture_a):
    matrix = build_similarity(fixture_a, UNIT_WEIGHTS)
    with pytest.raises(DecompositionError):
        cluster(matrix, UNIT_WEIGHTS, 5)
    with pytest.raises(DecompositionError):
        cluster(matrix, UNIT_WEIGHTS, 0)


def test_clustering_matches_lance_williams_oracle():
    rng = random.Random(20240812)
    for _ in range(60):
        model = random_model(rng)
        weights = rng.choice(weight_grid(0.5))
        n = rng.randint(1, len(model.entity_names()))
        ours = decompose(model, weights, n)
        partition = frozenset(frozenset(m) for _, m in ours.clusters)
        assert partition == oracle_cluster(model, weights, n)


def test_cluster_names_follow_smallest_member():
    rng = random.Random(20240813)
    for _ in range(30):
        model = random_model(rng)
        n = rng.randint(1, len(model.entity_names()))
        result = decompose(model, UNIT_WEIGHTS, n)
        smallest = [members[0] for _, members in result.clusters]
        assert smallest == sorted(smallest)
        assert list(result.cluster_names()) == [f"Cluster{i}" for i in range(n)]


def test_monotone_cut_refines():
    rng = random.Random(20240814)
    for _ in range(30):
        model = random_model(rng)
        size = len(model.entity_names())
        for n in range(2, size + 1):
            fine = decompose(model, UNIT_WEIGHTS, n)
            coarse = decompose(model, UNIT_WEIGHTS, n - 1)
            coarse_sets = [set(m) for _, m in coarse.clusters]
            for _, members in fine.clusters:
                assert any(set(members) <= c for c in coarse_sets)


def test_clustering_is_deterministic(fixture_a):
    a = decomposition_to_json(decompose(fixture_a, UNIT_WEIGHTS, 2))
    b = decomposition_to_json(decompose(fixture_a, UNIT_WEIGHTS, 2))
    assert a == b


def test_weight_grid_sizes():
    assert len(weight_grid(1.0)) == 4
    assert len(weight_grid(0.5)) == 10
    for weights in weight_grid(0.5):
        assert abs(sum(weights.as_tuple()) - 1.0) < TOL


def test_search_is_sorted_and_thread_stable(fixture_a, monkeypatch):
    serial = search_decompositions(fixture_a, 0.5, [2, 3], threads=1)
    threaded = search_decompositions(fixture_a, 0.5, [2, 3], threads=4)
    assert serial == threaded
    assert len(serial) == 20
    keys = [(d.weights.as_tuple(), d.n) for d in serial]
    assert keys == sorted(keys)

    monkeypatch.setenv("MONO2DDD_THREADS", "3")
    assert search_decompositions(fixture_a, 0.5, [2, 3]) == serial
    monkeypatch.setenv("MONO2DDD_THREADS", "zero")
    with pytest.raises(ContractError):
        search_decompositions(fixture_a, 0.5, [2])


def test_decomposition_json_round_trip(fixture_a_decomposition):
    text = decomposition_to_json(fixture_a_decomposition)
    again = parse_decomposition(text)
    assert again == fixture_a_decomposition
    assert decomposition_to_json(again) == text


@pytest.mark.parametrize(
    "doc,fragment",
    [
        ("{]", "malformed JSON"),
        ('{"params": {}}', "clusters"),
        ('{"clusters": {}}', "non-empty"),
        ('{"clusters": {"c": []}}', "at least one entity"),
        ('{"clusters": {"c": ["A"], "d": ["A"]}}', "more than one cluster"),
        ('{"params": {"n": 3}, "clusters": {"c": ["A"]}}', "params.n"),
    ],
)
def test_parse_decomposition_rejects_bad_documents(doc, fragment):
    with pytest.raises(ContractError) as err:
        parse_decomposition(doc)
    assert fragment in str(err.value)


def test_partition_invariant_on_random_models():
    rng = random.Random(20240815)
    for _ in range(40):
        model = random_model(rng)
        n = rng.randint(1, len(model.entity_names()))
        result = decompose(model, UNIT_WEIGHTS, n)
        seen = [e for _, members in result.clusters for e in members]
        assert sorted(seen) == list(model.entity_names())
        assert len(seen) == len(set(seen))
        assert all(members for _, members in result.clusters)
