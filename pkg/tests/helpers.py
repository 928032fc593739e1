"""Seeded random generators shared by the unit and acceptance tests."""

from __future__ import annotations

import random
import string

from mono2ddd.dddmap import (
    AccessStats,
    BoundedContextModel,
    Coordination,
    DddEntity,
    DddModel,
    ContextRelationship,
    OperationDef,
)
from mono2ddd.decompose import Decomposition, SimilarityWeights
from mono2ddd.model import (
    Access,
    Attribute,
    EntityStructure,
    Functionality,
    MonolithModel,
    Reference,
)

UNIT_WEIGHTS = SimilarityWeights(1.0, 0.0, 0.0, 0.0)


def random_model(
    rng: random.Random,
    max_entities: int = 6,
    max_functionalities: int = 6,
    max_trace: int = 10,
    with_structure: bool = False,
) -> MonolithModel:
    entity_names = [
        string.ascii_uppercase[i] for i in range(rng.randint(2, max_entities))
    ]
    functionalities = []
    for i in range(rng.randint(1, max_functionalities)):
        trace = tuple(
            Access(rng.choice(entity_names), rng.choice("RW"))
            for _ in range(rng.randint(1, max_trace))
        )
        functionalities.append(Functionality(f"f{i}", trace))

    entities = []
    for name in entity_names:
        attributes = ()
        references = ()
        if with_structure:
            attributes = tuple(
                Attribute(f"field{k}", rng.choice(("String", "int", "boolean")))
                for k in range(rng.randint(0, 2))
            )
            targets = rng.sample(
                [e for e in entity_names if e != name],
                k=rng.randint(0, min(2, len(entity_names) - 1)),
            )
            references = tuple(
                Reference(f"ref{k}", target) for k, target in enumerate(targets)
            )
        entities.append(EntityStructure(name, attributes, references))
    return MonolithModel(tuple(entities), tuple(functionalities))


def random_partition(rng: random.Random, entity_names: list[str], k: int) -> Decomposition:
    """A uniformly random k-way partition wrapped as a named decomposition."""
    names = list(entity_names)
    rng.shuffle(names)
    groups = [[names[i]] for i in range(k)]
    for name in names[k:]:
        groups[rng.randrange(k)].append(name)
    groups.sort(key=min)
    clusters = tuple(
        (f"Cluster{i}", tuple(sorted(group))) for i, group in enumerate(groups)
    )
    return Decomposition(UNIT_WEIGHTS, k, clusters)


def clusters_dict(decomposition: Decomposition) -> dict[str, tuple[str, ...]]:
    return {name: members for name, members in decomposition.clusters}


def random_ddd_model(rng: random.Random, max_contexts: int = 4) -> DddModel:
    """A structurally valid DddModel with closed references, for round trips."""
    n_contexts = rng.randint(1, max_contexts)
    context_names = [f"Ctx{i}" for i in range(n_contexts)]

    entity_home = {}
    contexts_entities: dict[str, list[str]] = {}
    counter = 0
    for ctx in context_names:
        contexts_entities[ctx] = []
        for _ in range(rng.randint(1, 3)):
            name = f"E{counter}"
            counter += 1
            contexts_entities[ctx].append(name)
            entity_home[name] = ctx

    operations = {
        ctx: tuple(
            OperationDef(f"op{ctx}_{k}", (Access(contexts_entities[ctx][0], "R"),))
            for k in range(rng.randint(0, 3))
        )
        for ctx in context_names
    }

    relationships: dict[tuple[str, str], list[tuple[str, str]]] = {}
    contexts = []
    for ctx in context_names:
        own = contexts_entities[ctx]
        entities = []
        placeholders = {}
        for position, name in enumerate(own):
            refs = []
            others = [e for e in entity_home if e != name]
            for k in range(rng.randint(0, 2) if others else 0):
                target = rng.choice(others)
                if entity_home[target] == ctx:
                    refs.append(Reference(f"r{k}", target))
                else:
                    placeholder = f"{target}_Reference"
                    placeholders[placeholder] = (entity_home[target], target)
                    refs.append(Reference(f"r{k}", placeholder))
                    causes = relationships.setdefault((entity_home[target], ctx), [])
                    if (name, target) not in causes:
                        causes.append((name, target))
            entities.append(
                DddEntity(
                    name=name,
                    is_aggregate_root=position == 0,
                    attributes=tuple(
                        Attribute(f"a{k}", "String") for k in range(rng.randint(0, 2))
                    ),
                    local_refs=tuple(refs),
                    stats=AccessStats(
                        external_pct=rng.choice((0.0, 0.25, 0.5)),
                        local_pct=rng.choice((0.0, 0.5, 1.0)),
                        external_total=rng.randint(0, 4),
                        local_total=rng.randint(0, 4),
                    ),
                )
            )
        for placeholder in sorted(placeholders):
            owner_ctx, target = placeholders[placeholder]
            entities.append(
                DddEntity(
                    name=placeholder,
                    is_reference=True,
                    reference_of=(owner_ctx, target),
                )
            )

        coordinations = []
        partners = [
            c for c in context_names if c != ctx and operations[c]
        ]
        if operations[ctx] and partners and rng.random() < 0.5:
            other = rng.choice(partners)
            coordinations.append(
                Coordination(
                    f"flow{ctx}",
                    (
                        (ctx, f"{ctx}Service", operations[ctx][0].name),
                        (other, f"{other}Service", operations[other][0].name),
                    ),
                )
            )
        contexts.append(
            BoundedContextModel(
                name=ctx,
                aggregate_name=f"{ctx}Aggregate",
                entities=tuple(entities),
                service_name=f"{ctx}Service",
                operations=operations[ctx],
                coordinations=tuple(coordinations),
            )
        )

    rel = tuple(
        ContextRelationship(up, down, tuple(sorted(causes)))
        for (up, down), causes in sorted(relationships.items())
    )
    return DddModel("Decomposition", tuple(contexts), rel)
