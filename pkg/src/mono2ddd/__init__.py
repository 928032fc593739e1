"""Turn monolith entity-access traces into microservice candidate
decompositions, quality measures, saga refactorings, and a generated
domain-driven design model emitted in a context-mapping DSL subset."""

from .cml import (
    CmlDocument,
    document_from_ddd,
    emit_document,
    merge_bounded_contexts,
    parse_document,
    split_aggregate,
    validate_document,
)
from .decompose import (
    Decomposition,
    SimilarityMatrix,
    SimilarityWeights,
    build_similarity,
    cluster,
    decompose,
    decomposition_to_json,
    parse_decomposition,
    search_decompositions,
    weight_grid,
)
from .dddmap import (
    AccessStats,
    BoundedContextModel,
    Coordination,
    ContextRelationship,
    DddEntity,
    DddModel,
    OperationDef,
    access_stats,
    build_ddd_model,
    map_decomposition,
    name_operation,
    resolve_references,
)
from .diagrams import context_map_dot, coordination_bpmn, decomposition_dot, document_dot
from .errors import (
    CmlEmitError,
    CmlParseError,
    ContractError,
    DecompositionError,
    DslParseError,
    MappingError,
    Mono2DddError,
    RefactorError,
    SagaError,
)
from .ingest import (
    accesses_to_json,
    parse_accesses,
    parse_model,
    parse_structure,
    structure_to_json,
    validate_model,
)
from .measures import (
    MeasureReport,
    cohesion,
    complexity,
    coupling,
    measure,
    rank_decompositions,
    report_tsv,
    search_candidates,
)
from .model import (
    Access,
    Attribute,
    EntityStructure,
    Functionality,
    MonolithModel,
    Reference,
)
from .saga import (
    ReductionStats,
    Saga,
    Step,
    collapse_runs,
    merge_steps,
    parse_sagas,
    refactor_functionality,
    refactor_model,
    sagas_to_json,
    stats_tsv,
)

__version__ = "0.1.0"

__all__ = [
    "Access",
    "AccessStats",
    "Attribute",
    "BoundedContextModel",
    "CmlDocument",
    "CmlEmitError",
    "CmlParseError",
    "ContextRelationship",
    "ContractError",
    "Coordination",
    "DddEntity",
    "DddModel",
    "Decomposition",
    "DecompositionError",
    "DslParseError",
    "EntityStructure",
    "Functionality",
    "MappingError",
    "MeasureReport",
    "Mono2DddError",
    "MonolithModel",
    "OperationDef",
    "Reference",
    "ReductionStats",
    "RefactorError",
    "Saga",
    "SagaError",
    "SimilarityMatrix",
    "SimilarityWeights",
    "Step",
    "access_stats",
    "accesses_to_json",
    "build_ddd_model",
    "build_similarity",
    "cluster",
    "cohesion",
    "collapse_runs",
    "complexity",
    "context_map_dot",
    "coordination_bpmn",
    "coupling",
    "decompose",
    "decomposition_dot",
    "decomposition_to_json",
    "document_dot",
    "document_from_ddd",
    "emit_document",
    "map_decomposition",
    "measure",
    "merge_bounded_contexts",
    "merge_steps",
    "name_operation",
    "parse_accesses",
    "parse_decomposition",
    "parse_document",
    "parse_model",
    "parse_sagas",
    "parse_structure",
    "rank_decompositions",
    "refactor_functionality",
    "refactor_model",
    "report_tsv",
    "resolve_references",
    "sagas_to_json",
    "search_candidates",
    "search_decompositions",
    "split_aggregate",
    "stats_tsv",
    "structure_to_json",
    "validate_document",
    "validate_model",
    "weight_grid",
]
