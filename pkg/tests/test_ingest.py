"""Parsing and validation of the accesses and structure inputs."""

from __future__ import annotations

import pytest

from mono2ddd.errors import ContractError, DslParseError
from mono2ddd.ingest import (
    accesses_to_json,
    parse_accesses,
    parse_model,
    parse_structure,
    parse_structure_json,
    structure_to_json,
    validate_model,
)
from mono2ddd.model import Access, EntityStructure, Functionality, Reference


def test_parse_accesses_preserves_order():
    fs = parse_accesses(
        '{"functionalities": [{"name": "f", "trace": [["B", "R"], ["A", "W"], ["B", "W"]]}]}'
    )
    assert [a.entity for a in fs[0].trace] == ["B", "A", "B"]
    assert [a.mode for a in fs[0].trace] == ["R", "W", "W"]


def test_parse_accesses_expands_rw():
    fs = parse_accesses('{"functionalities": [{"name": "f", "trace": [["A", "RW"]]}]}')
    assert fs[0].trace == (Access("A", "R"), Access("A", "W"))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("{", "malformed JSON"),
        ("[]", "expected dict"),
        ('{"functionalities": 3}', "functionalities"),
        ('{"functionalities": [{"trace": [["A","R"]]}]}', "name"),
        ('{"functionalities": [{"name": "f", "trace": []}]}', "empty trace"),
        ('{"functionalities": [{"name": "f", "trace": [["A"]]}]}', "trace[0]"),
        ('{"functionalities": [{"name": "f", "trace": [["A", "X"]]}]}', "unknown access mode"),
        ('{"functionalities": [{"name": "", "trace": [["A", "R"]]}]}', "empty functionality name"),
    ],
)
def test_parse_accesses_rejects_bad_documents(text, fragment):
    with pytest.raises(ContractError) as err:
        parse_accesses(text)
    assert fragment in str(err.value)


def test_parse_accesses_rejects_duplicate_names():
    doc = (
        '{"functionalities": ['
        '{"name": "f", "trace": [["A", "R"]]},'
        '{"name": "f", "trace": [["B", "R"]]}]}'
    )
    with pytest.raises(ContractError) as err:
        parse_accesses(doc)
    assert "duplicate functionality" in str(err.value)


DSL = """\
# two entities
entity Topic extends Content {
    attr name: String;
    ref question -> Question;
}

entity Question { }
"""


def test_parse_structure_dsl():
    entities = parse_structure(DSL)
    assert [e.name for e in entities] == ["Topic", "Question"]
    topic = entities[0]
    assert topic.attributes[0].name == "name"
    assert topic.attributes[0].type == "String"
    kinds = {(r.field, r.target): r.kind for r in topic.references}
    assert kinds[("super", "Content")] == "inheritance"
    assert kinds[("question", "Question")] == "association"


def test_parse_structure_dsl_is_whitespace_insensitive():
    squeezed = parse_structure("entity A{attr x:int;ref y->B;}entity B{}")
    spaced = parse_structure("entity A {\n  attr x : int ;\n  ref y -> B ;\n}\nentity B { }")
    assert squeezed == spaced


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("entity {", 1, "entity name"),
        ("entity A (", 1, "'{'"),
        ("entity A {\n  attr x int;\n}", 2, "':'"),
        ("entity A {\n  ref x - B;\n}", 2, "'->'"),
        ("entity A {\n  bogus;\n}", 2, "'attr', 'ref'"),
        ("entity A { }\nentity A { }", 2, "duplicate entity"),
        ("entity A {\n  attr x: int;\n  attr x: int;\n}", 1, "duplicate field"),
    ],
)
def test_parse_structure_dsl_reports_position(text, line, fragment):
    with pytest.raises(DslParseError) as err:
        parse_structure(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_parse_structure_json_rejects_unknown_kind():
    doc = (
        '{"entities": [{"name": "A", "references":'
        ' [{"field": "x", "target": "B", "kind": "composition"}]}]}'
    )
    with pytest.raises(ContractError) as err:
        parse_structure_json(doc)
    assert "unknown reference kind" in str(err.value)


def test_structure_autodetect_picks_json():
    entities = parse_structure('  {"entities": [{"name": "A"}]}')
    assert entities == [EntityStructure("A")]


def test_validate_model_synthesizes_accessed_entities():
    model = validate_model([Functionality("f", (Access("A", "R"), Access("B", "W")))])
    assert model.entity_names() == ("A", "B")
    assert any("synthesized" in w for w in model.warnings)


def test_validate_model_synthesizes_reference_targets():
    structures = [EntityStructure("A", references=(Reference("x", "Ghost"),))]
    model = validate_model([Functionality("f", (Access("A", "R"),))], structures)
    assert "Ghost" in model.entity_names()


def test_validate_model_keeps_first_duplicate():
    structures = [
        EntityStructure("A", attributes=()),
        EntityStructure("A", references=(Reference("x", "A"),)),
    ]
    model = validate_model([Functionality("f", (Access("A", "R"),))], structures)
    assert model.structure("A").references == ()
    assert any("duplicate entity" in w for w in model.warnings)


def test_validate_model_drops_second_inheritance():
    structures = [
        EntityStructure(
            "A",
            references=(
                Reference("super", "B", "inheritance"),
                Reference("super2", "C", "inheritance"),
            ),
        ),
        EntityStructure("B"),
        EntityStructure("C"),
    ]
    model = validate_model([Functionality("f", (Access("A", "R"),))], structures)
    kinds = [r.kind for r in model.structure("A").references]
    assert kinds.count("inheritance") == 1


def test_validate_model_is_a_fixpoint():
    model = parse_model(
        '{"functionalities": [{"name": "f", "trace": [["A", "R"], ["Z", "W"]]}]}',
        "entity A { ref other -> Missing; }",
    )
    again = validate_model(model.functionalities, model.entities)
    assert again.entities == model.entities
    assert again.functionalities == model.functionalities


def test_serialization_round_trips():
    model = parse_model(
        '{"functionalities": [{"name": "f", "trace": [["A", "RW"], ["B", "R"]]}]}',
        DSL,
    )
    assert parse_accesses(accesses_to_json(model)) == list(model.functionalities)
    reparsed = validate_model(
        model.functionalities, parse_structure(structure_to_json(model))
    )
    assert reparsed.entities == model.entities
