"""
Reading a monolith description
==============================

The library consumes two inputs: an entity-access trace document (JSON)
and an optional entity structure, written either as JSON or in a small
declaration language. This script parses both and shows what the
validator repairs on sloppy input.
"""

from mono2ddd import parse_model

# Each functionality is an ordered list of [entity, mode] accesses.
# RW expands to a read followed by a write.
ACCESSES = """
{
  "functionalities": [
    {"name": "editTopic", "trace": [["Topic", "RW"]]},
    {"name": "answerQuestion", "trace": [["Question", "R"], ["Question", "W"]]}
  ]
}
"""

# The structure DSL declares entities, attributes, and references.
# 'extends' records inheritance; '#' starts a comment.
STRUCTURE = """
# sample domain: topics and the questions they group
entity Topic {
    attr name: String;
    ref question -> Question;
}
entity Question {
    attr title: String;
    attr content: String;
}
entity TimedQuestion extends Question {
    attr deadline: Date;
}
"""

model = parse_model(ACCESSES, STRUCTURE)
print("functionalities:", [f.name for f in model.functionalities])
print("entities:", list(model.entity_names()))

for entity in model.entities:
    for ref in entity.references:
        print(f"{entity.name}.{ref.field} -> {ref.target} ({ref.kind})")

# The validator never raises: it drops duplicates, synthesizes entities
# that are accessed or referenced but not declared, and reports every
# repair as a warning on the returned model.
repaired = parse_model(ACCESSES, "entity Topic { ref q -> Ghost; }")
for warning in repaired.warnings:
    print("warning:", warning)
