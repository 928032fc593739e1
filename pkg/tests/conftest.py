"""Shared fixtures: the two hand-checked sample models as text and objects."""

from __future__ import annotations

import pytest

from mono2ddd.decompose import SimilarityWeights, decompose
from mono2ddd.ingest import parse_model

FIXTURE_A_ACCESSES = """\
{
  "functionalities": [
    {"name": "f1", "trace": [["A", "R"], ["B", "W"], ["A", "W"]]},
    {"name": "f2", "trace": [["C", "R"], ["D", "R"], ["C", "W"]]},
    {"name": "f3", "trace": [["A", "R"], ["C", "W"]]},
    {"name": "f4", "trace": [["C", "R"], ["A", "W"], ["B", "R"]]}
  ]
}
"""

TOPIC_QUESTION_ACCESSES = """\
{
  "functionalities": [
    {"name": "editTopic", "trace": [["Topic", "R"], ["Topic", "W"]]},
    {"name": "answerQuestion", "trace": [["Question", "R"], ["Question", "W"]]}
  ]
}
"""

TOPIC_QUESTION_STRUCTURE = """\
# topic/question sample structure
entity Topic {
    attr name: String;
    ref question -> Question;
}
entity Question {
    attr title: String;
    attr content: String;
}
"""

ACCESS_WEIGHTS = SimilarityWeights(1.0, 0.0, 0.0, 0.0)


@pytest.fixture
def fixture_a():
    return parse_model(FIXTURE_A_ACCESSES)


@pytest.fixture
def fixture_a_decomposition(fixture_a):
    return decompose(fixture_a, ACCESS_WEIGHTS, 2)


@pytest.fixture
def topic_question():
    return parse_model(TOPIC_QUESTION_ACCESSES, TOPIC_QUESTION_STRUCTURE)


@pytest.fixture
def topic_question_decomposition(topic_question):
    return decompose(topic_question, ACCESS_WEIGHTS, 2)
