import random

import pytest
from helpers import random_ontology

from ontoharvest import turtle
from ontoharvest.ontology import Ontology


def test_empty_ontology_roundtrip():
    onto = Ontology.empty()
    text = turtle.serialize(onto)
    assert turtle.parse(text) == onto


def test_relation_and_attribute_roundtrip():
    onto = (
        Ontology.empty()
        .add_concept("облучение")
        .add_concept("тело")
        .add_relation("облучать", ("облучение", "тело"))
        .add_attribute("мощность", "облучение", "decimal")
    )
    back = turtle.parse(turtle.serialize(onto))
    assert back == onto


def test_relation_subsumption_roundtrip():
    onto = (
        Ontology.empty()
        .add_concept("a")
        .add_concept("b", parent="a")
        .add_relation("r1", ("b", "b"))
        .add_relation("r2", ("a", "a"))
        .add_relation_subsumption("r1", "r2")
    )
    assert turtle.parse(turtle.serialize(onto)) == onto


def test_labels_roundtrip_with_escapes():
    onto = Ontology.empty().add_concept("доза", label='a "quoted" \\ label')
    back = turtle.parse(turtle.serialize(onto))
    assert back.concepts["доза"] == 'a "quoted" \\ label'


def test_base_fixture_roundtrips_byte_stable(fixtures_dir):
    text = (fixtures_dir / "base_ontology.ttl").read_text(encoding="utf-8")
    onto = turtle.parse(text)
    assert len(onto.concepts) == 31  # ~30 domain concepts plus the root
    assert turtle.serialize(onto) == text
    assert turtle.serialize(turtle.parse(turtle.serialize(onto))) == text
    assert onto.validate() == []


def test_parse_accepts_bare_subclass_fragment():
    text = "\n".join(
        [
            "@prefix of: <http://x#> .",
            "of:доза rdfs:subClassOf of:root .",
        ]
    )
    onto = turtle.parse(text)
    assert onto.root == "root"
    assert onto.is_subconcept("доза", "root")


def test_parse_reports_line_numbers():
    text = "\n".join(
        [
            "@prefix of: <http://x#> .",
            "of:root a of:Concept .",
            'of:bad a of:Concept rdfs:label "x" .',  # missing ';'
        ]
    )
    with pytest.raises(turtle.TurtleParseError) as err:
        turtle.parse(text)
    assert err.value.line == 3


def test_parse_unknown_reference():
    text = "\n".join(
        [
            "of:root a of:Concept .",
            "of:r a of:Relation ; of:sig1 of:ghost .",
        ]
    )
    with pytest.raises(turtle.TurtleParseError, match="ghost"):
        turtle.parse(text)


def test_parse_unterminated_string():
    with pytest.raises(turtle.TurtleParseError):
        turtle.parse('of:root a of:Concept ; rdfs:label "oops .')


def test_parse_ambiguous_root():
    text = "of:a a of:Concept .\nof:b a of:Concept .\n"
    with pytest.raises(turtle.TurtleParseError, match="root"):
        turtle.parse(text)


def test_random_roundtrip_and_determinism():
    rng = random.Random(29)
    for _ in range(60):
        onto = random_ontology(rng, max_concepts=50)
        text = turtle.serialize(onto)
        back = turtle.parse(text)
        assert back == onto
        assert turtle.serialize(back) == text
