from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fragment_corpus():
    from ontoharvest.corpus import load_lexicon, tag_with_lexicon

    lexicon = load_lexicon((FIXTURES / "demo_lexicon.tsv").read_text(encoding="utf-8"))
    return tag_with_lexicon(
        (FIXTURES / "fragment.txt").read_text(encoding="utf-8"), lexicon, doc_id="fragment"
    )


@pytest.fixture(scope="session")
def shipped_templates():
    from ontoharvest.templates import parse_templates

    return parse_templates((FIXTURES / "templates.tpl").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def base_ontology():
    from ontoharvest import turtle

    return turtle.parse((FIXTURES / "base_ontology.ttl").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def deverbal_lexicon():
    from ontoharvest.extension import load_deverbal

    return load_deverbal((FIXTURES / "deverbal.tsv").read_text(encoding="utf-8"))
