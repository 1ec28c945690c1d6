import pytest

from ontoharvest.templates import (
    AttributeEmission,
    Gap,
    HyponymyEmission,
    ListMatcher,
    Template,
    TemplateError,
    TokenMatcher,
    parse_templates,
    render_template,
)

RULE2 = """\
template rule2_gen_attribute
  priority 20
  anchor owner
  seq
    tok lemma=$anchor cap=owner
    tok pos=ADJ case=Gen
    tok pos=NOUN case=Gen cap=attr
  end
  emit attribute owner attr
end
"""


def test_parse_rule2():
    (template,) = parse_templates(RULE2)
    assert template.name == "rule2_gen_attribute"
    assert template.priority == 20
    assert template.anchor == "owner"
    assert not template.draft
    first, second, third = template.elements
    assert first == TokenMatcher(lemma="$anchor", capture="owner")
    assert second == TokenMatcher(pos="ADJ", case="Gen")
    assert third == TokenMatcher(pos="NOUN", case="Gen", capture="attr")
    assert template.emissions == (AttributeEmission(owner="owner", attribute="attr"),)


def test_shipped_rule1_lemma_set(shipped_templates):
    rule1 = next(t for t in shipped_templates if t.name == "rule1_verb_ins_attribute")
    verb_element = rule1.elements[2]
    assert verb_element.lemma_in == frozenset(
        {"отличаться", "выражаться", "проявляться", "характеризоваться", "обладать"}
    )


def test_shipped_file_parses_five_templates(shipped_templates):
    assert [t.name for t in shipped_templates] == [
        "rule1_verb_ins_attribute",
        "rule2_gen_attribute",
        "rule3_explicit_attribute_list",
        "rule4_deverbal_object",
        "hearst_such_as",
    ]


def test_empty_file():
    assert parse_templates("") == []
    assert parse_templates("# only a comment\n") == []


def test_dangling_capture_reference():
    bad = """\
template t
  seq
    tok pos=NOUN cap=owner
  end
  emit attribute owner attr
end
"""
    with pytest.raises(TemplateError, match="attr"):
        parse_templates(bad)


def test_duplicate_template_name():
    with pytest.raises(TemplateError, match="duplicate"):
        parse_templates(RULE2 + RULE2)


def test_syntax_error_carries_line_number():
    bad = "template t\n  seq\n    tok\n  end\nend\n"
    with pytest.raises(TemplateError) as err:
        parse_templates(bad)
    assert err.value.line == 3


def test_anchor_requires_capture():
    bad = """\
template t
  anchor owner
  seq
    tok pos=NOUN cap=x
  end
  emit concept x
end
"""
    with pytest.raises(TemplateError, match="anchor"):
        parse_templates(bad)


def test_anchor_lemma_requires_declaration():
    bad = """\
template t
  seq
    tok lemma=$anchor cap=x
  end
  emit concept x
end
"""
    with pytest.raises(TemplateError, match="anchor"):
        parse_templates(bad)


def test_gap_bounds_checked():
    bad = "template t\n  seq\n    gap 3..9\n    tok pos=NOUN cap=x\n  end\n  emit concept x\nend\n"
    with pytest.raises(TemplateError, match="gap"):
        parse_templates(bad)


def test_list_parsing_defaults_and_skip():
    text = """\
template enum
  seq
    tok lemma=как
    list cap=items sep=(,) conj=(и|или) skip=(pos=ADV|pos=PART)
      tok pos=NOUN
    end
  end
  emit concept items
end
"""
    (template,) = parse_templates(text)
    list_el = template.elements[1]
    assert isinstance(list_el, ListMatcher)
    assert list_el.capture == "items"
    assert list_el.separators == frozenset({","})
    assert list_el.conjunctions == frozenset({"и", "или"})
    assert list_el.skip == (TokenMatcher(pos="ADV"), TokenMatcher(pos="PART"))
    assert list_el.item == TokenMatcher(pos="NOUN")


def test_quoted_separator():
    text = """\
template enum
  seq
    list cap=items sep=";" conj=(и)
      tok pos=NOUN
    end
  end
  emit concept items
end
"""
    (template,) = parse_templates(text)
    assert template.elements[0].separators == frozenset({";"})


def test_at_most_one_list():
    bad = """\
template t
  seq
    list cap=a
      tok pos=NOUN
    end
    list cap=b
      tok pos=NOUN
    end
  end
  emit concept a
end
"""
    with pytest.raises(TemplateError, match="list"):
        parse_templates(bad)


def test_tok_requires_constraint():
    bad = "template t\n  seq\n    tok cap=x\n  end\n  emit concept x\nend\n"
    with pytest.raises(TemplateError, match="constraint"):
        parse_templates(bad)


def test_render_parse_roundtrip(shipped_templates):
    for template in shipped_templates:
        text = render_template(template)
        (back,) = parse_templates(text)
        assert back == template


def test_render_roundtrip_with_gap_and_draft():
    template = Template(
        name="draft1",
        elements=(
            TokenMatcher(lemma="$anchor", capture="owner"),
            Gap(min_skip=0, max_skip=2),
            TokenMatcher(pos="NOUN", case="Gen", capture="cap1"),
        ),
        emissions=(AttributeEmission(owner="owner", attribute="cap1"),),
        priority=0,
        anchor="owner",
        draft=True,
    )
    (back,) = parse_templates(render_template(template))
    assert back == template
    assert back.draft


def test_comments_and_blank_lines_ignored():
    text = "# header\n\n" + RULE2.replace(
        "tok pos=ADJ case=Gen", "tok pos=ADJ case=Gen  # genitive modifier"
    )
    (template,) = parse_templates(text)
    assert template.elements[1] == TokenMatcher(pos="ADJ", case="Gen")
