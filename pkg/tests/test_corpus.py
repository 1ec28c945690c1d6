import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontoharvest.corpus import (
    CorpusError,
    Lexicon,
    Sentence,
    Token,
    load_lexicon,
    read_conllu,
    tag_with_lexicon,
    wordform_index,
    write_conllu,
)

SAMPLE = """\
# sent_id = s1
# text = Малые дозы не вредят.
1\tМалые\tмалый\tADJ\t_\tCase=Nom|Number=Plur\t_\t_\t_\t_
2\tдозы\tдоза\tNOUN\t_\tCase=Nom|Number=Plur\t_\t_\t_\t_
3\tне\tне\tPART\t_\t_\t_\t_\t_\t_
"""


def test_read_conllu_empty():
    assert read_conllu("") == []


def test_read_conllu_basic():
    sentences = read_conllu(SAMPLE)
    assert len(sentences) == 1
    sent = sentences[0]
    assert sent.sent_id == "s1"
    assert sent.text == "Малые дозы не вредят."
    assert [t.form for t in sent.tokens] == ["Малые", "дозы", "не"]
    assert sent.tokens[1].lemma == "доза"
    assert sent.tokens[0].feats == {"Case": "Nom", "Number": "Plur"}


def test_read_conllu_wrong_columns():
    bad = "1\tслово\tслово\tNOUN\t_\t_\t_\t_\t_\n"  # 9 columns
    with pytest.raises(CorpusError) as err:
        read_conllu(bad)
    assert err.value.line == 1


def test_read_conllu_non_contiguous_ids():
    bad = (
        "1\tа\tа\tNOUN\t_\t_\t_\t_\t_\t_\n"
        "3\tб\tб\tNOUN\t_\t_\t_\t_\t_\t_\n"
    )
    with pytest.raises(CorpusError) as err:
        read_conllu(bad)
    assert err.value.line == 2


def test_read_conllu_skips_ranges_and_empty_nodes():
    text = (
        "1-2\tдвух\tдвух\tX\t_\t_\t_\t_\t_\t_\n"
        "1\tдвух\tдва\tNUM\t_\t_\t_\t_\t_\t_\n"
        "2\tслов\tслово\tNOUN\t_\t_\t_\t_\t_\t_\n"
        "2.1\tэллипсис\tэллипсис\tX\t_\t_\t_\t_\t_\t_\n"
    )
    sentences = read_conllu(text)
    assert [t.form for t in sentences[0].tokens] == ["двух", "слов"]


def test_write_read_roundtrip():
    sentences = read_conllu(SAMPLE, doc_id="d")
    again = read_conllu(write_conllu(sentences))
    assert again == sentences


def test_tagger_demo_sentence(fixtures_dir):
    lexicon = load_lexicon((fixtures_dir / "demo_lexicon.tsv").read_text(encoding="utf-8"))
    sentences = tag_with_lexicon("Малые дозы не дают наблюдаемых эффектов.", lexicon)
    assert len(sentences) == 1
    tokens = sentences[0].tokens
    dozy = tokens[1]
    assert (dozy.form, dozy.lemma, dozy.pos) == ("дозы", "доза", "NOUN")
    assert tokens[-1].pos == "PUNCT"


def test_tagger_empty_input():
    assert tag_with_lexicon("", Lexicon()) == []


def test_tagger_unknown_word_fallback():
    sentences = tag_with_lexicon("Фубар.", Lexicon())
    tok = sentences[0].tokens[0]
    assert (tok.lemma, tok.pos, tok.feats) == ("фубар", "X", {})


def test_tagger_hyphenated_word_is_single_token():
    sentences = tag_with_lexicon("Гамма-излучение опасно.", Lexicon())
    assert sentences[0].tokens[0].form == "Гамма-излучение"


def test_tagger_splits_sentences():
    sentences = tag_with_lexicon("Раз. Два! Три?", Lexicon())
    assert [s.sent_id for s in sentences] == ["s1", "s2", "s3"]
    assert [s.text for s in sentences] == ["Раз.", "Два!", "Три?"]


def test_wordform_index_fragment(fragment_corpus):
    index = wordform_index(fragment_corpus)
    # the fragment mentions облучение in two sentences
    occurrences = index["облучение"]
    assert {sent_id for _doc, sent_id, _i in occurrences} == {"s1", "s4"}
    assert index.get("þ", []) == []


def test_wordform_index_empty():
    assert wordform_index([]) == {}


words = st.text(
    alphabet="абвгдеж",
    min_size=1,
    max_size=5,
)


@st.composite
def corpora(draw):
    n_sents = draw(st.integers(0, 5))
    corpus = []
    for si in range(n_sents):
        n_toks = draw(st.integers(1, 8))
        tokens = tuple(
            Token(index=i + 1, form=draw(words), lemma=draw(words), pos="NOUN")
            for i in range(n_toks)
        )
        corpus.append(
            Sentence(doc_id="d", sent_id=f"s{si + 1}", text="", tokens=tokens)
        )
    return corpus


@settings(max_examples=60, deadline=None)
@given(corpora())
def test_wordform_index_matches_linear_scan(corpus):
    index = wordform_index(corpus)
    # oracle: exhaustive scan per lemma
    lemmas = {t.lemma.casefold() for s in corpus for t in s.tokens}
    for lemma in lemmas:
        expected = [
            (s.doc_id, s.sent_id, t.index)
            for s in corpus
            for t in s.tokens
            if t.lemma.casefold() == lemma
        ]
        assert index[lemma] == expected
    assert set(index) == lemmas


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="абв .!?х-", max_size=40))
def test_tagger_output_always_wellformed(text):
    for sent in tag_with_lexicon(text, Lexicon()):
        assert sent.tokens
        assert [t.index for t in sent.tokens] == list(range(1, len(sent.tokens) + 1))
        for tok in sent.tokens:
            assert tok.form and tok.lemma
