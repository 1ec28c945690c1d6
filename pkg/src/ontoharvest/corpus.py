"""Annotated-corpus model and ingestion.

Two ways in: :func:`read_conllu` for pre-tagged text (the normal route) and
:func:`tag_with_lexicon`, a deliberately small lookup tagger that exists so
the demo fragment can be processed without an external morphological parser.
Lemma lookups throughout the package are casefolded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Universal Dependencies inventories; ingestion accepts these plus X.
UPOS_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
)

FEAT_KEYS = (
    "Case", "Number", "Gender", "Animacy", "Person", "Tense", "Aspect",
    "Mood", "Voice", "Degree", "VerbForm", "Variant",
)

CASES = ("Nom", "Gen", "Dat", "Acc", "Ins", "Loc", "Voc")


class CorpusError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Token:
    index: int                      # 1-based position in sentence
    form: str
    lemma: str
    pos: str = "X"
    feats: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.form:
            raise CorpusError("token form must be non-empty")
        if not self.lemma:
            raise CorpusError("token lemma must be non-empty")


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_id: str
    text: str
    tokens: tuple[Token, ...]

    def lemmas(self) -> set[str]:
        return {t.lemma.casefold() for t in self.tokens}


def _parse_feats(raw: str, line: int) -> dict[str, str]:
    if raw == "_" or raw == "":
        return {}
    feats = {}
    for pair in raw.split("|"):
        if "=" not in pair:
            raise CorpusError(f"malformed feature {pair!r}", line)
        key, value = pair.split("=", 1)
        feats[key] = value
    return feats


def read_conllu(text: str, doc_id: str = "corpus") -> list[Sentence]:
    """Parse CoNLL-U text into sentences.

    Honors ``# newdoc id``, ``# sent_id`` and ``# text`` comments; skips
    multiword-token ranges (``3-4``) and empty nodes (``8.1``).  Raises
    :class:`CorpusError` with a line number on a wrong column count or
    non-contiguous token ids.
    """
    sentences: list[Sentence] = []
    current_doc = doc_id
    sent_id: str | None = None
    sent_text = ""
    tokens: list[Token] = []
    auto_sent = 0

    def flush(line: int) -> None:
        nonlocal sent_id, sent_text, tokens, auto_sent
        if not tokens:
            sent_id, sent_text = None, ""
            return
        auto_sent += 1
        sid = sent_id if sent_id is not None else f"s{auto_sent}"
        sentences.append(
            Sentence(doc_id=current_doc, sent_id=sid, text=sent_text, tokens=tuple(tokens))
        )
        sent_id, sent_text, tokens = None, "", []

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            flush(lineno)
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("newdoc id"):
                _, _, value = body.partition("=")
                current_doc = value.strip() or current_doc
            elif body.startswith("sent_id"):
                _, _, value = body.partition("=")
                sent_id = value.strip()
            elif body.startswith("text"):
                _, _, value = body.partition("=")
                sent_text = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise CorpusError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        tid, form, lemma, upos, _xpos, feats = cols[:6]
        if "-" in tid or "." in tid:
            continue  # multiword-token range or empty node
        try:
            index = int(tid)
        except ValueError:
            raise CorpusError(f"bad token id {tid!r}", lineno)
        if index != len(tokens) + 1:
            raise CorpusError(
                f"non-contiguous token id {index} (expected {len(tokens) + 1})", lineno
            )
        if not lemma or lemma == "_":
            lemma = form.casefold()
            upos = "X"
        tokens.append(
            Token(
                index=index,
                form=form,
                lemma=lemma,
                pos=upos if upos != "_" else "X",
                feats=_parse_feats(feats, lineno),
            )
        )
    flush(len(text.splitlines()))
    return sentences


def write_conllu(sentences: list[Sentence]) -> str:
    """Debug/interchange writer; inverse of :func:`read_conllu` on the
    fields this package uses."""
    out = []
    last_doc = None
    for sent in sentences:
        if sent.doc_id != last_doc:
            out.append(f"# newdoc id = {sent.doc_id}")
            last_doc = sent.doc_id
        out.append(f"# sent_id = {sent.sent_id}")
        out.append(f"# text = {sent.text}")
        for tok in sent.tokens:
            feats = "|".join(f"{k}={v}" for k, v in sorted(tok.feats.items())) or "_"
            out.append(
                "\t".join(
                    [str(tok.index), tok.form, tok.lemma, tok.pos, "_", feats,
                     "_", "_", "_", "_"]
                )
            )
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


@dataclass
class Lexicon:
    """Case-insensitive wordform lookup table for the fallback tagger."""

    entries: dict[str, list[tuple[str, str, dict[str, str]]]] = field(default_factory=dict)

    def lookup(self, form: str) -> list[tuple[str, str, dict[str, str]]]:
        return self.entries.get(form.casefold(), [])

    def add(self, form: str, lemma: str, pos: str, feats: dict[str, str]) -> None:
        self.entries.setdefault(form.casefold(), []).append((lemma, pos, feats))


def load_lexicon(text: str) -> Lexicon:
    """Read ``wordform<TAB>lemma<TAB>UPOS<TAB>feats`` lines (feats may be _)."""
    lex = Lexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) not in (3, 4):
            raise CorpusError("expected 3 or 4 tab-separated columns", lineno)
        form, lemma, pos = cols[0], cols[1], cols[2]
        feats = _parse_feats(cols[3], lineno) if len(cols) == 4 else {}
        lex.add(form, lemma, pos, feats)
    return lex


_SENT_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
# a word is letters/digits, hyphenated compounds stay one token
_TOKEN_RE = re.compile(r"\w+(?:-\w+)*|[^\w\s]", re.UNICODE)


def tag_with_lexicon(raw_text: str, lexicon: Lexicon, doc_id: str = "doc") -> list[Sentence]:
    """Split raw text into sentences/tokens and tag via lexicon lookup.

    First lexicon entry wins; unknown words fall back to
    ``(casefolded form, X, {})``; punctuation becomes PUNCT tokens.
    """
    sentences = []
    for i, chunk in enumerate(s for s in _SENT_BOUNDARY.split(raw_text) if s.strip()):
        text = chunk.strip()
        tokens = []
        for match in _TOKEN_RE.finditer(text):
            form = match.group(0)
            index = len(tokens) + 1
            if not form[0].isalnum() and "-" not in form:
                tokens.append(Token(index=index, form=form, lemma=form, pos="PUNCT"))
                continue
            entries = lexicon.lookup(form)
            if entries:
                lemma, pos, feats = entries[0]
                tokens.append(
                    Token(index=index, form=form, lemma=lemma, pos=pos, feats=dict(feats))
                )
            else:
                tokens.append(Token(index=index, form=form, lemma=form.casefold(), pos="X"))
        if tokens:
            sentences.append(
                Sentence(doc_id=doc_id, sent_id=f"s{i + 1}", text=text, tokens=tuple(tokens))
            )
    return sentences


def wordform_index(corpus: list[Sentence]) -> dict[str, list[tuple[str, str, int]]]:
    """Map each lemma to every (doc_id, sent_id, token index) occurrence."""
    index: dict[str, list[tuple[str, str, int]]] = {}
    for sent in corpus:
        for tok in sent.tokens:
            index.setdefault(tok.lemma.casefold(), []).append(
                (sent.doc_id, sent.sent_id, tok.index)
            )
    return index
