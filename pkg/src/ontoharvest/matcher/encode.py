"""Integer encoding shared by both match-kernel backends.

Sentences become flat int arrays (lemma/form/pos/case ids, -1 for absent
case) plus a per-token frozenset of interned ``Key=Val`` feature pairs.
Templates compile to flat op tuples over the same vocabulary, so the inner
loop compares ints and does set membership only.

Op encoding (first element is the opcode):

    (OP_TOK, constraint, cap_slot)
    (OP_GAP, min_skip, max_skip)
    (OP_LIST, item_constraint, sep_form_ids, conj_lemma_ids, skip_constraints, cap_slot)

A constraint is ``(lemma_id, lemma_in, form_in, pos_id, case_id, feat_ids)``
with -1 meaning unconstrained and lemma_id == ANCHOR_ID meaning "compare
against the anchor lemma supplied per kernel call".
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from ontoharvest.corpus import Sentence
from ontoharvest.templates import (
    ANCHOR_LEMMA,
    Gap,
    ListMatcher,
    Template,
    TokenMatcher,
)

OP_TOK = 0
OP_GAP = 1
OP_LIST = 2

NO_ID = -1
ANCHOR_ID = -2


class Vocab:
    """Append-only string intern table (ids are dense, starting at 0)."""

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}

    def intern(self, text: str) -> int:
        id_ = self._ids.get(text)
        if id_ is None:
            id_ = len(self._ids)
            self._ids[text] = id_
        return id_

    def lookup(self, text: str) -> int:
        return self._ids.get(text, NO_ID)

    def __len__(self) -> int:
        return len(self._ids)


@dataclass
class EncodedSentence:
    n: int
    lemma: array
    form: array
    pos: array
    case: array
    feats: tuple[frozenset[int], ...]
    lemma_set: frozenset[int]


def encode_sentence(vocab: Vocab, sentence: Sentence) -> EncodedSentence:
    lemma = array("i")
    form = array("i")
    pos = array("i")
    case = array("i")
    feats = []
    for tok in sentence.tokens:
        lemma.append(vocab.intern(tok.lemma.casefold()))
        form.append(vocab.intern(tok.form.casefold()))
        pos.append(vocab.intern(tok.pos))
        case.append(
            vocab.intern(tok.feats["Case"]) if "Case" in tok.feats else NO_ID
        )
        feats.append(
            frozenset(vocab.intern(f"{k}={v}") for k, v in tok.feats.items())
        )
    return EncodedSentence(
        n=len(sentence.tokens),
        lemma=lemma,
        form=form,
        pos=pos,
        case=case,
        feats=tuple(feats),
        lemma_set=frozenset(lemma),
    )


def _encode_constraint(vocab: Vocab, tok: TokenMatcher) -> tuple:
    if tok.lemma == ANCHOR_LEMMA:
        lemma_id = ANCHOR_ID
    elif tok.lemma is not None:
        lemma_id = vocab.intern(tok.lemma.casefold())
    else:
        lemma_id = NO_ID
    lemma_in = (
        frozenset(vocab.intern(x.casefold()) for x in tok.lemma_in)
        if tok.lemma_in is not None
        else None
    )
    form_in = (
        frozenset(vocab.intern(x.casefold()) for x in tok.form_in)
        if tok.form_in is not None
        else None
    )
    pos_id = vocab.intern(tok.pos) if tok.pos is not None else NO_ID
    case_id = vocab.intern(tok.case) if tok.case is not None else NO_ID
    feat_ids = tuple(sorted(vocab.intern(f"{k}={v}") for k, v in tok.feats))
    return (lemma_id, lemma_in, form_in, pos_id, case_id, feat_ids)


@dataclass
class CompiledTemplate:
    template: Template
    ops: tuple
    nslots: int
    slot_labels: tuple[str, ...]

    @property
    def name(self) -> str:
        return self.template.name

    @property
    def priority(self) -> int:
        return self.template.priority

    @property
    def anchor(self) -> str | None:
        return self.template.anchor


def compile_template(vocab: Vocab, template: Template) -> CompiledTemplate:
    slot_labels: list[str] = []

    def slot_for(capture: str | None) -> int:
        if capture is None:
            return NO_ID
        slot_labels.append(capture)
        return len(slot_labels) - 1

    ops = []
    for el in template.elements:
        if isinstance(el, TokenMatcher):
            ops.append((OP_TOK, _encode_constraint(vocab, el), slot_for(el.capture)))
        elif isinstance(el, Gap):
            ops.append((OP_GAP, el.min_skip, el.max_skip))
        elif isinstance(el, ListMatcher):
            ops.append(
                (
                    OP_LIST,
                    _encode_constraint(vocab, el.item),
                    frozenset(vocab.intern(s.casefold()) for s in el.separators),
                    frozenset(vocab.intern(c.casefold()) for c in el.conjunctions),
                    tuple(_encode_constraint(vocab, s) for s in el.skip),
                    slot_for(el.capture),
                )
            )
        else:  # pragma: no cover
            raise TypeError(f"unknown element {el!r}")
    return CompiledTemplate(
        template=template,
        ops=tuple(ops),
        nslots=len(slot_labels),
        slot_labels=tuple(slot_labels),
    )
