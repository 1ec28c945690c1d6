"""Anchored template application over a corpus.

Only sentences containing at least one anchor lemma are considered.  Within
a sentence, templates run in descending priority; token spans consumed by
an accepted match are masked for strictly lower-priority templates, while
equal-priority templates all see the same view.  Output order is
deterministic: corpus order, then span start, template name, anchor.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ontoharvest import matcher
from ontoharvest.corpus import Sentence
from ontoharvest.matcher.encode import (
    CompiledTemplate,
    EncodedSentence,
    Vocab,
    compile_template,
    encode_sentence,
)
from ontoharvest.templates import Template


@dataclass(frozen=True)
class Match:
    template: Template
    doc_id: str
    sent_id: str
    start: int  # 1-based token index, inclusive
    end: int    # 1-based token index, inclusive
    bindings: Mapping[str, tuple[tuple[str, int], ...]]
    anchor: str | None
    sentence: Sentence

    @property
    def template_name(self) -> str:
        return self.template.name

    @property
    def priority(self) -> int:
        return self.template.priority

    def matched_text(self) -> str:
        return " ".join(
            tok.form for tok in self.sentence.tokens[self.start - 1 : self.end]
        )


def _sentence_matches(
    sentence: Sentence,
    encoded: EncodedSentence,
    levels: Sequence[tuple[int, tuple[CompiledTemplate, ...]]],
    anchor_ids: dict[str, int],
    engine,
) -> list[Match]:
    present = sorted(a for a, aid in anchor_ids.items() if aid in encoded.lemma_set)
    if not present:
        return []
    mask = bytearray(encoded.n)
    out: list[Match] = []
    for _priority, group in levels:
        level: list[tuple] = []
        for compiled in group:
            if compiled.anchor is not None:
                runs = [(a, anchor_ids[a]) for a in present]
            else:
                runs = [(None, -1)]
            for anchor_lemma, anchor_id in runs:
                for start, end, binds in engine.find_matches(
                    encoded, compiled.ops, compiled.nslots, anchor_id, mask
                ):
                    level.append((start, end, binds, compiled, anchor_lemma))
        for start, end, binds, compiled, anchor_lemma in level:
            bindings = {
                label: tuple(
                    (sentence.tokens[p].lemma.casefold(), p + 1) for p in binds[slot]
                )
                for slot, label in enumerate(compiled.slot_labels)
            }
            out.append(
                Match(
                    template=compiled.template,
                    doc_id=sentence.doc_id,
                    sent_id=sentence.sent_id,
                    start=start + 1,
                    end=end,
                    bindings=bindings,
                    anchor=anchor_lemma,
                    sentence=sentence,
                )
            )
        for start, end, _binds, _compiled, _anchor in level:
            for i in range(start, end):
                mask[i] = 1
    out.sort(key=lambda m: (m.start, m.template_name, m.anchor or "", m.end))
    return out


def apply_all(
    templates: Sequence[Template],
    corpus: Sequence[Sentence],
    anchors: Iterable[str],
    workers: int | None = None,
    engine=None,
) -> list[Match]:
    """Apply every template to every anchored sentence.

    ``workers`` > 1 processes sentences in a thread pool; results are
    merged back in corpus order, so output is independent of worker count
    and of template declaration order.
    """
    engine = engine if engine is not None else matcher._engine
    vocab = Vocab()
    compiled = [compile_template(vocab, t) for t in templates]
    by_priority: dict[int, list[CompiledTemplate]] = {}
    for c in compiled:
        by_priority.setdefault(c.priority, []).append(c)
    levels = tuple(
        (p, tuple(sorted(by_priority[p], key=lambda c: c.name)))
        for p in sorted(by_priority, reverse=True)
    )
    anchor_ids = {a.casefold(): vocab.intern(a.casefold()) for a in anchors}
    encoded = [encode_sentence(vocab, s) for s in corpus]

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_sentence = list(
                pool.map(
                    lambda pair: _sentence_matches(
                        pair[0], pair[1], levels, anchor_ids, engine
                    ),
                    zip(corpus, encoded),
                )
            )
    else:
        per_sentence = [
            _sentence_matches(s, e, levels, anchor_ids, engine)
            for s, e in zip(corpus, encoded)
        ]
    return [m for chunk in per_sentence for m in chunk]
