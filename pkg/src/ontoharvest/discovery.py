"""Statistical front end: candidate terms, synonym groups, and frequent
morph-syntactic structures around anchors that can seed new templates.

Term scoring uses C-value over noun-phrase shaped token runs:

    score(t) = log2(|t| + 1) * (freq(t) - mean freq of extracted candidates
                                strictly containing t)

with the second term zero when nothing contains t.  Containment is
contiguous lemma-subsequence containment within the extracted (already
frequency-thresholded) candidate set.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ontoharvest.corpus import Sentence
from ontoharvest.templates import (
    ANCHOR_LEMMA,
    AttributeEmission,
    Template,
    TokenMatcher,
)

# noun-phrase shapes for term runs: (pos, required case or None) per slot
NP_SHAPES: tuple[tuple[tuple[str, str | None], ...], ...] = (
    (("NOUN", None),),
    (("ADJ", None), ("NOUN", None)),
    (("NOUN", None), ("NOUN", "Gen")),
    (("ADJ", None), ("NOUN", None), ("NOUN", "Gen")),
)


@dataclass(frozen=True)
class TermCandidate:
    lemmas: tuple[str, ...]
    surfaces: tuple[str, ...]
    frequency: int
    score: float
    head: str  # lemma of the first noun slot, used for synonym grouping


@dataclass
class SynonymLexicon:
    """Synsets in file order; a lemma may belong to several."""

    synsets: list[tuple[str, frozenset[str]]] = field(default_factory=list)  # (head, members)

    def first_synset(self, lemma: str) -> int | None:
        for i, (_head, members) in enumerate(self.synsets):
            if lemma in members:
                return i
        return None


def load_synonyms(text: str) -> SynonymLexicon:
    """One synset per line: ``head<TAB>member1,member2,...``."""
    lex = SynonymLexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 2:
            raise ValueError(f"line {lineno}: expected head<TAB>members")
        head = cols[0].strip().casefold()
        members = frozenset(
            m.strip().casefold() for m in cols[1].split(",") if m.strip()
        )
        if head not in members:
            members = members | {head}
        lex.synsets.append((head, members))
    return lex


@dataclass(frozen=True)
class StructureCandidate:
    signature: tuple[tuple[str, str | None], ...]  # ("ANCHOR", pos) marks the slot
    support: int
    window: int

    def render(self) -> str:
        parts = []
        for pos, case in self.signature:
            if pos == "ANCHOR":
                parts.append(f"ANCHOR:{case}")
            elif case:
                parts.append(f"{pos}({case})")
            else:
                parts.append(pos)
        return " ".join(parts)


def _shape_at(tokens, i: int, shape) -> bool:
    for offset, (pos, case) in enumerate(shape):
        tok = tokens[i + offset]
        if tok.pos != pos:
            return False
        if case is not None and tok.feats.get("Case") != case:
            return False
    return True


def extract_terms(corpus: Sequence[Sentence], min_freq: int = 1) -> list[TermCandidate]:
    """Rank noun-phrase term candidates by C-value.

    Every token window matching a shape counts one occurrence; candidates
    are windows with frequency >= ``min_freq``, ranked by score desc,
    frequency desc, then lexicographically.
    """
    freq: Counter[tuple[str, ...]] = Counter()
    surfaces: dict[tuple[str, ...], set[str]] = {}
    heads: dict[tuple[str, ...], str] = {}
    for sent in corpus:
        tokens = sent.tokens
        for shape in NP_SHAPES:
            width = len(shape)
            for i in range(len(tokens) - width + 1):
                if not _shape_at(tokens, i, shape):
                    continue
                window = tokens[i : i + width]
                lemmas = tuple(t.lemma.casefold() for t in window)
                freq[lemmas] += 1
                surfaces.setdefault(lemmas, set()).add(
                    " ".join(t.form for t in window)
                )
                if lemmas not in heads:
                    noun_pos = next(
                        k for k, (pos, _case) in enumerate(shape) if pos == "NOUN"
                    )
                    heads[lemmas] = lemmas[noun_pos]
    candidates = {t: f for t, f in freq.items() if f >= min_freq}

    def containers(term: tuple[str, ...]) -> list[int]:
        out = []
        for other, f in candidates.items():
            if len(other) <= len(term):
                continue
            if any(
                other[j : j + len(term)] == term
                for j in range(len(other) - len(term) + 1)
            ):
                out.append(f)
        return out

    results = []
    for term, f in candidates.items():
        nested = containers(term)
        penalty = sum(nested) / len(nested) if nested else 0.0
        score = math.log2(len(term) + 1) * (f - penalty)
        results.append(
            TermCandidate(
                lemmas=term,
                surfaces=tuple(sorted(surfaces[term])),
                frequency=f,
                score=score,
                head=heads[term],
            )
        )
    results.sort(key=lambda t: (-t.score, -t.frequency, t.lemmas))
    return results


def cluster_synonyms(
    terms: Iterable[TermCandidate], lexicon: SynonymLexicon
) -> list[tuple[str, tuple[TermCandidate, ...]]]:
    """Partition terms into labeled groups via the synonym lexicon.

    Unigrams group by their own synset, multiword terms by their head
    noun's synset (first synset in file order wins); terms in no synset
    become self-labeled singletons.  Returns (label, members) sorted by
    label.
    """
    groups: dict[tuple, list[TermCandidate]] = {}
    labels: dict[tuple, str] = {}
    for term in terms:
        key_lemma = term.lemmas[0] if len(term.lemmas) == 1 else term.head
        synset = lexicon.first_synset(key_lemma)
        if synset is None:
            key = ("term", term.lemmas)
            labels[key] = "_".join(term.lemmas)
        else:
            key = ("synset", synset)
            labels[key] = lexicon.synsets[synset][0]
        groups.setdefault(key, []).append(term)
    out = [
        (labels[key], tuple(sorted(members, key=lambda t: t.lemmas)))
        for key, members in groups.items()
    ]
    out.sort(key=lambda pair: (pair[0], pair[1][0].lemmas))
    return out


def mine_structures(
    corpus: Sequence[Sentence],
    anchors: Iterable[str],
    window: int = 2,
    min_support: int = 2,
) -> list[StructureCandidate]:
    """Frequent (pos, case) signatures around anchor occurrences.

    Enumerates every contiguous token window that contains an anchor and
    stays within ±``window`` tokens of it; support counts distinct
    sentences.  Sorted by support desc, then rendered signature.
    """
    if not 1 <= window <= 5:
        raise ValueError("window must be in 1..5")
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    anchor_set = {a.casefold() for a in anchors}
    seen: dict[tuple, set[tuple[str, str]]] = {}
    for sent in corpus:
        tokens = sent.tokens
        n = len(tokens)
        for p, tok in enumerate(tokens):
            if tok.lemma.casefold() not in anchor_set:
                continue
            lo = max(0, p - window)
            hi = min(n, p + window + 1)
            for start in range(lo, p + 1):
                for end in range(p + 1, hi + 1):
                    signature = []
                    for i in range(start, end):
                        if i == p:
                            signature.append(("ANCHOR", tokens[i].pos))
                        else:
                            signature.append(
                                (tokens[i].pos, tokens[i].feats.get("Case"))
                            )
                    seen.setdefault(tuple(signature), set()).add(
                        (sent.doc_id, sent.sent_id)
                    )
    out = [
        StructureCandidate(signature=sig, support=len(sents), window=window)
        for sig, sents in seen.items()
        if len(sents) >= min_support
    ]
    out.sort(key=lambda s: (-s.support, s.render()))
    return out


def to_template(candidate: StructureCandidate, name: str) -> Template:
    """Draft template from a mined signature (requires expert edit).

    The anchor slot becomes ``tok lemma=$anchor cap=owner``; non-anchor
    NOUN slots become captures; the default emission is an attribute of
    the anchor from the first capture.
    """
    elements: list[TokenMatcher] = []
    captures: list[str] = []
    for pos, case in candidate.signature:
        if pos == "ANCHOR":
            elements.append(TokenMatcher(lemma=ANCHOR_LEMMA, capture="owner"))
        elif pos == "NOUN":
            cap = f"cap{len(captures) + 1}"
            captures.append(cap)
            elements.append(TokenMatcher(pos=pos, case=case, capture=cap))
        else:
            elements.append(TokenMatcher(pos=pos, case=case))
    if not captures:
        raise ValueError("structure has no non-anchor NOUN slot to capture")
    return Template(
        name=name,
        elements=tuple(elements),
        emissions=(AttributeEmission(owner="owner", attribute=captures[0]),),
        priority=0,
        anchor="owner",
        draft=True,
    )
