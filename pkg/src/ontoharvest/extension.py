"""Normalization of matches into candidates and their application to a
base ontology.

Candidate ids are content hashes over (kind, payload, provenance spans),
so re-running the pipeline on unchanged text reproduces identical ids and
decision files stay valid.  Application is deterministic (kind, then id)
and never fails a batch: a candidate that cannot be applied (taxonomy
cycle, identifier already used in another namespace, signature clash) is
skipped and reported.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from ontoharvest.matching import Match
from ontoharvest.ontology import Ontology
from ontoharvest.templates import (
    AttributeEmission,
    ConceptEmission,
    HyponymyEmission,
    ObjectRelationEmission,
)

KINDS = ("attribute", "concept", "hyponymy", "object_relation")

STATUSES = ("pending", "accepted", "rejected", "edited")

# payload keys per kind; doubles as the edit-payload schema
PAYLOAD_FIELDS: dict[str, tuple[str, ...]] = {
    "attribute": ("owner", "attribute", "datatype"),
    "object_relation": ("predicate", "subject", "object"),
    "hyponymy": ("hypo", "hyper"),
    "concept": ("concept",),
}


class CandidateError(ValueError):
    pass


def normalize_lemma(text: str) -> str:
    """Identifier normalization: casefold, whitespace runs to '_'."""
    return "_".join(text.casefold().split())


@dataclass(frozen=True)
class Provenance:
    doc_id: str
    sent_id: str
    start: int
    end: int
    template: str
    text: str           # matched span text
    sentence: str = ""  # full sentence text for review display

    def span_key(self) -> tuple[str, str, int, int]:
        return (self.doc_id, self.sent_id, self.start, self.end)


@dataclass(frozen=True)
class Candidate:
    id: str
    kind: str
    payload: Mapping[str, str]
    provenance: tuple[Provenance, ...]
    status: str = "pending"
    flags: tuple[str, ...] = ()
    edited_payload: Mapping[str, str] | None = None

    @property
    def score(self) -> int:
        return len(self.provenance)

    def effective_payload(self) -> Mapping[str, str]:
        return self.edited_payload if self.edited_payload is not None else self.payload


def _candidate_id(kind: str, payload: Mapping[str, str], spans: Sequence[tuple]) -> str:
    blob = json.dumps(
        [kind, dict(payload), sorted(spans)],
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def load_deverbal(text: str) -> dict[str, str]:
    """Deverbal-noun to verb lemma map: ``noun<TAB>verb`` per line."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
            raise ValueError(f"line {lineno}: expected noun<TAB>verb")
        out[cols[0].strip().casefold()] = cols[1].strip().casefold()
    return out


def _binding_items(match: Match, ref: str) -> list[str]:
    items = match.bindings.get(ref, ())
    return [normalize_lemma(lemma) for lemma, _index in items]


def _binding_single(match: Match, ref: str) -> str | None:
    items = _binding_items(match, ref)
    return items[0] if items else None


def normalize(matches: Sequence[Match], deverbal: Mapping[str, str]) -> list[Candidate]:
    """Turn matches into merged, deterministic candidates.

    Identical (kind, payload) pairs merge with concatenated provenance;
    object-relation predicates are mapped through the deverbal lexicon,
    falling back to the noun lemma with an ``unmapped_deverbal`` flag.
    """
    merged: dict[tuple, dict] = {}

    def emit(kind: str, payload: dict[str, str], match: Match, flags: Iterable[str] = ()):
        key = (kind, tuple(sorted(payload.items())))
        entry = merged.setdefault(key, {"provenance": {}, "flags": set()})
        prov = Provenance(
            doc_id=match.doc_id,
            sent_id=match.sent_id,
            start=match.start,
            end=match.end,
            template=match.template_name,
            text=match.matched_text(),
            sentence=match.sentence.text,
        )
        entry["provenance"][(prov.span_key(), prov.template)] = prov
        entry["flags"].update(flags)

    for match in matches:
        for emission in match.template.emissions:
            if isinstance(emission, AttributeEmission):
                owner = _binding_single(match, emission.owner)
                if owner is None:
                    continue
                for attr in _binding_items(match, emission.attribute):
                    emit(
                        "attribute",
                        {"owner": owner, "attribute": attr, "datatype": "string"},
                        match,
                    )
            elif isinstance(emission, ObjectRelationEmission):
                subject = _binding_single(match, emission.subject)
                if subject is None:
                    continue
                predicate = deverbal.get(subject)
                flags = () if predicate is not None else ("unmapped_deverbal",)
                predicate = predicate if predicate is not None else subject
                for obj in _binding_items(match, emission.object):
                    emit(
                        "object_relation",
                        {"predicate": predicate, "subject": subject, "object": obj},
                        match,
                        flags,
                    )
            elif isinstance(emission, HyponymyEmission):
                hyper = _binding_single(match, emission.hyper)
                if hyper is None:
                    continue
                for hypo in _binding_items(match, emission.hypo):
                    emit("hyponymy", {"hypo": hypo, "hyper": hyper}, match)
            elif isinstance(emission, ConceptEmission):
                for term in _binding_items(match, emission.term):
                    emit("concept", {"concept": term}, match)

    candidates = []
    for (kind, payload_items), entry in merged.items():
        payload = dict(payload_items)
        provenance = tuple(
            sorted(
                entry["provenance"].values(),
                key=lambda p: (p.doc_id, p.sent_id, p.start, p.end, p.template),
            )
        )
        spans = [p.span_key() for p in provenance]
        candidates.append(
            Candidate(
                id=_candidate_id(kind, payload, spans),
                kind=kind,
                payload=payload,
                provenance=provenance,
                flags=tuple(sorted(entry["flags"])),
            )
        )
    candidates.sort(key=lambda c: (-c.score, c.id))
    return candidates


# -- candidate stream (JSON lines) ----------------------------------------


def candidate_to_json(candidate: Candidate) -> str:
    record = {
        "id": candidate.id,
        "kind": candidate.kind,
        "payload": dict(candidate.payload),
        "score": candidate.score,
        "status": candidate.status,
        "flags": list(candidate.flags),
        "provenance": [
            {
                "doc": p.doc_id,
                "sent": p.sent_id,
                "start": p.start,
                "end": p.end,
                "template": p.template,
                "text": p.text,
                "sentence": p.sentence,
            }
            for p in candidate.provenance
        ],
    }
    if candidate.edited_payload is not None:
        record["edited_payload"] = dict(candidate.edited_payload)
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def candidate_from_json(line: str) -> Candidate:
    record = json.loads(line)
    for field in ("id", "kind", "payload", "provenance"):
        if field not in record:
            raise CandidateError(f"candidate record missing {field!r}")
    if record["kind"] not in KINDS:
        raise CandidateError(f"unknown candidate kind {record['kind']!r}")
    provenance = tuple(
        Provenance(
            doc_id=p["doc"],
            sent_id=p["sent"],
            start=p["start"],
            end=p["end"],
            template=p.get("template", ""),
            text=p.get("text", ""),
            sentence=p.get("sentence", ""),
        )
        for p in record["provenance"]
    )
    return Candidate(
        id=record["id"],
        kind=record["kind"],
        payload=record["payload"],
        provenance=provenance,
        status=record.get("status", "pending"),
        flags=tuple(record.get("flags", ())),
        edited_payload=record.get("edited_payload"),
    )


def write_candidates(candidates: Sequence[Candidate]) -> str:
    return "".join(candidate_to_json(c) + "\n" for c in candidates)


def read_candidates(text: str) -> list[Candidate]:
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append(candidate_from_json(line))
    return out


# -- extension --------------------------------------------------------------


@dataclass(frozen=True)
class OntologyDiff:
    added_concepts: tuple[tuple[str, str | None], ...] = ()
    added_subsumptions: tuple[tuple[str, str], ...] = ()
    added_relations: tuple[tuple[str, tuple[str, ...]], ...] = ()
    added_relation_subsumptions: tuple[tuple[str, str], ...] = ()
    added_attributes: tuple[tuple[str, str, str], ...] = ()

    def is_empty(self) -> bool:
        return not (
            self.added_concepts
            or self.added_subsumptions
            or self.added_relations
            or self.added_relation_subsumptions
            or self.added_attributes
        )

    def apply(self, base: Ontology) -> Ontology:
        """Replay onto ``base``; raises if the diff does not fit."""
        onto = base
        concepts = dict(onto.concepts)
        for cid, label in self.added_concepts:
            concepts[cid] = label
        onto = replace(
            onto,
            concepts=concepts,
            taxonomy=onto.taxonomy | frozenset(self.added_subsumptions),
        )
        for rid, sig in self.added_relations:
            onto = onto.add_relation(rid, sig)
        for sub, sup in self.added_relation_subsumptions:
            onto = onto.add_relation_subsumption(sub, sup)
        for aid, owner, datatype in self.added_attributes:
            onto = onto.add_attribute(aid, owner, datatype)
        return onto

    def render(self) -> str:
        lines = []
        for cid, label in self.added_concepts:
            suffix = f" ({label})" if label else ""
            lines.append(f"+ concept {cid}{suffix}")
        for child, parent in self.added_subsumptions:
            lines.append(f"+ subsumption {child} <= {parent}")
        for rid, sig in self.added_relations:
            lines.append(f"+ relation {rid}({', '.join(sig)})")
        for sub, sup in self.added_relation_subsumptions:
            lines.append(f"+ relation-subsumption {sub} <= {sup}")
        for aid, owner, datatype in self.added_attributes:
            lines.append(f"+ attribute {aid} of {owner}: {datatype}")
        return "\n".join(lines) + ("\n" if lines else "")


def diff(base: Ontology, extended: Ontology) -> OntologyDiff:
    """Per-component set difference extended - base."""
    return OntologyDiff(
        added_concepts=tuple(
            sorted(
                (cid, extended.concepts[cid])
                for cid in set(extended.concepts) - set(base.concepts)
            )
        ),
        added_subsumptions=tuple(sorted(extended.taxonomy - base.taxonomy)),
        added_relations=tuple(
            sorted(
                (rid, extended.relations[rid])
                for rid in set(extended.relations) - set(base.relations)
            )
        ),
        added_relation_subsumptions=tuple(
            sorted(extended.relation_order - base.relation_order)
        ),
        added_attributes=tuple(
            sorted(
                (aid, *extended.attributes[aid])
                for aid in set(extended.attributes) - set(base.attributes)
            )
        ),
    )


@dataclass(frozen=True)
class SkipReport:
    candidate_id: str
    reason: str


@dataclass(frozen=True)
class ExtensionResult:
    ontology: Ontology
    diff: OntologyDiff
    skipped: tuple[SkipReport, ...]


def _free_for_concept(onto: Ontology, cid: str) -> bool:
    return cid not in onto.relations and cid not in onto.attributes


def extend_ontology(base: Ontology, accepted: Sequence[Candidate]) -> ExtensionResult:
    """Apply accepted/edited candidates to ``base``.

    Missing owner/object/hypernym concepts are auto-created under the
    root.  Conflicting or cycle-creating candidates are skipped with a
    report; application order is (kind, id), so results are deterministic.
    """
    onto = base
    skipped: list[SkipReport] = []

    def ensure_concept(cid: str, parent: str | None = None) -> bool:
        nonlocal onto
        if onto.has_concept(cid):
            return True
        if not _free_for_concept(onto, cid):
            return False
        onto = onto.add_concept(cid, parent=parent)
        return True

    for cand in sorted(accepted, key=lambda c: (c.kind, c.id)):
        payload = cand.effective_payload()
        missing = [k for k in PAYLOAD_FIELDS[cand.kind] if not payload.get(k)]
        if missing:
            skipped.append(SkipReport(cand.id, f"payload missing {missing}"))
            continue
        if cand.kind == "attribute":
            owner = normalize_lemma(payload["owner"])
            attr = normalize_lemma(payload["attribute"])
            datatype = payload["datatype"]
            if not ensure_concept(owner):
                skipped.append(SkipReport(cand.id, f"owner id {owner!r} is not a concept"))
                continue
            if attr in onto.attributes:
                if onto.attributes[attr] == (owner, datatype):
                    continue  # idempotent re-application
                skipped.append(
                    SkipReport(cand.id, f"attribute id {attr!r} already declared differently")
                )
                continue
            try:
                onto = onto.add_attribute(attr, owner, datatype)
            except ValueError as exc:
                skipped.append(SkipReport(cand.id, str(exc)))
        elif cand.kind == "concept":
            cid = normalize_lemma(payload["concept"])
            if not ensure_concept(cid):
                skipped.append(SkipReport(cand.id, f"id {cid!r} already used"))
        elif cand.kind == "hyponymy":
            hypo = normalize_lemma(payload["hypo"])
            hyper = normalize_lemma(payload["hyper"])
            if not ensure_concept(hyper):
                skipped.append(SkipReport(cand.id, f"id {hyper!r} already used"))
                continue
            if not onto.has_concept(hypo):
                # new subconcepts are filed directly under their hypernym
                if not ensure_concept(hypo, parent=hyper):
                    skipped.append(SkipReport(cand.id, f"id {hypo!r} already used"))
                continue
            try:
                onto = onto.add_subsumption(hypo, hyper)
            except ValueError as exc:
                skipped.append(SkipReport(cand.id, str(exc)))
        elif cand.kind == "object_relation":
            predicate = normalize_lemma(payload["predicate"])
            subject = normalize_lemma(payload["subject"])
            obj = normalize_lemma(payload["object"])
            if not ensure_concept(subject):
                skipped.append(SkipReport(cand.id, f"id {subject!r} already used"))
                continue
            if not ensure_concept(obj):
                skipped.append(SkipReport(cand.id, f"id {obj!r} already used"))
                continue
            signature = (subject, obj)
            if predicate in onto.relations:
                if onto.relations[predicate] == signature:
                    continue
                skipped.append(
                    SkipReport(
                        cand.id, f"relation id {predicate!r} already declared differently"
                    )
                )
                continue
            try:
                onto = onto.add_relation(predicate, signature)
            except ValueError as exc:
                skipped.append(SkipReport(cand.id, str(exc)))
        else:
            skipped.append(SkipReport(cand.id, f"unknown kind {cand.kind!r}"))
    return ExtensionResult(ontology=onto, diff=diff(base, onto), skipped=tuple(skipped))
