"""Formal ontology structure: concepts, a rooted taxonomy, relations with
concept-tuple signatures, a relation hierarchy, and typed attributes.

Ontology values are immutable snapshots; every mutation returns a new
instance.  Editing keeps the taxonomy a rooted DAG; the stronger property
that every concept pair has a unique least upper bound is checked by
:func:`Ontology.validate`, not enforced eagerly, so intermediate states
with multiple inheritance are representable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

DATATYPES = frozenset({"string", "integer", "decimal", "boolean"})

DEFAULT_ROOT = "root"


class OntologyError(ValueError):
    """Base class for rejected ontology mutations."""


class UnknownEntityError(OntologyError):
    pass


class DuplicateEntityError(OntologyError):
    pass


class CycleError(OntologyError):
    pass


class SignatureError(OntologyError):
    """Relation signature or relation-subsumption constraint violated."""


@dataclass(frozen=True)
class Violation:
    """One validation finding: the violated constraint plus offending ids."""

    constraint: str
    subjects: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.constraint}: {self.detail} ({', '.join(self.subjects)})"


@dataclass(frozen=True)
class JoinAmbiguity:
    """Result of a least-upper-bound query with no unique answer."""

    candidates: tuple[str, ...]


def _check_identifier(id_: str) -> None:
    if not id_:
        raise OntologyError("identifier must be non-empty")
    if any(ch.isspace() for ch in id_):
        raise OntologyError(f"identifier contains whitespace: {id_!r}")


@dataclass(frozen=True)
class Ontology:
    """Immutable ontology snapshot.

    Fields hold plain dicts/frozensets; treat them as read-only.  Use the
    ``add_*`` methods for edits.
    """

    root: str = DEFAULT_ROOT
    concepts: Mapping[str, str | None] = field(default_factory=dict)
    taxonomy: frozenset[tuple[str, str]] = frozenset()
    relations: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    relation_order: frozenset[tuple[str, str]] = frozenset()
    attributes: Mapping[str, tuple[str, str]] = field(default_factory=dict)

    @classmethod
    def empty(cls, root: str = DEFAULT_ROOT) -> Ontology:
        _check_identifier(root)
        return cls(root=root, concepts={root: None})

    # -- taxonomy ---------------------------------------------------------

    def has_concept(self, id_: str) -> bool:
        return id_ in self.concepts

    def parents(self, id_: str) -> set[str]:
        return {p for c, p in self.taxonomy if c == id_}

    def children(self, id_: str) -> set[str]:
        return {c for c, p in self.taxonomy if p == id_}

    def _require_concept(self, id_: str) -> None:
        if id_ not in self.concepts:
            raise UnknownEntityError(f"unknown concept: {id_!r}")

    def _require_free_id(self, id_: str) -> None:
        if id_ in self.concepts:
            raise DuplicateEntityError(f"id already names a concept: {id_!r}")
        if id_ in self.relations:
            raise DuplicateEntityError(f"id already names a relation: {id_!r}")
        if id_ in self.attributes:
            raise DuplicateEntityError(f"id already names an attribute: {id_!r}")

    def add_concept(
        self, id_: str, label: str | None = None, parent: str | None = None
    ) -> Ontology:
        """Add a concept under ``parent`` (the root when omitted)."""
        _check_identifier(id_)
        self._require_free_id(id_)
        parent = self.root if parent is None else parent
        self._require_concept(parent)
        concepts = dict(self.concepts)
        concepts[id_] = label
        return replace(
            self,
            concepts=concepts,
            taxonomy=self.taxonomy | {(id_, parent)},
        )

    def add_subsumption(self, child: str, parent: str) -> Ontology:
        """Add the edge child <= parent; re-adding an edge is a no-op."""
        self._require_concept(child)
        self._require_concept(parent)
        if (child, parent) in self.taxonomy:
            return self
        if child == parent or self._reaches(parent, child):
            raise CycleError(f"edge ({child!r}, {parent!r}) would create a cycle")
        return replace(self, taxonomy=self.taxonomy | {(child, parent)})

    def _reaches(self, src: str, dst: str) -> bool:
        # directed reachability src -> ... -> dst over child->parent edges
        seen = {src}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            if cur == dst:
                return True
            for nxt in self.parents(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def ancestors(self, id_: str) -> set[str]:
        """Reflexive-transitive ancestor set of ``id_``."""
        self._require_concept(id_)
        seen = {id_}
        queue = deque([id_])
        while queue:
            for p in self.parents(queue.popleft()):
                if p not in seen:
                    seen.add(p)
                    queue.append(p)
        return seen

    def is_subconcept(self, c1: str, c2: str) -> bool:
        """True iff c1 <= c2 in the reflexive-transitive taxonomy order."""
        self._require_concept(c1)
        self._require_concept(c2)
        return c1 == c2 or self._reaches(c1, c2)

    def least_upper_bound(self, c1: str, c2: str) -> str | JoinAmbiguity:
        """Unique minimal common ancestor, or the ambiguous candidate set."""
        common = self.ancestors(c1) & self.ancestors(c2)
        minimal = sorted(
            a
            for a in common
            if not any(b != a and self._reaches(b, a) for b in common)
        )
        if len(minimal) == 1:
            return minimal[0]
        return JoinAmbiguity(candidates=tuple(minimal))

    # -- relations --------------------------------------------------------

    def add_relation(self, id_: str, signature: Iterable[str]) -> Ontology:
        """Register a relation with a non-empty tuple of concept ids."""
        _check_identifier(id_)
        self._require_free_id(id_)
        sig = tuple(signature)
        if not sig:
            raise SignatureError(f"relation {id_!r} has an empty signature")
        for c in sig:
            self._require_concept(c)
        relations = dict(self.relations)
        relations[id_] = sig
        return replace(self, relations=relations)

    def _require_relation(self, id_: str) -> None:
        if id_ not in self.relations:
            raise UnknownEntityError(f"unknown relation: {id_!r}")

    def relation_subsumption_errors(self, sub: str, sup: str) -> list[str]:
        """Why sub <=_R sup would be invalid; empty list when acceptable."""
        s1, s2 = self.relations[sub], self.relations[sup]
        problems = []
        if len(s1) != len(s2):
            problems.append(f"arity mismatch: |{sub}|={len(s1)}, |{sup}|={len(s2)}")
        else:
            for i, (a, b) in enumerate(zip(s1, s2), start=1):
                if not self.is_subconcept(a, b):
                    problems.append(f"projection {i}: {a!r} is not below {b!r}")
        return problems

    def add_relation_subsumption(self, sub: str, sup: str) -> Ontology:
        """Add sub <=_R sup after the arity and projection checks."""
        self._require_relation(sub)
        self._require_relation(sup)
        if (sub, sup) in self.relation_order:
            return self
        problems = self.relation_subsumption_errors(sub, sup)
        if problems:
            raise SignatureError("; ".join(problems))
        if sub == sup or self._relation_reaches(sup, sub):
            raise CycleError(f"edge ({sub!r}, {sup!r}) would create a cycle")
        return replace(self, relation_order=self.relation_order | {(sub, sup)})

    def _relation_reaches(self, src: str, dst: str) -> bool:
        seen = {src}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            if cur == dst:
                return True
            for s, p in self.relation_order:
                if s == cur and p not in seen:
                    seen.add(p)
                    queue.append(p)
        return False

    # -- attributes -------------------------------------------------------

    def add_attribute(self, id_: str, owner: str, datatype: str = "string") -> Ontology:
        """Declare an attribute of ``owner`` with a datatype from T."""
        _check_identifier(id_)
        self._require_free_id(id_)
        self._require_concept(owner)
        if datatype not in DATATYPES:
            raise OntologyError(
                f"datatype {datatype!r} not in {sorted(DATATYPES)}"
            )
        attributes = dict(self.attributes)
        attributes[id_] = (owner, datatype)
        return replace(self, attributes=attributes)

    # -- validation -------------------------------------------------------

    def validate(self) -> list[Violation]:
        """All constraint violations in this snapshot (empty = well-formed).

        Covers referential integrity, namespace disjointness, acyclicity,
        rootedness, relation-hierarchy arity/projection conditions, the
        datatype set, and the unique-join (semi-upper-lattice) property.
        """
        out: list[Violation] = []
        out.extend(self._validate_namespaces())
        out.extend(self._validate_taxonomy())
        out.extend(self._validate_relations())
        out.extend(self._validate_attributes())
        # joins are only meaningful once the taxonomy itself is sound
        if not out:
            out.extend(self._validate_joins())
        return out

    def _validate_namespaces(self) -> list[Violation]:
        out = []
        for id_ in sorted(set(self.concepts) & set(self.relations)):
            out.append(
                Violation(
                    "namespace-disjoint", (id_,), "id is both a concept and a relation"
                )
            )
        for id_ in sorted(set(self.concepts) & set(self.attributes)):
            out.append(
                Violation(
                    "namespace-disjoint", (id_,), "id is both a concept and an attribute"
                )
            )
        for id_ in sorted(set(self.relations) & set(self.attributes)):
            out.append(
                Violation(
                    "namespace-disjoint", (id_,), "id is both a relation and an attribute"
                )
            )
        return out

    def _validate_taxonomy(self) -> list[Violation]:
        out = []
        if self.root not in self.concepts:
            out.append(Violation("taxonomy-root", (self.root,), "root concept missing"))
            return out
        for child, parent in sorted(self.taxonomy):
            for end in (child, parent):
                if end not in self.concepts:
                    out.append(
                        Violation(
                            "dangling-concept",
                            (child, parent),
                            f"taxonomy edge references unknown concept {end!r}",
                        )
                    )
        # cycle check over known-concept edges
        on_cycle = self._cycle_nodes(
            {c: self.parents(c) for c in self.concepts}
        )
        if on_cycle:
            out.append(
                Violation("taxonomy-cycle", tuple(sorted(on_cycle)), "taxonomy contains a cycle")
            )
        for c in sorted(self.concepts):
            if c == self.root:
                continue
            if c not in on_cycle and self.root not in self.ancestors(c):
                out.append(
                    Violation("taxonomy-unrooted", (c,), "no ancestor path to root")
                )
        return out

    @staticmethod
    def _cycle_nodes(adjacency: dict[str, set[str]]) -> set[str]:
        # nodes that can reach themselves through >= 1 edge
        bad = set()
        for start in adjacency:
            seen: set[str] = set()
            queue = deque(adjacency.get(start, ()))
            while queue:
                cur = queue.popleft()
                if cur == start:
                    bad.add(start)
                    break
                if cur in seen:
                    continue
                seen.add(cur)
                queue.extend(adjacency.get(cur, ()))
        return bad

    def _validate_relations(self) -> list[Violation]:
        out = []
        for rid in sorted(self.relations):
            sig = self.relations[rid]
            if not sig:
                out.append(Violation("relation-signature", (rid,), "empty signature"))
            for c in sig:
                if c not in self.concepts:
                    out.append(
                        Violation(
                            "dangling-concept",
                            (rid, c),
                            f"relation {rid!r} references unknown concept {c!r}",
                        )
                    )
        for sub, sup in sorted(self.relation_order):
            missing = [r for r in (sub, sup) if r not in self.relations]
            if missing:
                out.append(
                    Violation(
                        "dangling-relation",
                        (sub, sup),
                        f"hierarchy edge references unknown relation {missing[0]!r}",
                    )
                )
                continue
            for problem in self.relation_subsumption_errors(sub, sup):
                out.append(Violation("relation-order", (sub, sup), problem))
        on_cycle = self._cycle_nodes(
            {r: {p for s, p in self.relation_order if s == r} for r in self.relations}
        )
        if on_cycle:
            out.append(
                Violation(
                    "relation-order-cycle",
                    tuple(sorted(on_cycle)),
                    "relation hierarchy contains a cycle",
                )
            )
        return out

    def _validate_attributes(self) -> list[Violation]:
        out = []
        for aid in sorted(self.attributes):
            owner, datatype = self.attributes[aid]
            if owner not in self.concepts:
                out.append(
                    Violation(
                        "attribute-owner",
                        (aid, owner),
                        f"attribute {aid!r} owned by unknown concept {owner!r}",
                    )
                )
            if datatype not in DATATYPES:
                out.append(
                    Violation(
                        "attribute-datatype",
                        (aid,),
                        f"datatype {datatype!r} not in {sorted(DATATYPES)}",
                    )
                )
        return out

    def _validate_joins(self) -> list[Violation]:
        out = []
        ids = sorted(self.concepts)
        ancestor_sets = {c: self.ancestors(c) for c in ids}
        for i, c1 in enumerate(ids):
            for c2 in ids[i + 1 :]:
                common = ancestor_sets[c1] & ancestor_sets[c2]
                minimal = [
                    a
                    for a in common
                    if not any(b != a and self._reaches(b, a) for b in common)
                ]
                if len(minimal) != 1:
                    out.append(
                        Violation(
                            "lattice-join",
                            (c1, c2),
                            "no unique least upper bound: "
                            + "{" + ", ".join(sorted(minimal)) + "}",
                        )
                    )
        return out
