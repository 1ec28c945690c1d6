"""Turtle subset for ontology files.

One ``;``-joined triple group per subject, subjects sorted lexicographically
by id (plain codepoint order); that ordering is normative, so serializing
the same ontology twice is byte-identical.  Vocabulary:

    of:X a of:Concept ; rdfs:subClassOf of:Y ; rdfs:label "..." .
    of:R a of:Relation ; of:sig1 of:C1 ; of:sig2 of:C2 ; rdfs:subPropertyOf of:S .
    of:A a of:Attribute ; of:owner of:C ; of:datatype "decimal" .

The parser also accepts concepts referenced without an explicit
``a of:Concept`` declaration (e.g. bare ``of:x rdfs:subClassOf of:y .``
fragments); the root is the unique concept with no parent edge.
"""

from __future__ import annotations

from dataclasses import dataclass

from ontoharvest.ontology import DATATYPES, Ontology

OF_IRI = "http://ontoharvest.dev/onto#"
RDFS_IRI = "http://www.w3.org/2000/01/rdf-schema#"


class TurtleParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            out.append(text[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def serialize(onto: Ontology) -> str:
    """Deterministic Turtle text for ``onto``."""
    lines = [
        f"@prefix of: <{OF_IRI}> .",
        f"@prefix rdfs: <{RDFS_IRI}> .",
        "",
    ]
    subjects: dict[str, list[str]] = {}
    for cid in onto.concepts:
        parts = ["a of:Concept"]
        for parent in sorted(onto.parents(cid)):
            parts.append(f"rdfs:subClassOf of:{parent}")
        label = onto.concepts[cid]
        if label is not None:
            parts.append(f'rdfs:label "{_escape(label)}"')
        subjects[cid] = parts
    for rid, sig in onto.relations.items():
        parts = ["a of:Relation"]
        for i, c in enumerate(sig, start=1):
            parts.append(f"of:sig{i} of:{c}")
        for sub, sup in sorted(onto.relation_order):
            if sub == rid:
                parts.append(f"rdfs:subPropertyOf of:{sup}")
        subjects[rid] = parts
    for aid, (owner, datatype) in onto.attributes.items():
        subjects[aid] = [
            "a of:Attribute",
            f"of:owner of:{owner}",
            f'of:datatype "{datatype}"',
        ]
    for sid in sorted(subjects):
        lines.append(f"of:{sid} " + " ; ".join(subjects[sid]) + " .")
    return "\n".join(lines) + "\n"


@dataclass
class _Token:
    text: str
    line: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            if ch == "#":
                break
            if ch == '"':
                j = i + 1
                buf = []
                while j < n:
                    if line[j] == "\\" and j + 1 < n:
                        buf.append(line[j : j + 2])
                        j += 2
                        continue
                    if line[j] == '"':
                        break
                    buf.append(line[j])
                    j += 1
                if j >= n:
                    raise TurtleParseError("unterminated string literal", lineno)
                tokens.append(_Token('"' + "".join(buf) + '"', lineno))
                i = j + 1
                continue
            if ch == "<":
                j = line.find(">", i)
                if j < 0:
                    raise TurtleParseError("unterminated IRI", lineno)
                tokens.append(_Token(line[i : j + 1], lineno))
                i = j + 1
                continue
            if ch in ";.":
                tokens.append(_Token(ch, lineno))
                i += 1
                continue
            j = i
            while j < n and not line[j].isspace() and line[j] not in ';"<':
                # '.' terminates a statement only as a standalone token
                j += 1
            word = line[i:j]
            if word.endswith(".") and word != ".":
                word = word[:-1]
                tokens.append(_Token(word, lineno))
                tokens.append(_Token(".", lineno))
            else:
                tokens.append(_Token(word, lineno))
            i = j
    return tokens


def _local(token: _Token) -> str:
    if not token.text.startswith("of:") or len(token.text) <= 3:
        raise TurtleParseError(f"expected of:-prefixed name, got {token.text!r}", token.line)
    return token.text[3:]


def parse(text: str) -> Ontology:
    """Parse the Turtle subset back into an :class:`Ontology`.

    Raises :class:`TurtleParseError` on malformed syntax or references to
    terms that cannot be resolved.
    """
    tokens = _tokenize(text)
    # statement splitting on '.'
    statements: list[list[_Token]] = []
    current: list[_Token] = []
    for tok in tokens:
        if tok.text == ".":
            if current:
                statements.append(current)
                current = []
        else:
            current.append(tok)
    if current:
        raise TurtleParseError("statement missing terminating '.'", current[-1].line)

    concepts: dict[str, str | None] = {}
    parents: dict[str, list[str]] = {}
    relations: dict[str, dict[int, str]] = {}
    rel_subs: list[tuple[str, str, int]] = []
    attributes: dict[str, dict[str, str]] = {}
    attr_lines: dict[str, int] = {}

    def note_concept(cid: str) -> None:
        concepts.setdefault(cid, None)

    for stmt in statements:
        if stmt[0].text == "@prefix":
            if len(stmt) != 3:
                raise TurtleParseError("malformed @prefix", stmt[0].line)
            continue
        subject = _local(stmt[0])
        line = stmt[0].line
        # split predicate-object pairs on ';'
        groups: list[list[_Token]] = [[]]
        for tok in stmt[1:]:
            if tok.text == ";":
                groups.append([])
            else:
                groups[-1].append(tok)
        kind: str | None = None
        pairs: list[tuple[_Token, _Token]] = []
        for group in groups:
            if len(group) != 2:
                raise TurtleParseError(
                    f"expected 'predicate object' pair in subject {subject!r}", line
                )
            pairs.append((group[0], group[1]))
        for pred, obj in pairs:
            if pred.text == "a":
                kind = obj.text
        if kind == "of:Relation":
            relations.setdefault(subject, {})
        elif kind == "of:Attribute":
            attributes.setdefault(subject, {})
            attr_lines[subject] = line
        elif kind in ("of:Concept", None):
            note_concept(subject)
        else:
            raise TurtleParseError(f"unknown type {kind!r}", line)

        for pred, obj in pairs:
            p = pred.text
            if p == "a":
                continue
            if p == "rdfs:subClassOf":
                note_concept(subject)
                parent = _local(obj)
                note_concept(parent)
                parents.setdefault(subject, []).append(parent)
            elif p == "rdfs:label":
                if not obj.text.startswith('"'):
                    raise TurtleParseError("label must be a string literal", obj.line)
                concepts[subject] = _unescape(obj.text[1:-1])
            elif p.startswith("of:sig"):
                if subject not in relations:
                    raise TurtleParseError(
                        f"signature on non-relation subject {subject!r}", pred.line
                    )
                try:
                    idx = int(p[len("of:sig") :])
                except ValueError:
                    raise TurtleParseError(f"bad signature predicate {p!r}", pred.line)
                relations[subject][idx] = _local(obj)
            elif p == "rdfs:subPropertyOf":
                rel_subs.append((subject, _local(obj), pred.line))
            elif p == "of:owner":
                attributes.setdefault(subject, {})["owner"] = _local(obj)
            elif p == "of:datatype":
                if not obj.text.startswith('"'):
                    raise TurtleParseError("datatype must be a string literal", obj.line)
                attributes.setdefault(subject, {})["datatype"] = obj.text[1:-1]
            else:
                raise TurtleParseError(f"unknown predicate {p!r}", pred.line)

    # assemble, checking references
    rel_sigs: dict[str, tuple[str, ...]] = {}
    for rid, sig_map in relations.items():
        if not sig_map:
            raise TurtleParseError(f"relation {rid!r} has no signature")
        if sorted(sig_map) != list(range(1, len(sig_map) + 1)):
            raise TurtleParseError(f"relation {rid!r} has non-contiguous signature slots")
        sig = tuple(sig_map[i] for i in range(1, len(sig_map) + 1))
        for c in sig:
            if c not in concepts:
                raise TurtleParseError(
                    f"relation {rid!r} references unknown concept {c!r}"
                )
        rel_sigs[rid] = sig
    order = set()
    for sub, sup, line in rel_subs:
        for r in (sub, sup):
            if r not in rel_sigs:
                raise TurtleParseError(f"unknown relation reference {r!r}", line)
        order.add((sub, sup))
    attr_sigs: dict[str, tuple[str, str]] = {}
    for aid, fields in attributes.items():
        if "owner" not in fields or "datatype" not in fields:
            raise TurtleParseError(
                f"attribute {aid!r} needs of:owner and of:datatype", attr_lines.get(aid)
            )
        if fields["owner"] not in concepts:
            raise TurtleParseError(
                f"attribute {aid!r} references unknown concept {fields['owner']!r}"
            )
        if fields["datatype"] not in DATATYPES:
            raise TurtleParseError(
                f"attribute {aid!r} has unknown datatype {fields['datatype']!r}"
            )
        attr_sigs[aid] = (fields["owner"], fields["datatype"])

    rootless = sorted(c for c in concepts if not parents.get(c))
    if len(rootless) != 1:
        raise TurtleParseError(
            "cannot determine unique root; parentless concepts: "
            + (", ".join(rootless) if rootless else "(none)")
        )
    taxonomy = frozenset(
        (child, parent) for child, ps in parents.items() for parent in ps
    )
    return Ontology(
        root=rootless[0],
        concepts=concepts,
        taxonomy=taxonomy,
        relations=rel_sigs,
        relation_order=frozenset(order),
        attributes=attr_sigs,
    )
