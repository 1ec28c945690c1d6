"""Lexico-syntactic template DSL: types, parser, renderer.

A template is an anchored element sequence with captures plus emissions
describing what a match contributes (attribute / object relation /
hyponymy / concept).  Concrete syntax:

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

Element lines: ``tok`` with constraint atoms (``lemma=``, ``lemma_in=(a|b)``,
``form_in=(...)``, ``pos=``, ``case=``, ``feat Key=Val``, ``cap=``),
``gap MIN..MAX`` (0..5 skipped tokens), and ``list cap=... sep=","
conj=(и|или) skip=(pos=ADV|pos=PART)`` with one indented inner ``tok``,
closed by ``end``.  ``$anchor`` in a lemma constraint is substituted with
each anchor lemma at match time.  Comments run from ``#`` to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ANCHOR_LEMMA = "$anchor"

MAX_GAP = 5


class TemplateError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class TokenMatcher:
    lemma: str | None = None
    lemma_in: frozenset[str] | None = None
    form_in: frozenset[str] | None = None
    pos: str | None = None
    case: str | None = None
    feats: tuple[tuple[str, str], ...] = ()
    capture: str | None = None

    def constrained(self) -> bool:
        return any(
            v is not None for v in (self.lemma, self.lemma_in, self.form_in, self.pos, self.case)
        ) or bool(self.feats)


@dataclass(frozen=True)
class Gap:
    min_skip: int
    max_skip: int


@dataclass(frozen=True)
class ListMatcher:
    item: TokenMatcher
    capture: str
    separators: frozenset[str] = frozenset({","})
    conjunctions: frozenset[str] = frozenset({"и", "или"})
    skip: tuple[TokenMatcher, ...] = ()


Element = TokenMatcher | Gap | ListMatcher


@dataclass(frozen=True)
class AttributeEmission:
    owner: str   # role or capture holding the owning concept
    attribute: str


@dataclass(frozen=True)
class ObjectRelationEmission:
    subject: str  # anchor role; its lemma is also the predicate source
    object: str


@dataclass(frozen=True)
class HyponymyEmission:
    hypo: str
    hyper: str


@dataclass(frozen=True)
class ConceptEmission:
    term: str


Emission = AttributeEmission | ObjectRelationEmission | HyponymyEmission | ConceptEmission


@dataclass(frozen=True)
class Template:
    name: str
    elements: tuple[Element, ...]
    emissions: tuple[Emission, ...]
    priority: int = 0
    anchor: str | None = None
    draft: bool = False

    def captures(self) -> list[str]:
        out = []
        for el in self.elements:
            if isinstance(el, (TokenMatcher, ListMatcher)) and getattr(el, "capture", None):
                out.append(el.capture)
        return out


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out)


def _split_words(line: str, lineno: int) -> list[str]:
    words = []
    buf = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
            buf.append(ch)
            continue
        if ch.isspace() and not in_str:
            if buf:
                words.append("".join(buf))
                buf = []
            continue
        buf.append(ch)
    if in_str:
        raise TemplateError("unterminated quoted value", lineno)
    if buf:
        words.append("".join(buf))
    return words


def _value_set(raw: str, lineno: int) -> frozenset[str]:
    if raw.startswith("(") and raw.endswith(")"):
        items = [x for x in raw[1:-1].split("|")]
        items = [x for x in items if x != ""]
        if not items:
            raise TemplateError(f"empty value set {raw!r}", lineno)
        return frozenset(items)
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return frozenset({raw[1:-1]})
    return frozenset({raw})


def _unquote(raw: str) -> str:
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    return raw


def _parse_tok(words: list[str], lineno: int) -> TokenMatcher:
    lemma = None
    lemma_in = None
    form_in = None
    pos = None
    case = None
    feats: list[tuple[str, str]] = []
    capture = None
    i = 0
    while i < len(words):
        word = words[i]
        if word == "feat":
            if i + 1 >= len(words) or "=" not in words[i + 1]:
                raise TemplateError("feat expects Key=Val", lineno)
            key, _, value = words[i + 1].partition("=")
            feats.append((key, value))
            i += 2
            continue
        if "=" not in word:
            raise TemplateError(f"bad constraint atom {word!r}", lineno)
        key, _, value = word.partition("=")
        if key == "lemma":
            lemma = _unquote(value)
        elif key == "lemma_in":
            lemma_in = _value_set(value, lineno)
        elif key == "form_in":
            form_in = _value_set(value, lineno)
        elif key == "pos":
            pos = value
        elif key == "case":
            case = value
        elif key == "cap":
            capture = value
        else:
            raise TemplateError(f"unknown constraint key {key!r}", lineno)
        i += 1
    matcher = TokenMatcher(
        lemma=lemma, lemma_in=lemma_in, form_in=form_in, pos=pos, case=case,
        feats=tuple(feats), capture=capture,
    )
    if not matcher.constrained():
        raise TemplateError("tok element needs at least one constraint", lineno)
    return matcher


def _parse_single_constraint(raw: str, lineno: int) -> TokenMatcher:
    # skip-set entries: a one-atom matcher like pos=ADV or lemma=x
    return _parse_tok([raw], lineno)


class _Lines:
    def __init__(self, text: str):
        self.items: list[tuple[int, list[str]]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = _strip_comment(line).strip()
            if not body:
                continue
            self.items.append((lineno, _split_words(body, lineno)))
        self.pos = 0

    def peek(self) -> tuple[int, list[str]] | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> tuple[int, list[str]]:
        item = self.items[self.pos]
        self.pos += 1
        return item


def parse_templates(text: str) -> list[Template]:
    """Parse a template file; validates names, captures and references."""
    lines = _Lines(text)
    templates: list[Template] = []
    names: set[str] = set()
    while lines.peek() is not None:
        lineno, words = lines.next()
        if words[0] != "template" or len(words) != 2:
            raise TemplateError(f"expected 'template <name>', got {' '.join(words)!r}", lineno)
        template = _parse_template_body(words[1], lines, lineno)
        if template.name in names:
            raise TemplateError(f"duplicate template name {template.name!r}", lineno)
        names.add(template.name)
        templates.append(template)
    return templates


def _parse_template_body(name: str, lines: _Lines, start: int) -> Template:
    priority = 0
    anchor = None
    draft = False
    elements: list[Element] = []
    emissions: list[Emission] = []
    seen_seq = False
    while True:
        item = lines.peek()
        if item is None:
            raise TemplateError(f"template {name!r} not closed with 'end'", start)
        lineno, words = lines.next()
        head = words[0]
        if head == "end":
            break
        if head == "priority":
            if len(words) != 2:
                raise TemplateError("priority expects one integer", lineno)
            try:
                priority = int(words[1])
            except ValueError:
                raise TemplateError(f"bad priority {words[1]!r}", lineno)
        elif head == "anchor":
            if len(words) != 2:
                raise TemplateError("anchor expects one role name", lineno)
            anchor = words[1]
        elif head == "draft":
            draft = True
        elif head == "seq":
            if seen_seq:
                raise TemplateError("only one seq block per template", lineno)
            seen_seq = True
            elements = _parse_seq(lines, name, lineno)
        elif head == "emit":
            emissions.append(_parse_emit(words[1:], lineno))
        else:
            raise TemplateError(f"unexpected {head!r} in template {name!r}", lineno)
    template = Template(
        name=name,
        elements=tuple(elements),
        emissions=tuple(emissions),
        priority=priority,
        anchor=anchor,
        draft=draft,
    )
    _validate_template(template, start)
    return template


def _parse_seq(lines: _Lines, name: str, start: int) -> list[Element]:
    elements: list[Element] = []
    while True:
        item = lines.peek()
        if item is None:
            raise TemplateError(f"seq in template {name!r} not closed with 'end'", start)
        lineno, words = lines.next()
        head = words[0]
        if head == "end":
            return elements
        if head == "tok":
            elements.append(_parse_tok(words[1:], lineno))
        elif head == "gap":
            if len(words) != 2 or ".." not in words[1]:
                raise TemplateError("gap expects MIN..MAX", lineno)
            lo, _, hi = words[1].partition("..")
            try:
                mn, mx = int(lo), int(hi)
            except ValueError:
                raise TemplateError(f"bad gap bounds {words[1]!r}", lineno)
            if not (0 <= mn <= mx <= MAX_GAP):
                raise TemplateError(f"gap bounds must satisfy 0 <= min <= max <= {MAX_GAP}", lineno)
            elements.append(Gap(min_skip=mn, max_skip=mx))
        elif head == "list":
            elements.append(_parse_list(words[1:], lines, lineno))
        else:
            raise TemplateError(f"unexpected {head!r} inside seq", lineno)


def _parse_list(words: list[str], lines: _Lines, start: int) -> ListMatcher:
    capture = None
    separators = frozenset({","})
    conjunctions = frozenset({"и", "или"})
    skip: tuple[TokenMatcher, ...] = ()
    for word in words:
        if "=" not in word:
            raise TemplateError(f"bad list option {word!r}", start)
        key, _, value = word.partition("=")
        if key == "cap":
            capture = value
        elif key == "sep":
            separators = _value_set(value, start)
        elif key == "conj":
            conjunctions = _value_set(value, start)
        elif key == "skip":
            raw = value
            if not (raw.startswith("(") and raw.endswith(")")):
                raise TemplateError("skip expects (atom|atom|...)", start)
            skip = tuple(
                _parse_single_constraint(part, start)
                for part in raw[1:-1].split("|")
                if part
            )
        else:
            raise TemplateError(f"unknown list option {key!r}", start)
    if capture is None:
        raise TemplateError("list element requires cap=", start)
    inner = None
    while True:
        item = lines.peek()
        if item is None:
            raise TemplateError("list block not closed with 'end'", start)
        lineno, words = lines.next()
        if words[0] == "end":
            break
        if words[0] != "tok" or inner is not None:
            raise TemplateError("list block holds exactly one inner tok", lineno)
        inner = _parse_tok(words[1:], lineno)
    if inner is None:
        raise TemplateError("list block needs an inner tok", start)
    if inner.capture is not None:
        raise TemplateError("inner tok of a list cannot carry cap= (the list captures)", start)
    return ListMatcher(
        item=inner, capture=capture, separators=separators,
        conjunctions=conjunctions, skip=skip,
    )


def _parse_emit(args: list[str], lineno: int) -> Emission:
    if not args:
        raise TemplateError("emit expects a kind", lineno)
    kind, rest = args[0], args[1:]
    if kind == "attribute":
        if len(rest) != 2:
            raise TemplateError("emit attribute expects <owner> <capture>", lineno)
        return AttributeEmission(owner=rest[0], attribute=rest[1])
    if kind == "object_relation":
        if len(rest) != 2:
            raise TemplateError("emit object_relation expects <role> <capture>", lineno)
        return ObjectRelationEmission(subject=rest[0], object=rest[1])
    if kind == "hyponymy":
        if len(rest) != 2:
            raise TemplateError("emit hyponymy expects <capture> <capture-or-role>", lineno)
        return HyponymyEmission(hypo=rest[0], hyper=rest[1])
    if kind == "concept":
        if len(rest) != 1:
            raise TemplateError("emit concept expects <capture>", lineno)
        return ConceptEmission(term=rest[0])
    raise TemplateError(f"unknown emission kind {kind!r}", lineno)


def _validate_template(template: Template, line: int) -> None:
    if not template.elements:
        raise TemplateError(f"template {template.name!r} has no elements", line)
    lists = [el for el in template.elements if isinstance(el, ListMatcher)]
    if len(lists) > 1:
        raise TemplateError(
            f"template {template.name!r} has more than one list element", line
        )
    captures = template.captures()
    dupes = {c for c in captures if captures.count(c) > 1}
    if dupes:
        raise TemplateError(
            f"capture defined by more than one element: {sorted(dupes)}", line
        )
    capture_set = set(captures)
    uses_anchor = any(
        isinstance(el, TokenMatcher) and el.lemma == ANCHOR_LEMMA
        for el in template.elements
    )
    if uses_anchor and template.anchor is None:
        raise TemplateError(
            f"template {template.name!r} uses $anchor without an anchor declaration", line
        )
    if template.anchor is not None and template.anchor not in capture_set:
        raise TemplateError(
            f"anchor role {template.anchor!r} is not a capture of any element", line
        )
    for emission in template.emissions:
        for ref in _emission_refs(emission):
            if ref not in capture_set:
                raise TemplateError(
                    f"emission references undefined capture {ref!r}", line
                )


def _emission_refs(emission: Emission) -> tuple[str, ...]:
    if isinstance(emission, AttributeEmission):
        return (emission.owner, emission.attribute)
    if isinstance(emission, ObjectRelationEmission):
        return (emission.subject, emission.object)
    if isinstance(emission, HyponymyEmission):
        return (emission.hypo, emission.hyper)
    return (emission.term,)


def _render_set(values: frozenset[str]) -> str:
    return "(" + "|".join(sorted(values)) + ")"


def _render_tok(tok: TokenMatcher) -> str:
    parts = ["tok"]
    if tok.lemma is not None:
        parts.append(f"lemma={tok.lemma}")
    if tok.lemma_in is not None:
        parts.append(f"lemma_in={_render_set(tok.lemma_in)}")
    if tok.form_in is not None:
        parts.append(f"form_in={_render_set(tok.form_in)}")
    if tok.pos is not None:
        parts.append(f"pos={tok.pos}")
    if tok.case is not None:
        parts.append(f"case={tok.case}")
    for key, value in tok.feats:
        parts.append(f"feat {key}={value}")
    if tok.capture is not None:
        parts.append(f"cap={tok.capture}")
    return " ".join(parts)


def render_template(template: Template) -> str:
    """Template back to DSL text (used when writing draft templates)."""
    lines = [f"template {template.name}", f"  priority {template.priority}"]
    if template.anchor:
        lines.append(f"  anchor {template.anchor}")
    if template.draft:
        lines.append("  draft")
    lines.append("  seq")
    for el in template.elements:
        if isinstance(el, TokenMatcher):
            lines.append("    " + _render_tok(el))
        elif isinstance(el, Gap):
            lines.append(f"    gap {el.min_skip}..{el.max_skip}")
        else:
            opts = [f"cap={el.capture}"]
            opts.append("sep=" + _render_set(el.separators))
            opts.append("conj=" + _render_set(el.conjunctions))
            if el.skip:
                atoms = []
                for matcher in el.skip:
                    atoms.append(_render_tok(matcher).removeprefix("tok "))
                opts.append("skip=(" + "|".join(atoms) + ")")
            lines.append("    list " + " ".join(opts))
            lines.append("      " + _render_tok(el.item))
            lines.append("    end")
    lines.append("  end")
    for emission in template.emissions:
        if isinstance(emission, AttributeEmission):
            lines.append(f"  emit attribute {emission.owner} {emission.attribute}")
        elif isinstance(emission, ObjectRelationEmission):
            lines.append(f"  emit object_relation {emission.subject} {emission.object}")
        elif isinstance(emission, HyponymyEmission):
            lines.append(f"  emit hyponymy {emission.hypo} {emission.hyper}")
        else:
            lines.append(f"  emit concept {emission.term}")
    lines.append("end")
    return "\n".join(lines) + "\n"
