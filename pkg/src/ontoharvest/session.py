"""Review-session persistence and the expert decision workflow.

A session is a directory of plain files:

    base.ttl            frozen base ontology
    candidates.jsonl    extraction output (statuses here stay 'pending')
    decisions.log       append-only JSON-lines decision log
    extended.ttl        written by finalize
    diff.txt            written by finalize

Current candidate state is always the fold of decisions.log over the
initial candidate set, so replaying the log reproduces the state exactly.
Only decisions that change state are appended; duplicates are no-ops.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ontoharvest import turtle
from ontoharvest.extension import (
    PAYLOAD_FIELDS,
    Candidate,
    ExtensionResult,
    extend_ontology,
    normalize_lemma,
    read_candidates,
)
from ontoharvest.ontology import Ontology

BASE_FILE = "base.ttl"
CANDIDATES_FILE = "candidates.jsonl"
DECISIONS_FILE = "decisions.log"
EXTENDED_FILE = "extended.ttl"
DIFF_FILE = "diff.txt"

PAGE_SIZE = 50

VERDICTS = ("accept", "reject")


class SessionError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionRecord:
    candidate: str
    verdict: str
    reviewer: str = ""
    timestamp: int = 0
    edit: Mapping[str, str] | None = None

    def to_json(self) -> str:
        record: dict = {
            "candidate": self.candidate,
            "verdict": self.verdict,
            "reviewer": self.reviewer,
            "timestamp": self.timestamp,
        }
        if self.edit is not None:
            record["edit"] = dict(self.edit)
        return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def decision_from_dict(record: Mapping) -> DecisionRecord:
    """Validate a raw decision mapping; raises SessionError with a reason."""
    if not isinstance(record, Mapping):
        raise SessionError("decision must be an object")
    candidate = record.get("candidate")
    if not isinstance(candidate, str) or not candidate:
        raise SessionError("decision needs a candidate id")
    verdict = record.get("verdict")
    if verdict not in VERDICTS:
        raise SessionError(f"verdict must be one of {VERDICTS}, got {verdict!r}")
    edit = record.get("edit")
    if edit is not None:
        if verdict != "accept":
            raise SessionError("edit is only allowed with verdict accept")
        if not isinstance(edit, Mapping) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in edit.items()
        ):
            raise SessionError("edit must map payload field names to strings")
    reviewer = record.get("reviewer", "")
    if not isinstance(reviewer, str):
        raise SessionError("reviewer must be a string")
    timestamp = record.get("timestamp", 0)
    if not isinstance(timestamp, int):
        raise SessionError("timestamp must be an integer (UTC seconds)")
    return DecisionRecord(
        candidate=candidate,
        verdict=verdict,
        reviewer=reviewer,
        timestamp=timestamp,
        edit=dict(edit) if edit is not None else None,
    )


def read_decisions(text: str) -> list[tuple[DecisionRecord | None, str | None, str]]:
    """Parse a decision file leniently.

    Returns one (record, error, raw_line) triple per non-blank line;
    malformed lines carry the error instead of a record.
    """
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            out.append((None, f"invalid JSON: {exc.msg}", line))
            continue
        try:
            out.append((decision_from_dict(raw), None, line))
        except SessionError as exc:
            out.append((None, str(exc), line))
    return out


@dataclass
class DecisionReport:
    applied: list[str] = field(default_factory=list)
    noops: list[str] = field(default_factory=list)
    unknown: list[str] = field(default_factory=list)
    conflicts: list[str] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (line, reason)

    def render(self) -> str:
        lines = [
            f"applied: {len(self.applied)}",
            f"no-ops: {len(self.noops)}",
        ]
        for cid in self.unknown:
            lines.append(f"unknown candidate id: {cid}")
        for cid in self.conflicts:
            lines.append(f"conflicting verdicts for {cid}: last record wins")
        for raw, reason in self.rejected:
            lines.append(f"rejected record ({reason}): {raw}")
        return "\n".join(lines) + "\n"


def _apply_record(candidate: Candidate, record: DecisionRecord) -> Candidate:
    if record.verdict == "reject":
        return replace(candidate, status="rejected", edited_payload=None)
    if record.edit is not None:
        required = PAYLOAD_FIELDS[candidate.kind]
        unknown_fields = set(record.edit) - set(required)
        if unknown_fields:
            raise SessionError(
                f"edit has fields {sorted(unknown_fields)} not in {candidate.kind} payload"
            )
        payload = {**candidate.payload, **record.edit}
        return replace(candidate, status="edited", edited_payload=payload)
    return replace(candidate, status="accepted", edited_payload=None)


class Session:
    """Mutable view over a session directory; single writer assumed."""

    def __init__(self, directory: Path, base: Ontology, candidates: Sequence[Candidate]):
        self.directory = Path(directory)
        self.base = base
        self.candidates: dict[str, Candidate] = {c.id: c for c in candidates}

    # -- construction ------------------------------------------------------

    @classmethod
    def init(cls, directory: Path, base_ttl: str, candidates_jsonl: str) -> "Session":
        """Create the session files (refuses to clobber an existing session)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name in (BASE_FILE, CANDIDATES_FILE):
            if (directory / name).exists():
                raise SessionError(f"session already initialized: {directory / name} exists")
        turtle.parse(base_ttl)  # validate before writing
        read_candidates(candidates_jsonl)
        (directory / BASE_FILE).write_text(base_ttl, encoding="utf-8")
        (directory / CANDIDATES_FILE).write_text(candidates_jsonl, encoding="utf-8")
        return cls.load(directory)

    @classmethod
    def load(cls, directory: Path) -> "Session":
        directory = Path(directory)
        base_path = directory / BASE_FILE
        cand_path = directory / CANDIDATES_FILE
        if not base_path.exists() or not cand_path.exists():
            raise SessionError(
                f"not a session directory (need {BASE_FILE} and {CANDIDATES_FILE}): {directory}"
            )
        base = turtle.parse(base_path.read_text(encoding="utf-8"))
        candidates = read_candidates(cand_path.read_text(encoding="utf-8"))
        session = cls(directory, base, candidates)
        log_path = directory / DECISIONS_FILE
        if log_path.exists():
            for record, error, line in read_decisions(log_path.read_text(encoding="utf-8")):
                if error is not None:
                    raise SessionError(f"corrupt decision log: {error}: {line}")
                if record.candidate in session.candidates:
                    session.candidates[record.candidate] = _apply_record(
                        session.candidates[record.candidate], record
                    )
        return session

    # -- queries -----------------------------------------------------------

    def list_candidates(
        self,
        status: str | None = None,
        kind: str | None = None,
        min_score: int | None = None,
        page: int = 1,
        page_size: int = PAGE_SIZE,
    ) -> dict:
        items = [
            c
            for c in self.candidates.values()
            if (status is None or c.status == status)
            and (kind is None or c.kind == kind)
            and (min_score is None or c.score >= min_score)
        ]
        items.sort(key=lambda c: (-c.score, c.id))
        total = len(items)
        pages = max(1, -(-total // page_size))
        page = max(1, min(page, pages))
        chunk = items[(page - 1) * page_size : page * page_size]
        return {"items": chunk, "page": page, "pages": pages, "total": total}

    def stats(self) -> dict:
        by_status: dict[str, int] = {}
        by_kind: dict[str, int] = {}
        for c in self.candidates.values():
            by_status[c.status] = by_status.get(c.status, 0) + 1
            by_kind[c.kind] = by_kind.get(c.kind, 0) + 1
        return {
            "total": len(self.candidates),
            "by_status": dict(sorted(by_status.items())),
            "by_kind": dict(sorted(by_kind.items())),
        }

    def accepted_candidates(self) -> list[Candidate]:
        return sorted(
            (c for c in self.candidates.values() if c.status in ("accepted", "edited")),
            key=lambda c: (c.kind, c.id),
        )

    # -- mutations ----------------------------------------------------------

    def apply_decisions(
        self, items: Iterable[tuple[DecisionRecord | None, str | None, str]]
    ) -> DecisionReport:
        """Apply decision records in order (last record per id wins)."""
        report = DecisionReport()
        effective: list[DecisionRecord] = []
        seen: set[str] = set()
        for record, error, line in items:
            if error is not None:
                report.rejected.append((line, error))
                continue
            if record.candidate not in self.candidates:
                report.unknown.append(record.candidate)
                continue
            if record.candidate in seen:
                report.conflicts.append(record.candidate)
            seen.add(record.candidate)
            effective.append(record)

        log_lines = []
        for record in effective:
            current = self.candidates[record.candidate]
            try:
                updated = _apply_record(current, record)
            except SessionError as exc:
                report.rejected.append((record.to_json(), str(exc)))
                continue
            if updated == current:
                report.noops.append(record.candidate)
                continue
            self.candidates[record.candidate] = updated
            log_lines.append(record.to_json())
            report.applied.append(record.candidate)
        if log_lines:
            with open(self.directory / DECISIONS_FILE, "a", encoding="utf-8") as fh:
                for line in log_lines:
                    fh.write(line + "\n")
        return report

    def auto_accept(self, reviewer: str = "auto-accept") -> DecisionReport:
        """Accept every pending candidate (test/CI convenience)."""
        pending = sorted(
            cid for cid, c in self.candidates.items() if c.status == "pending"
        )
        records = [
            (DecisionRecord(candidate=cid, verdict="accept", reviewer=reviewer), None, "")
            for cid in pending
        ]
        return self.apply_decisions(records)

    def extended_ontology(self) -> ExtensionResult:
        """Extension result for the current accepted set (pure, no files)."""
        return extend_ontology(self.base, self.accepted_candidates())

    def finalize(self) -> ExtensionResult:
        """Extend, then persist extended.ttl and diff.txt in the session."""
        result = self.extended_ontology()
        (self.directory / EXTENDED_FILE).write_text(
            turtle.serialize(result.ontology), encoding="utf-8"
        )
        (self.directory / DIFF_FILE).write_text(result.diff.render(), encoding="utf-8")
        return result


def highlight_offsets(sentence: str, matched_text: str) -> tuple[int, int] | None:
    """Char offsets of the matched token run inside the sentence text.

    The matched text is space-joined token forms; locate each form in
    order.  Returns None when the forms cannot be found (e.g. the corpus
    had no text comments).
    """
    start = None
    cursor = 0
    for piece in matched_text.split(" "):
        if not piece:
            continue
        idx = sentence.find(piece, cursor)
        if idx < 0:
            return None
        if start is None:
            start = idx
        cursor = idx + len(piece)
    if start is None:
        return None
    return (start, cursor)


__all__ = [
    "Session",
    "SessionError",
    "DecisionRecord",
    "DecisionReport",
    "decision_from_dict",
    "read_decisions",
    "highlight_offsets",
    "normalize_lemma",
    "BASE_FILE",
    "CANDIDATES_FILE",
    "DECISIONS_FILE",
    "EXTENDED_FILE",
    "DIFF_FILE",
    "PAGE_SIZE",
]
