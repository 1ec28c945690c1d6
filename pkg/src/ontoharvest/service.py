"""HTTP veneer over a review session for the browser UI.

All mutations funnel through one lock so decision application never
interleaves; every endpoint is a thin call into :class:`Session`, and the
CLI reaches the same code paths, so batch and interactive review agree.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ontoharvest import turtle
from ontoharvest.extension import Candidate
from ontoharvest.session import Session, SessionError, decision_from_dict, highlight_offsets


class DecisionBody(BaseModel):
    verdict: Literal["accept", "reject"]
    edit: dict[str, str] | None = None
    reviewer: str = "ui"


def candidate_brief(c: Candidate) -> dict:
    return {
        "id": c.id,
        "kind": c.kind,
        "payload": dict(c.payload),
        "edited_payload": dict(c.edited_payload) if c.edited_payload is not None else None,
        "score": c.score,
        "status": c.status,
        "flags": list(c.flags),
    }


def candidate_detail(c: Candidate) -> dict:
    out = candidate_brief(c)
    provenance = []
    for p in c.provenance:
        offsets = highlight_offsets(p.sentence, p.text) if p.sentence else None
        provenance.append(
            {
                "doc": p.doc_id,
                "sent": p.sent_id,
                "start": p.start,
                "end": p.end,
                "template": p.template,
                "text": p.text,
                "sentence": p.sentence,
                "char_start": offsets[0] if offsets else None,
                "char_end": offsets[1] if offsets else None,
            }
        )
    out["provenance"] = provenance
    return out


def diff_payload(result) -> dict:
    return {
        "lines": result.diff.render().splitlines(),
        "added_concepts": [list(x) for x in result.diff.added_concepts],
        "added_subsumptions": [list(x) for x in result.diff.added_subsumptions],
        "added_relations": [[rid, list(sig)] for rid, sig in result.diff.added_relations],
        "added_attributes": [list(x) for x in result.diff.added_attributes],
        "skipped": [
            {"candidate": s.candidate_id, "reason": s.reason} for s in result.skipped
        ],
    }


def create_app(session: Session, static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="ontoharvest review", version="0.1.0")
    lock = threading.Lock()

    @app.get("/api/candidates")
    def list_candidates(
        status: str | None = None,
        kind: str | None = None,
        min_score: int | None = None,
        page: int = Query(default=1, ge=1),
    ) -> dict:
        with lock:
            result = session.list_candidates(
                status=status, kind=kind, min_score=min_score, page=page
            )
        return {
            "items": [candidate_brief(c) for c in result["items"]],
            "page": result["page"],
            "pages": result["pages"],
            "total": result["total"],
        }

    @app.get("/api/candidates/{cid}")
    def get_candidate(cid: str) -> dict:
        with lock:
            candidate = session.candidates.get(cid)
        if candidate is None:
            raise HTTPException(status_code=404, detail=f"no candidate {cid}")
        return candidate_detail(candidate)

    @app.post("/api/candidates/{cid}/decision")
    def post_decision(cid: str, body: DecisionBody) -> dict:
        raw = {
            "candidate": cid,
            "verdict": body.verdict,
            "reviewer": body.reviewer,
            "timestamp": int(time.time()),
        }
        if body.edit is not None:
            raw["edit"] = body.edit
        try:
            record = decision_from_dict(raw)
        except SessionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with lock:
            if cid not in session.candidates:
                raise HTTPException(status_code=404, detail=f"no candidate {cid}")
            report = session.apply_decisions([(record, None, "")])
            candidate = session.candidates[cid]
        if report.rejected:
            raise HTTPException(status_code=422, detail=report.rejected[0][1])
        return {
            "candidate": candidate_brief(candidate),
            "applied": bool(report.applied),
            "noop": bool(report.noops),
        }

    @app.get("/api/ontology", response_class=PlainTextResponse)
    def get_ontology(version: Literal["base", "extended"] = "base") -> str:
        with lock:
            if version == "base":
                return turtle.serialize(session.base)
            return turtle.serialize(session.extended_ontology().ontology)

    @app.post("/api/finalize")
    def finalize() -> dict:
        with lock:
            result = session.finalize()
        return diff_payload(result)

    @app.get("/api/stats")
    def stats() -> dict:
        with lock:
            return session.stats()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(session: Session, port: int, static_dir: Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(session, static_dir), host="127.0.0.1", port=port, log_level="info")
