"""HTTP/JSON face of the repository plus the interview-session endpoints.

Data-access verdicts map to HTTP as: unauthenticated gates 401, missing
approval or failed IP validation 403, downloads disabled for the strictest
tag 451. Metadata and interview endpoints never require credentials.
"""

from __future__ import annotations

import base64
import binascii
import uuid
from typing import Any

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..decision_tree import InterviewSession, SessionTerminalError, start_session
from ..enforcement.view import PageOutOfRange, ViewBudgetExceeded
from ..taxonomy import TagId, UnknownTagId, tag_metadata
from .repository import (
    EncryptedDownload,
    NotFoundError,
    PlainDownload,
    Repository,
    ServiceError,
    ViewPage,
)


class RegisterBody(BaseModel):
    username: str
    password: str
    role: str = "reader"


class AuthBody(BaseModel):
    username: str
    password: str


class FactorBody(BaseModel):
    factor: str = "otp"
    proof: str


class DepositBody(BaseModel):
    metadata: dict[str, Any] = Field(default_factory=dict)
    payload_base64: str = ""
    answers: dict[str, Any] | None = None
    tag: str | None = None
    justification: str = ""
    supersedes: str | None = None


class AccessRequestBody(BaseModel):
    justification: str = ""


class DecisionBody(BaseModel):
    decision: str
    note: str = ""
    ip_ranges: list[str] = Field(default_factory=list)


class AnswerBody(BaseModel):
    answer: str


def _bearer_token(authorization: str | None = Header(default=None)) -> str | None:
    if authorization and authorization.lower().startswith("bearer "):
        return authorization[7:].strip()
    return None


def create_app(repository: Repository) -> FastAPI:
    app = FastAPI(title="datatags repository", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.repository = repository
    interview_sessions: dict[str, InterviewSession] = {}

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.http_status, content={"error": exc.code, "detail": str(exc)}
        )

    @app.exception_handler(PageOutOfRange)
    async def page_handler(_request: Request, exc: PageOutOfRange):
        return JSONResponse(
            status_code=416, content={"error": "page-out-of-range", "detail": str(exc)}
        )

    @app.exception_handler(ViewBudgetExceeded)
    async def budget_handler(_request: Request, exc: ViewBudgetExceeded):
        return JSONResponse(
            status_code=429, content={"error": "view-budget-exceeded", "detail": str(exc)}
        )

    @app.exception_handler(SessionTerminalError)
    async def terminal_handler(_request: Request, exc: SessionTerminalError):
        return JSONResponse(
            status_code=409, content={"error": "session-terminal", "detail": str(exc)}
        )

    @app.exception_handler(UnknownTagId)
    async def unknown_tag_handler(_request: Request, exc: UnknownTagId):
        return JSONResponse(
            status_code=422, content={"error": "unknown-tag", "detail": str(exc)}
        )

    # -- health ---------------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "tree_version": repository.tree.version}

    # -- users and authentication ----------------------------------------------

    @app.post("/users", status_code=201)
    def register(body: RegisterBody):
        user, otp_secret = repository.register_user(body.username, body.password, body.role)
        return {
            "id": user.id,
            "username": user.username,
            "role": user.role,
            "otp_secret": otp_secret,
        }

    @app.post("/auth")
    def auth(body: AuthBody):
        session = repository.authenticate(body.username, body.password)
        return {"token": session.token, "factors_satisfied": session.factors_satisfied}

    @app.post("/auth/factor")
    def auth_factor(body: FactorBody, token: str | None = Depends(_bearer_token)):
        session = repository.satisfy_factor(token or "", body.factor, body.proof)
        return {"token": session.token, "factors_satisfied": session.factors_satisfied}

    # -- datasets ----------------------------------------------------------------

    @app.post("/datasets")
    def deposit(body: DepositBody, response: Response, token: str | None = Depends(_bearer_token)):
        try:
            payload = base64.b64decode(body.payload_base64 or "", validate=True)
        except (binascii.Error, ValueError):
            raise ServiceError("payload_base64 is not valid base64") from None
        dataset = repository.deposit(
            token or "",
            body.metadata,
            payload,
            answers=body.answers,
            tag_override=body.tag,
            justification=body.justification,
            supersedes=body.supersedes,
        )
        response.status_code = 202 if dataset.status.value == "quarantined-no-tag" else 201
        return repository.fetch_metadata(dataset.id)

    @app.get("/datasets/{dataset_id}")
    def metadata(dataset_id: str):
        return repository.fetch_metadata(dataset_id)

    @app.get("/datasets/{dataset_id}/data")
    def data(
        dataset_id: str,
        request: Request,
        mode: str = Query(default="view"),
        page: int = Query(default=0),
        token: str | None = Depends(_bearer_token),
        x_download_password: str | None = Header(default=None),
    ):
        source_ip = request.client.host if request.client else ""
        result = repository.fetch_data(
            token,
            dataset_id,
            mode,
            password=x_download_password,
            page=page,
            source_ip=source_ip,
        )
        if isinstance(result, PlainDownload):
            return Response(
                content=result.data,
                media_type="application/octet-stream",
                headers={"X-Dataset-Id": dataset_id, "X-Content-Kind": "plain"},
            )
        if isinstance(result, EncryptedDownload):
            return Response(
                content=result.package.container,
                media_type="application/octet-stream",
                headers={"X-Dataset-Id": dataset_id, "X-Content-Kind": "encrypted-package"},
            )
        assert isinstance(result, ViewPage)
        return {
            "dataset_id": dataset_id,
            **result.fragment.to_json(),
            "bytes_remaining": result.bytes_remaining,
        }

    # -- access requests -----------------------------------------------------------

    @app.post("/datasets/{dataset_id}/requests", status_code=201)
    def create_request(
        dataset_id: str, body: AccessRequestBody, token: str | None = Depends(_bearer_token)
    ):
        request = repository.request_access(token or "", dataset_id, body.justification)
        return request.to_json()

    @app.get("/requests")
    def pending_requests(token: str | None = Depends(_bearer_token)):
        out = []
        for request in repository.pending_requests_for_depositor(token or ""):
            record = request.to_json()
            dataset = repository.fetch_metadata(request.dataset_id)
            record["dataset"] = {
                "id": dataset["id"],
                "tag": dataset["tag"],
                "metadata": dataset["metadata"],
            }
            tag = TagId(dataset["tag"])
            if tag in (TagId.ORANGE, TagId.PURPLE):
                record["criterion_hint"] = (
                    "general area linked to a medical or research speciality"
                    if tag is TagId.ORANGE
                    else "particular research area"
                )
            else:
                record["criterion_hint"] = None
            out.append(record)
        return {"requests": out}

    @app.post("/requests/{request_id}/decision")
    def decide(request_id: str, body: DecisionBody, token: str | None = Depends(_bearer_token)):
        request = repository.decide_request(
            token or "",
            request_id,
            body.decision,
            note=body.note,
            ip_ranges=body.ip_ranges,
        )
        return request.to_json()

    # -- audit ------------------------------------------------------------------

    @app.get("/audit")
    def audit(
        token: str | None = Depends(_bearer_token),
        dataset_id: str | None = Query(default=None),
        actor: str | None = Query(default=None),
        action: str | None = Query(default=None),
    ):
        events = repository.audit_log(
            token or "", dataset_id=dataset_id, actor=actor, action=action
        )
        return {"events": [e.to_json() for e in events]}

    # -- interview sessions --------------------------------------------------------

    def _session_state(session_id: str, session: InterviewSession) -> dict[str, Any]:
        trail = []
        for question_id, value in session.answers:
            question = session.tree.question(question_id)
            trail.append(
                {
                    "question_id": question_id,
                    "prompt": question.prompt,
                    "answer": "yes" if value else "no",
                }
            )
        state: dict[str, Any] = {
            "session_id": session_id,
            "tree_version": session.tree_version,
            "terminal": session.is_terminal,
            "question": None,
            "trail": trail,
            "result": None,
        }
        if session.is_terminal:
            leaf = session.result
            tag = tag_metadata(leaf.tag)
            consequences = None
            if leaf.tag is not TagId.NOTAG:
                consequences = repository.matrix[leaf.tag].summary()
            state["result"] = {
                "tag": tag.id.value,
                "label": tag.label,
                "strictness": tag.strictness,
                "requires_depositor_review": tag.requires_depositor_review,
                "description": tag.description,
                "legal_bases": [b.to_json() for b in tag.legal_bases],
                "note": leaf.note,
                "consequences": consequences,
            }
        else:
            question = session.current_question
            state["question"] = {
                "id": question.id,
                "prompt": question.prompt,
                "help": question.help,
            }
        return state

    def _interview(session_id: str) -> InterviewSession:
        session = interview_sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown interview session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session():
        session_id = f"iv-{uuid.uuid4().hex[:12]}"
        interview_sessions[session_id] = start_session(repository.tree)
        return _session_state(session_id, interview_sessions[session_id])

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_state(session_id, _interview(session_id))

    @app.post("/sessions/{session_id}/answers")
    def answer_session(session_id: str, body: AnswerBody):
        value = body.answer.strip().lower()
        if value not in ("yes", "no", "y", "n", "true", "false"):
            raise ServiceError(f"answer must be yes or no, got {body.answer!r}")
        session = _interview(session_id).answer(value in ("yes", "y", "true"))
        interview_sessions[session_id] = session
        return _session_state(session_id, session)

    @app.post("/sessions/{session_id}/undo")
    def undo_session(session_id: str):
        session = _interview(session_id).undo()
        interview_sessions[session_id] = session
        return _session_state(session_id, session)

    return app
