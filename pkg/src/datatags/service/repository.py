"""File-backed reference repository: users, deposits, approvals, audited access.

Persistence is plain files so the whole system runs at desk scale:

    data_dir/
      store/                dataset store namespace (never holds key material)
        datasets/{id}.json  open metadata records
        payloads/{sha256}   vault containers, or raw bytes for blue
      users.json
      requests.json
      audit.log             append-only JSON lines, one event per line

Key shares go to custodian keystores outside the store namespace (a local
directory or a remote escrow endpoint). A single lock serializes mutations
and audit appends; reads of immutable records run concurrently.
"""

from __future__ import annotations

import hashlib
import hmac
import ipaddress
import json
import secrets
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

from ..decision_tree import (
    AnswerSet,
    InvalidTreeError,
    MissingAnswerError,
    TreeDefinition,
    classify_detailed,
    default_tree,
    load_tree,
    validate_tree,
)
from ..enforcement.access import (
    REASON_APPROVAL,
    REASON_DOWNLOADS_DISABLED,
    REASON_FACTORS,
    REASON_IP,
    REASON_REGISTRATION,
    RequestKind,
    RequesterContext,
    Role,
    Verdict,
    decide_access,
)
from ..enforcement.vault import (
    Custodian,
    DownloadPackage,
    EncryptedObject,
    PlainStoredObject,
    ShareRole,
    WeakPassword,
    custodians_for,
    decrypt_dataset,
    encrypt_dataset,
    package_download,
)
from ..enforcement.view import ViewBudgetExceeded, ViewFragment, render_view
from ..policy_matrix import (
    HandlingPolicy,
    default_matrix,
    load_matrix,
)
from ..taxonomy import TagId, tag_metadata
from .config import ServiceConfig
from .keystores import DirectoryKeystore, HttpEscrowKeystore, Keystore


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# --------------------------------------------------------------------------
# errors


class ServiceError(Exception):
    code = "service-error"
    http_status = 400


class AuthRequiredError(ServiceError):
    code = "auth-required"
    http_status = 401


class ForbiddenError(ServiceError):
    code = "forbidden"
    http_status = 403


class NotFoundError(ServiceError):
    code = "not-found"
    http_status = 404


class UsernameTakenError(ServiceError):
    code = "username-taken"
    http_status = 409


class ClassificationIncompleteError(ServiceError):
    code = "classification-incomplete"
    http_status = 422

    def __init__(self, detail: str):
        super().__init__(detail)


class MissingJustificationError(ServiceError):
    code = "missing-justification"
    http_status = 422


class QuarantinedDatasetError(ServiceError):
    code = "quarantined"
    http_status = 409


class NotRequiredError(ServiceError):
    code = "approval-not-required"
    http_status = 400


class AlreadyPendingError(ServiceError):
    code = "already-pending"
    http_status = 409

    def __init__(self, request_id: str):
        super().__init__(f"a pending request already exists: {request_id}")
        self.request_id = request_id


class NotDepositorError(ServiceError):
    code = "not-depositor"
    http_status = 403


class AlreadyDecidedError(ServiceError):
    code = "already-decided"
    http_status = 409


class MissingCriterionNoteError(ServiceError):
    code = "missing-criterion-note"
    http_status = 422

    def __init__(self, tag: TagId):
        super().__init__(
            f"approving a {tag.value} request needs a note stating the "
            "consent-scope criterion that was checked"
        )


class PasswordRequiredError(ServiceError):
    code = "password-required"
    http_status = 400


class WeakPasswordError(ServiceError):
    code = "weak-password"
    http_status = 400


class AccessDeniedError(ServiceError):
    code = "access-denied"

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason
        if reason in (REASON_REGISTRATION, REASON_FACTORS):
            self.http_status = 401
        elif reason in (REASON_APPROVAL, REASON_IP):
            self.http_status = 403
        elif reason == REASON_DOWNLOADS_DISABLED:
            self.http_status = 451
        else:
            self.http_status = 403


# --------------------------------------------------------------------------
# records


class DatasetStatus(str, Enum):
    ACTIVE = "active"
    QUARANTINED_NOTAG = "quarantined-no-tag"


class RequestState(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    DENIED = "denied"


@dataclass(frozen=True)
class PayloadRef:
    content_address: str
    size: int
    encrypted: bool
    algorithm_id: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "content_address": self.content_address,
            "size": self.size,
            "encrypted": self.encrypted,
            "algorithm_id": self.algorithm_id,
        }


@dataclass(frozen=True)
class Dataset:
    id: str
    descriptive: dict[str, Any]
    tag: TagId
    status: DatasetStatus
    depositor: str
    created_at: str
    classification: dict[str, Any]
    payload: PayloadRef | None = None
    supersedes: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "metadata": self.descriptive,
            "tag": self.tag.value,
            "status": self.status.value,
            "depositor": self.depositor,
            "created_at": self.created_at,
            "classification": self.classification,
            "payload": self.payload.to_json() if self.payload else None,
            "supersedes": self.supersedes,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Dataset":
        payload = data.get("payload")
        return cls(
            id=data["id"],
            descriptive=data.get("metadata", {}),
            tag=TagId(data["tag"]),
            status=DatasetStatus(data["status"]),
            depositor=data["depositor"],
            created_at=data["created_at"],
            classification=data.get("classification", {}),
            payload=PayloadRef(**payload) if payload else None,
            supersedes=data.get("supersedes"),
        )


@dataclass(frozen=True)
class User:
    id: str
    username: str
    password_record: dict[str, str]
    role: str
    otp_secret: str
    created_at: str

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "username": self.username,
            "password": self.password_record,
            "role": self.role,
            "otp_secret": self.otp_secret,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "User":
        return cls(
            id=data["id"],
            username=data["username"],
            password_record=data["password"],
            role=data["role"],
            otp_secret=data["otp_secret"],
            created_at=data["created_at"],
        )


@dataclass(frozen=True)
class AccessRequest:
    id: str
    dataset_id: str
    requester: str
    justification: str
    state: RequestState
    created_at: str
    note: str = ""
    ip_ranges: tuple[str, ...] = ()
    decided_by: str | None = None
    decided_at: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "requester": self.requester,
            "justification": self.justification,
            "state": self.state.value,
            "created_at": self.created_at,
            "note": self.note,
            "ip_ranges": list(self.ip_ranges),
            "decided_by": self.decided_by,
            "decided_at": self.decided_at,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AccessRequest":
        return cls(
            id=data["id"],
            dataset_id=data["dataset_id"],
            requester=data["requester"],
            justification=data.get("justification", ""),
            state=RequestState(data["state"]),
            created_at=data["created_at"],
            note=data.get("note", ""),
            ip_ranges=tuple(data.get("ip_ranges", [])),
            decided_by=data.get("decided_by"),
            decided_at=data.get("decided_at"),
        )


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    timestamp: str
    actor: str
    action: str
    dataset_id: str
    verdict: str
    detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "dataset_id": self.dataset_id,
            "verdict": self.verdict,
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AuditEvent":
        return cls(**data)


@dataclass(frozen=True)
class SessionToken:
    token: str
    user_id: str
    factor_types: frozenset[str]
    issued_at: str

    @property
    def factors_satisfied(self) -> int:
        return len(self.factor_types)


# fetch_data result types


@dataclass(frozen=True)
class PlainDownload:
    data: bytes


@dataclass(frozen=True)
class EncryptedDownload:
    package: DownloadPackage


@dataclass(frozen=True)
class ViewPage:
    fragment: ViewFragment
    bytes_remaining: int


# --------------------------------------------------------------------------
# password and factor helpers

_PW_N = 2**14
_PW_R = 8
_PW_P = 1


def _hash_password(password: str) -> dict[str, str]:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=_PW_N, r=_PW_R, p=_PW_P,
        dklen=32, maxmem=64 * 1024 * 1024,
    )
    return {"salt": salt.hex(), "hash": digest.hex(), "n": str(_PW_N), "r": str(_PW_R), "p": str(_PW_P)}


def _verify_password(password: str, record: dict[str, str]) -> bool:
    digest = hashlib.scrypt(
        password.encode("utf-8"),
        salt=bytes.fromhex(record["salt"]),
        n=int(record["n"]),
        r=int(record["r"]),
        p=int(record["p"]),
        dklen=32,
        maxmem=64 * 1024 * 1024,
    )
    return hmac.compare_digest(digest.hex(), record["hash"])


def otp_code(otp_secret: str, token: str) -> str:
    """The one-time proof a client presents to satisfy its second factor."""
    return hmac.new(otp_secret.encode("utf-8"), token.encode("utf-8"), "sha256").hexdigest()[:8]


def _ip_allowed(source_ip: str, ranges: tuple[str, ...]) -> bool:
    if not source_ip:
        return False
    for entry in ranges:
        if entry == source_ip:
            return True
        try:
            network = ipaddress.ip_network(entry, strict=False)
            if ipaddress.ip_address(source_ip) in network:
                return True
        except ValueError:
            continue
    return False


# --------------------------------------------------------------------------
# repository


class Repository:
    def __init__(
        self,
        data_dir: str | Path,
        repo_keystore: Keystore,
        escrow_keystore: Keystore,
        tree: TreeDefinition | None = None,
        matrix: dict[TagId, HandlingPolicy] | None = None,
        *,
        view_lines_per_page: int = 40,
        view_session_byte_cap: int = 256 * 1024,
    ):
        self.data_dir = Path(data_dir)
        self.store_dir = self.data_dir / "store"
        self.datasets_dir = self.store_dir / "datasets"
        self.payloads_dir = self.store_dir / "payloads"
        for directory in (self.datasets_dir, self.payloads_dir):
            directory.mkdir(parents=True, exist_ok=True)

        for keystore in (repo_keystore, escrow_keystore):
            if isinstance(keystore, DirectoryKeystore):
                if keystore.directory.resolve().is_relative_to(self.store_dir.resolve()):
                    raise ValueError("keystores must live outside the dataset store")

        self._keystores: dict[Custodian, Keystore] = {
            Custodian.REPOSITORY_KEYSTORE: repo_keystore,
            Custodian.TRUSTED_THIRD_PARTY: escrow_keystore,
        }

        self.tree = tree if tree is not None else default_tree()
        report = validate_tree(self.tree)
        if not report.ok:
            raise InvalidTreeError(list(report.problems))
        self.matrix = matrix if matrix is not None else default_matrix()

        self._view_lines_per_page = view_lines_per_page
        self._view_byte_cap = view_session_byte_cap
        self._view_served: dict[tuple[str, str], int] = {}

        self._lock = threading.RLock()
        self._users: dict[str, User] = {}
        self._datasets: dict[str, Dataset] = {}
        self._requests: dict[str, AccessRequest] = {}
        self._tokens: dict[str, SessionToken] = {}
        self._audit: list[AuditEvent] = []

        self._users_path = self.data_dir / "users.json"
        self._requests_path = self.data_dir / "requests.json"
        self._audit_path = self.data_dir / "audit.log"
        self._load()
        self._audit_file = open(self._audit_path, "a", encoding="utf-8")

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "Repository":
        repo_keystore = DirectoryKeystore(config.repo_keystore_dir)
        escrow: Keystore
        if config.escrow_url:
            escrow = HttpEscrowKeystore(config.escrow_url)
        else:
            escrow = DirectoryKeystore(config.escrow_dir)
        tree = load_tree(config.tree_path) if config.tree_path else None
        matrix = load_matrix(config.matrix_path) if config.matrix_path else None
        return cls(
            config.data_dir,
            repo_keystore,
            escrow,
            tree=tree,
            matrix=matrix,
            view_lines_per_page=config.view_lines_per_page,
            view_session_byte_cap=config.view_session_byte_cap,
        )

    def close(self):
        self._audit_file.close()

    def __enter__(self) -> "Repository":
        return self

    def __exit__(self, *exc_info):
        self.close()

    # -- persistence -------------------------------------------------------

    def _load(self):
        if self._users_path.exists():
            data = json.loads(self._users_path.read_text(encoding="utf-8"))
            self._users = {u["username"]: User.from_json(u) for u in data}
        if self._requests_path.exists():
            data = json.loads(self._requests_path.read_text(encoding="utf-8"))
            self._requests = {r["id"]: AccessRequest.from_json(r) for r in data}
        for path in sorted(self.datasets_dir.glob("*.json")):
            record = Dataset.from_json(json.loads(path.read_text(encoding="utf-8")))
            self._datasets[record.id] = record
        if self._audit_path.exists():
            with open(self._audit_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._audit.append(AuditEvent.from_json(json.loads(line)))

    def _save_users(self):
        self._users_path.write_text(
            json.dumps([u.to_json() for u in self._users.values()], indent=2),
            encoding="utf-8",
        )

    def _save_requests(self):
        self._requests_path.write_text(
            json.dumps([r.to_json() for r in self._requests.values()], indent=2),
            encoding="utf-8",
        )

    def _save_dataset(self, dataset: Dataset):
        path = self.datasets_dir / f"{dataset.id}.json"
        path.write_text(json.dumps(dataset.to_json(), indent=2), encoding="utf-8")

    def _append_audit(self, actor: str, action: str, dataset_id: str, verdict: str, detail: str = "") -> AuditEvent:
        with self._lock:
            event = AuditEvent(
                seq=len(self._audit) + 1,
                timestamp=_now(),
                actor=actor,
                action=action,
                dataset_id=dataset_id,
                verdict=verdict,
                detail=detail,
            )
            self._audit.append(event)
            self._audit_file.write(json.dumps(event.to_json()) + "\n")
            self._audit_file.flush()
            return event

    # -- users and sessions -------------------------------------------------

    def register_user(self, username: str, password: str, role: str = "reader") -> tuple[User, str]:
        """Create a user; returns the record and the one-time-shown OTP secret."""
        username = username.strip()
        if not username:
            raise ServiceError("username must not be empty")
        if len(password) < 8:
            raise ServiceError("account password must be at least 8 characters")
        if role not in ("reader", "depositor", "admin"):
            raise ServiceError(f"unknown role {role!r}")
        with self._lock:
            if username in self._users:
                raise UsernameTakenError(username)
            user = User(
                id=f"u-{uuid.uuid4().hex[:12]}",
                username=username,
                password_record=_hash_password(password),
                role=role,
                otp_secret=secrets.token_hex(16),
                created_at=_now(),
            )
            self._users[username] = user
            self._save_users()
        self._append_audit(user.id, "user-registered", "", "ok", f"role={role}")
        return user, user.otp_secret

    def authenticate(self, username: str, password: str) -> SessionToken:
        user = self._users.get(username)
        if user is None or not _verify_password(password, user.password_record):
            raise AuthRequiredError("invalid credentials")
        token = SessionToken(
            token=secrets.token_urlsafe(24),
            user_id=user.id,
            factor_types=frozenset({"password"}),
            issued_at=_now(),
        )
        with self._lock:
            self._tokens[token.token] = token
        self._append_audit(user.id, "auth", "", "ok", "factor=password")
        return token

    def satisfy_factor(self, token: str, factor_type: str, proof: str) -> SessionToken:
        """Escalate a session by proving possession of an enrolled second factor."""
        record = self._tokens.get(token)
        if record is None:
            raise AuthRequiredError("unknown session token")
        if factor_type != "otp":
            raise ServiceError(f"unsupported factor type {factor_type!r}")
        user = self._user_by_id(record.user_id)
        expected = otp_code(user.otp_secret, token)
        if not hmac.compare_digest(expected, proof):
            raise AuthRequiredError("factor proof rejected")
        updated = replace(record, factor_types=record.factor_types | {factor_type})
        with self._lock:
            self._tokens[token] = updated
        self._append_audit(user.id, "auth-factor", "", "ok", f"factor={factor_type}")
        return updated

    def _user_by_id(self, user_id: str) -> User:
        for user in self._users.values():
            if user.id == user_id:
                return user
        raise NotFoundError(f"no user {user_id!r}")

    def _session(self, token: str | None) -> SessionToken | None:
        if not token:
            return None
        return self._tokens.get(token)

    def _require_session(self, token: str | None) -> SessionToken:
        session = self._session(token)
        if session is None:
            raise AuthRequiredError("a valid session token is required")
        return session

    # -- context building ----------------------------------------------------

    def build_context(self, token: str | None, dataset_id: str, source_ip: str = "") -> RequesterContext:
        session = self._session(token)
        if session is None:
            return RequesterContext()
        user = self._user_by_id(session.user_id)
        approval = self._approval_for(user.id, dataset_id)
        return RequesterContext(
            user_id=user.id,
            factors_satisfied=session.factors_satisfied,
            role=Role(user.role),
            depositor_approved=approval is not None,
            source_ip_allowed=approval is not None and _ip_allowed(source_ip, approval.ip_ranges),
        )

    def _approval_for(self, user_id: str, dataset_id: str) -> AccessRequest | None:
        for request in self._requests.values():
            if (
                request.requester == user_id
                and request.dataset_id == dataset_id
                and request.state is RequestState.APPROVED
            ):
                return request
        return None

    # -- deposit -------------------------------------------------------------

    def deposit(
        self,
        token: str,
        metadata: dict[str, Any],
        payload: bytes,
        answers: AnswerSet | dict[str, bool] | None = None,
        *,
        tag_override: str | None = None,
        justification: str = "",
        supersedes: str | None = None,
    ) -> Dataset:
        """Classify, encrypt per policy and persist a new dataset.

        An unclassifiable outcome is recorded as a quarantined dataset with
        open metadata and no payload in the vault; everything else is stored
        under the tag's storage policy with key shares handed to the
        custodians the policy names.
        """
        session = self._require_session(token)
        if session.factors_satisfied < 2:
            raise AuthRequiredError("deposit requires two distinct authentication factors")
        user = self._user_by_id(session.user_id)

        if tag_override is not None:
            if not justification.strip():
                raise MissingJustificationError("a tag override needs a justification")
            tag = TagId.parse(tag_override)
            classification: dict[str, Any] = {
                "mode": "override",
                "tree_version": self.tree.version,
                "justification": justification,
            }
            note = ""
        elif answers is not None:
            try:
                result = classify_detailed(self.tree, answers)
            except MissingAnswerError as exc:
                raise ClassificationIncompleteError(str(exc)) from None
            tag = result.tag
            note = result.note
            classification = {
                "mode": "interview",
                "tree_version": result.tree_version,
                "path": [
                    {"question": qid, "answer": "yes" if value else "no"}
                    for qid, value in result.path
                ],
                "note": note,
            }
        else:
            raise ClassificationIncompleteError("provide interview answers or a tag override")

        dataset_id = f"ds-{uuid.uuid4().hex[:12]}"
        created_at = _now()
        descriptive = dict(metadata or {})

        if tag is TagId.NOTAG:
            dataset = Dataset(
                id=dataset_id,
                descriptive=descriptive,
                tag=tag,
                status=DatasetStatus.QUARANTINED_NOTAG,
                depositor=user.id,
                created_at=created_at,
                classification=classification,
                payload=None,
                supersedes=supersedes,
            )
            with self._lock:
                self._datasets[dataset_id] = dataset
                self._save_dataset(dataset)
            self._append_audit(
                user.id, "deposit-quarantined", dataset_id, "quarantined",
                "payload rejected pending DPO review",
            )
            return dataset

        policy = self.matrix[tag]
        sealed = encrypt_dataset(payload, tag, policy, dataset_id=dataset_id)
        if isinstance(sealed, PlainStoredObject):
            stored_bytes = sealed.payload
            payload_ref = PayloadRef(
                content_address=hashlib.sha256(stored_bytes).hexdigest(),
                size=len(payload),
                encrypted=False,
            )
        else:
            obj, inner_share, outer_share = sealed
            stored_bytes = obj.to_bytes()
            self._keystores[inner_share.custodian].put(inner_share)
            self._keystores[outer_share.custodian].put(outer_share)
            payload_ref = PayloadRef(
                content_address=hashlib.sha256(stored_bytes).hexdigest(),
                size=len(payload),
                encrypted=True,
                algorithm_id=obj.algorithm_id,
            )

        dataset = Dataset(
            id=dataset_id,
            descriptive=descriptive,
            tag=tag,
            status=DatasetStatus.ACTIVE,
            depositor=user.id,
            created_at=created_at,
            classification=classification,
            payload=payload_ref,
            supersedes=supersedes,
        )
        with self._lock:
            (self.payloads_dir / payload_ref.content_address).write_bytes(stored_bytes)
            self._datasets[dataset_id] = dataset
            self._save_dataset(dataset)
        self._append_audit(user.id, "deposit", dataset_id, "ok", f"tag={tag.value}")
        return dataset

    # -- access requests ------------------------------------------------------

    def request_access(self, token: str, dataset_id: str, justification: str) -> AccessRequest:
        session = self._require_session(token)
        user = self._user_by_id(session.user_id)
        dataset = self._dataset(dataset_id)
        if dataset.status is not DatasetStatus.ACTIVE:
            raise QuarantinedDatasetError("dataset is quarantined pending DPO review")
        policy = self.matrix[dataset.tag]
        if not policy.auth.depositor_approval_required:
            raise NotRequiredError(
                f"{dataset.tag.value} datasets need no depositor approval"
            )
        with self._lock:
            for existing in self._requests.values():
                if (
                    existing.requester == user.id
                    and existing.dataset_id == dataset_id
                    and existing.state is RequestState.PENDING
                ):
                    raise AlreadyPendingError(existing.id)
            request = AccessRequest(
                id=f"req-{uuid.uuid4().hex[:12]}",
                dataset_id=dataset_id,
                requester=user.id,
                justification=justification,
                state=RequestState.PENDING,
                created_at=_now(),
            )
            self._requests[request.id] = request
            self._save_requests()
        self._append_audit(user.id, "access-request", dataset_id, "pending", request.id)
        return request

    def decide_request(
        self,
        token: str,
        request_id: str,
        decision: str,
        note: str = "",
        ip_ranges: list[str] | tuple[str, ...] = (),
    ) -> AccessRequest:
        """Approve or deny a pending request; decisions are immutable.

        Approvals for the two consent-scoped tags must carry a note stating
        the criterion the depositor checked; approvals may grant source-IP
        ranges used by the IP-validation gate.
        """
        session = self._require_session(token)
        user = self._user_by_id(session.user_id)
        request = self._requests.get(request_id)
        if request is None:
            raise NotFoundError(f"no access request {request_id!r}")
        dataset = self._dataset(request.dataset_id)
        if user.id != dataset.depositor and user.role != "admin":
            raise NotDepositorError("only the dataset's depositor or an admin may decide")
        if request.state is not RequestState.PENDING:
            raise AlreadyDecidedError(f"request already {request.state.value}")
        if decision not in ("approve", "deny"):
            raise ServiceError(f"decision must be approve or deny, got {decision!r}")
        if (
            decision == "approve"
            and dataset.tag in (TagId.ORANGE, TagId.PURPLE)
            and not note.strip()
        ):
            raise MissingCriterionNoteError(dataset.tag)

        updated = replace(
            request,
            state=RequestState.APPROVED if decision == "approve" else RequestState.DENIED,
            note=note,
            ip_ranges=tuple(ip_ranges) if decision == "approve" else (),
            decided_by=user.id,
            decided_at=_now(),
        )
        with self._lock:
            self._requests[request_id] = updated
            self._save_requests()
        self._append_audit(
            user.id, "request-decision", dataset.id, updated.state.value, request_id
        )
        return updated

    def pending_requests_for_depositor(self, token: str) -> list[AccessRequest]:
        session = self._require_session(token)
        user = self._user_by_id(session.user_id)
        out = []
        for request in self._requests.values():
            if request.state is not RequestState.PENDING:
                continue
            dataset = self._datasets.get(request.dataset_id)
            if dataset and (dataset.depositor == user.id or user.role == "admin"):
                out.append(request)
        return sorted(out, key=lambda r: r.created_at)

    # -- metadata and data access ----------------------------------------------

    def _dataset(self, dataset_id: str) -> Dataset:
        dataset = self._datasets.get(dataset_id)
        if dataset is None:
            raise NotFoundError(f"no dataset {dataset_id!r}")
        return dataset

    def fetch_metadata(self, dataset_id: str) -> dict[str, Any]:
        """The open record: available to anyone, for every dataset state."""
        dataset = self._dataset(dataset_id)
        record = dataset.to_json()
        tag = tag_metadata(dataset.tag)
        record["tag_label"] = tag.label
        record["legal_bases"] = [b.to_json() for b in tag.legal_bases]
        if dataset.status is DatasetStatus.ACTIVE and dataset.tag is not TagId.NOTAG:
            record["consequences"] = self.matrix[dataset.tag].summary()
        else:
            record["payload"] = None
            record["consequences"] = None
        return record

    def _load_plaintext(self, dataset: Dataset) -> bytes:
        assert dataset.payload is not None
        blob = (self.payloads_dir / dataset.payload.content_address).read_bytes()
        if not dataset.payload.encrypted:
            return blob
        obj = EncryptedObject.from_bytes(blob)
        policy = self.matrix[dataset.tag]
        inner_custodian, outer_custodian = custodians_for(policy.keys)
        inner_share = self._keystores[inner_custodian].get(dataset.id, ShareRole.INNER)
        outer_share = self._keystores[outer_custodian].get(dataset.id, ShareRole.OUTER)
        return decrypt_dataset(obj, inner_share, outer_share)

    def fetch_data(
        self,
        token: str | None,
        dataset_id: str,
        mode: str,
        *,
        password: str | None = None,
        page: int = 0,
        source_ip: str = "",
    ) -> PlainDownload | EncryptedDownload | ViewPage:
        """Gatekeep and serve a dataset's payload; every call is audited once."""
        session = self._session(token)
        actor = session.user_id if session else f"anon@{source_ip or 'unknown'}"
        verdict = "error"
        detail = f"mode={mode}"
        try:
            if mode not in ("view", "download"):
                raise ServiceError(f"mode must be view or download, got {mode!r}")
            dataset = self._dataset(dataset_id)
            if dataset.status is not DatasetStatus.ACTIVE:
                raise QuarantinedDatasetError("dataset is quarantined pending DPO review")

            ctx = self.build_context(token, dataset_id, source_ip)
            policy = self.matrix[dataset.tag]
            kind = RequestKind.VIEW if mode == "view" else RequestKind.DOWNLOAD
            decision = decide_access(dataset.tag, policy, ctx, kind)
            verdict = decision.verdict.value
            if decision.reason:
                detail = f"mode={mode} reason={decision.reason}"

            if decision.verdict is Verdict.DENY:
                raise AccessDeniedError(decision.reason)

            if decision.verdict is Verdict.DOWNLOAD_PLAIN:
                return PlainDownload(data=self._load_plaintext(dataset))

            if decision.verdict is Verdict.DOWNLOAD_ENCRYPTED_PACKAGE:
                if password is None:
                    raise PasswordRequiredError(
                        "downloads of protected data are delivered encrypted; "
                        "supply a package password of at least 12 characters"
                    )
                plaintext = self._load_plaintext(dataset)
                try:
                    package = package_download(plaintext, password, dataset_id=dataset_id)
                except WeakPassword as exc:
                    raise WeakPasswordError(str(exc)) from None
                return EncryptedDownload(package=package)

            # view-only
            plaintext = self._load_plaintext(dataset)
            viewer = session.user_id if session else f"anon@{source_ip or 'unknown'}"
            budget_key = (viewer, dataset_id)
            fragment = render_view(plaintext, page, lines_per_page=self._view_lines_per_page)
            cost = len(fragment.content.encode("utf-8"))
            with self._lock:
                served = self._view_served.get(budget_key, 0)
                if served + cost > self._view_byte_cap:
                    raise ViewBudgetExceeded(self._view_byte_cap)
                self._view_served[budget_key] = served + cost
            return ViewPage(
                fragment=fragment,
                bytes_remaining=self._view_byte_cap - self._view_served[budget_key],
            )
        except ServiceError as exc:
            if verdict == "error":
                verdict = f"error:{exc.code}"
            else:
                detail = f"{detail} error={exc.code}"
            raise
        except Exception as exc:
            detail = f"{detail} error={type(exc).__name__}"
            raise
        finally:
            self._append_audit(actor, "fetch-data", dataset_id, verdict, detail)

    # -- audit -----------------------------------------------------------------

    def audit_log(
        self,
        token: str,
        *,
        dataset_id: str | None = None,
        actor: str | None = None,
        action: str | None = None,
    ) -> list[AuditEvent]:
        session = self._require_session(token)
        user = self._user_by_id(session.user_id)
        if user.role != "admin":
            raise ForbiddenError("audit log access is admin-only")
        events = self._audit
        if dataset_id is not None:
            events = [e for e in events if e.dataset_id == dataset_id]
        if actor is not None:
            events = [e for e in events if e.actor == actor]
        if action is not None:
            events = [e for e in events if e.action == action]
        return sorted(events, key=lambda e: e.seq)

    @property
    def audit_events(self) -> tuple[AuditEvent, ...]:
        return tuple(self._audit)

    def datasets(self) -> list[Dataset]:
        return sorted(self._datasets.values(), key=lambda d: d.created_at)
