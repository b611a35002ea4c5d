"""Reference repository service: deposits, approvals, audited access, HTTP API."""

from .config import ServiceConfig, load_config
from .keystores import DirectoryKeystore, HttpEscrowKeystore, Keystore
from .repository import (
    AccessDeniedError,
    AccessRequest,
    AlreadyDecidedError,
    AlreadyPendingError,
    AuditEvent,
    AuthRequiredError,
    ClassificationIncompleteError,
    Dataset,
    DatasetStatus,
    ForbiddenError,
    MissingCriterionNoteError,
    NotDepositorError,
    NotFoundError,
    NotRequiredError,
    PasswordRequiredError,
    QuarantinedDatasetError,
    Repository,
    RequestState,
    ServiceError,
)

__all__ = [
    "AccessDeniedError",
    "AccessRequest",
    "AlreadyDecidedError",
    "AlreadyPendingError",
    "AuditEvent",
    "AuthRequiredError",
    "ClassificationIncompleteError",
    "Dataset",
    "DatasetStatus",
    "DirectoryKeystore",
    "ForbiddenError",
    "HttpEscrowKeystore",
    "Keystore",
    "MissingCriterionNoteError",
    "NotDepositorError",
    "NotFoundError",
    "NotRequiredError",
    "PasswordRequiredError",
    "QuarantinedDatasetError",
    "Repository",
    "RequestState",
    "ServiceConfig",
    "ServiceError",
    "load_config",
]
