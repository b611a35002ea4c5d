"""Safeguard enforcement: access decisions, the double-encryption vault, view rendering."""

from .access import (
    AccessDecision,
    PolicyMismatchError,
    RequestKind,
    RequesterContext,
    Role,
    UnknownTagError,
    Verdict,
    decide_access,
)
from .vault import (
    AuthFailure,
    ContainerFormatError,
    Custodian,
    DownloadPackage,
    EncryptedObject,
    EntropyFailure,
    KeyShare,
    PlainStoredObject,
    ShareMismatch,
    ShareRole,
    WeakPassword,
    WrongPassword,
    decrypt_dataset,
    encrypt_dataset,
    open_package,
    package_download,
    parse_package_header,
)
from .view import (
    PageOutOfRange,
    ViewBudgetExceeded,
    ViewFragment,
    ViewSession,
    render_view,
)

__all__ = [
    "AccessDecision",
    "AuthFailure",
    "ContainerFormatError",
    "Custodian",
    "DownloadPackage",
    "EncryptedObject",
    "EntropyFailure",
    "KeyShare",
    "PageOutOfRange",
    "PlainStoredObject",
    "PolicyMismatchError",
    "RequestKind",
    "RequesterContext",
    "Role",
    "ShareMismatch",
    "ShareRole",
    "UnknownTagError",
    "Verdict",
    "ViewBudgetExceeded",
    "ViewFragment",
    "ViewSession",
    "WeakPassword",
    "WrongPassword",
    "decide_access",
    "decrypt_dataset",
    "encrypt_dataset",
    "open_package",
    "package_download",
    "parse_package_header",
    "render_view",
]
