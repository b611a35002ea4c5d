"""Pure access-decision function: who may do what with a tagged dataset.

decide_access is side-effect free and reentrant; the service layer builds a
RequesterContext from session state and feeds the verdict back as HTTP
semantics. Gates derive from the tag's HandlingPolicy row, so a tightened
matrix tightens decisions with no code change here.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..policy_matrix import AccessRight, HandlingPolicy
from ..taxonomy import TagId


class Role(str, Enum):
    READER = "reader"
    DEPOSITOR = "depositor"
    ADMIN = "admin"


class RequestKind(str, Enum):
    METADATA = "metadata"
    VIEW = "view"
    DOWNLOAD = "download"


class Verdict(str, Enum):
    DENY = "deny"
    METADATA_ONLY = "metadata-only"
    VIEW_ONLY = "view-only"
    DOWNLOAD_ENCRYPTED_PACKAGE = "download-encrypted-package"
    DOWNLOAD_PLAIN = "download-plain"


#: How much a verdict lets the requester see; used by the monotonicity checks.
PERMISSIVENESS = {
    Verdict.DENY: 0,
    Verdict.METADATA_ONLY: 1,
    Verdict.VIEW_ONLY: 2,
    Verdict.DOWNLOAD_ENCRYPTED_PACKAGE: 3,
    Verdict.DOWNLOAD_PLAIN: 4,
}

REASON_REGISTRATION = "registration required"
REASON_FACTORS = "two distinct authentication factors required"
REASON_APPROVAL = "depositor approval required"
REASON_IP = "ip validation failed"
REASON_DOWNLOADS_DISABLED = "downloads disabled"


class UnknownTagError(Exception):
    def __init__(self):
        super().__init__("enforcement refuses unclassified data; assign a tag first")


class PolicyMismatchError(Exception):
    def __init__(self, tag: TagId, policy_tag: TagId):
        super().__init__(
            f"policy row is for {policy_tag.value!r} but the dataset is tagged {tag.value!r}"
        )


@dataclass(frozen=True)
class RequesterContext:
    """Who is asking. user_id None means anonymous."""

    user_id: str | None = None
    factors_satisfied: int = 0
    role: Role = Role.READER
    depositor_approved: bool = False
    source_ip_allowed: bool = False

    def __post_init__(self):
        if self.user_id is None and (self.factors_satisfied or self.depositor_approved):
            raise ValueError("anonymous requesters have no factors and no approvals")
        if self.factors_satisfied < 0:
            raise ValueError("factors_satisfied must be >= 0")

    @property
    def anonymous(self) -> bool:
        return self.user_id is None


@dataclass(frozen=True)
class AccessDecision:
    verdict: Verdict
    reason: str = ""

    @property
    def permissiveness(self) -> int:
        return PERMISSIVENESS[self.verdict]

    def to_json(self) -> dict[str, str]:
        return {"verdict": self.verdict.value, "reason": self.reason}


_DENY_FACTOR_MINIMUM = 2  # distinct factors needed whenever access controls apply


def decide_access(
    tag: TagId | str,
    policy: HandlingPolicy | None,
    ctx: RequesterContext,
    request: RequestKind,
) -> AccessDecision:
    """Decide what a requester may do with a dataset carrying the given tag.

    Metadata is always readable, by anyone, for every classifiable tag.
    Data access walks the policy gates in escalation order (registration,
    authentication factors, depositor approval, source-IP validation) and
    denies naming the first unmet one. Unclassified datasets are refused
    outright.
    """
    if not isinstance(tag, TagId):
        tag = TagId.parse(tag)
    if tag is TagId.NOTAG or policy is None:
        raise UnknownTagError()
    if policy.tag is not tag:
        raise PolicyMismatchError(tag, policy.tag)

    if request is RequestKind.METADATA:
        return AccessDecision(Verdict.METADATA_ONLY)

    auth = policy.auth
    if auth.registration_required and ctx.anonymous:
        return AccessDecision(Verdict.DENY, REASON_REGISTRATION)
    if auth.access_controls and ctx.factors_satisfied < _DENY_FACTOR_MINIMUM:
        return AccessDecision(Verdict.DENY, REASON_FACTORS)
    if auth.depositor_approval_required and not ctx.depositor_approved:
        return AccessDecision(Verdict.DENY, REASON_APPROVAL)
    if auth.ip_validation and not ctx.source_ip_allowed:
        return AccessDecision(Verdict.DENY, REASON_IP)

    if request is RequestKind.VIEW:
        return AccessDecision(Verdict.VIEW_ONLY)

    if policy.access is AccessRight.PUBLIC_PLAIN_DOWNLOAD:
        if tag is not TagId.BLUE:
            raise PolicyMismatchError(tag, policy.tag)
        return AccessDecision(Verdict.DOWNLOAD_PLAIN)
    if policy.access is AccessRight.VIEW_ONLY_NO_DOWNLOAD:
        return AccessDecision(Verdict.DENY, REASON_DOWNLOADS_DISABLED)
    return AccessDecision(Verdict.DOWNLOAD_ENCRYPTED_PACKAGE)
