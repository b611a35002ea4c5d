"""Per-tag safeguard requirements across four areas, with escalation checking.

Each classifiable tag maps to one HandlingPolicy row covering identification
and authentication, read/download permissions, storage and transmission, and
encryption-key custody. The shipped default lives in
``data/default_matrix.json``; institutions may load a replacement that
tightens rows but a matrix that loosens any cell below the shipped default
fails validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping

from .taxonomy import CLASSIFIABLE_TAGS, TagId

_DEFAULT_MATRIX_RESOURCE = "default_matrix.json"


class AccessControl(str, Enum):
    PASSWORD = "password"
    CERTIFICATE = "certificate"
    SECOND_FACTOR = "second-factor"


class AccessRight(str, Enum):
    PUBLIC_PLAIN_DOWNLOAD = "public-plain-download"
    REGISTERED_ENCRYPTED_DOWNLOAD = "registered-encrypted-download"
    APPROVED_ENCRYPTED_DOWNLOAD = "approved-encrypted-download"
    VIEW_ONLY_NO_DOWNLOAD = "view-only-no-download"


class AtRest(str, Enum):
    PLAIN = "plain"
    DOUBLE_ENCRYPTED = "double-encrypted"


class InTransit(str, Enum):
    PLAIN = "plain"
    SECURE_CHANNEL = "secure-channel"
    DOUBLE_ENCRYPTED = "double-encrypted"


class KeyScheme(str, Enum):
    NO_KEYS = "no-keys"
    SEPARATE_FROM_REPOSITORY_DATA = "separate-from-repository-data"
    SEPARATE_FROM_REPOSITORY_AND_DEPOSITOR = "separate-from-repository-and-depositor"
    SPLIT_REPO_PLUS_TRUSTED_THIRD_PARTY = "split-repo-plus-trusted-third-party"


@dataclass(frozen=True)
class AuthRequirement:
    registration_required: bool = False
    access_controls: frozenset[AccessControl] = field(default_factory=frozenset)
    role_differentiation: bool = False
    depositor_approval_required: bool = False
    ip_validation: bool = False

    def rank(self) -> int:
        """Escalation rank: none=0, registered=1, +approval=2, +ip=3."""
        if self.ip_validation:
            return 3
        if self.depositor_approval_required:
            return 2
        if self.registration_required:
            return 1
        return 0


#: Restriction rank per access mode: plain=0 .. view-only=3.
ACCESS_RANK = {
    AccessRight.PUBLIC_PLAIN_DOWNLOAD: 0,
    AccessRight.REGISTERED_ENCRYPTED_DOWNLOAD: 1,
    AccessRight.APPROVED_ENCRYPTED_DOWNLOAD: 2,
    AccessRight.VIEW_ONLY_NO_DOWNLOAD: 3,
}

AT_REST_RANK = {AtRest.PLAIN: 0, AtRest.DOUBLE_ENCRYPTED: 1}

KEY_RANK = {
    KeyScheme.NO_KEYS: 0,
    KeyScheme.SEPARATE_FROM_REPOSITORY_DATA: 1,
    KeyScheme.SEPARATE_FROM_REPOSITORY_AND_DEPOSITOR: 2,
    KeyScheme.SPLIT_REPO_PLUS_TRUSTED_THIRD_PARTY: 3,
}


@dataclass(frozen=True)
class StoragePolicy:
    at_rest: AtRest
    in_transit: InTransit


@dataclass(frozen=True)
class HandlingPolicy:
    tag: TagId
    auth: AuthRequirement
    access: AccessRight
    storage: StoragePolicy
    keys: KeyScheme
    approval_criteria_note: str = ""

    def summary(self) -> dict[str, str]:
        """Human-readable four-area row for CLI and UI rendering."""
        return {
            "identification_and_authentication": _auth_text(self.auth),
            "read_and_download_permissions": _access_text(self.access),
            "storage_and_transmission": _storage_text(self.storage),
            "key_storage": _keys_text(self.keys),
        }

    def to_json(self) -> dict[str, Any]:
        return {
            "tag": self.tag.value,
            "auth": {
                "registration_required": self.auth.registration_required,
                "access_controls": sorted(c.value for c in self.auth.access_controls),
                "role_differentiation": self.auth.role_differentiation,
                "depositor_approval_required": self.auth.depositor_approval_required,
                "ip_validation": self.auth.ip_validation,
            },
            "access": self.access.value,
            "storage": {
                "at_rest": self.storage.at_rest.value,
                "in_transit": self.storage.in_transit.value,
            },
            "keys": self.keys.value,
            "approval_criteria_note": self.approval_criteria_note,
            "summary": self.summary(),
        }


def _auth_text(auth: AuthRequirement) -> str:
    if auth.rank() == 0:
        return "Not necessary; public access."
    parts = ["Registration to the repository is required."]
    if auth.access_controls:
        names = {
            AccessControl.PASSWORD: "username and password",
            AccessControl.CERTIFICATE: "certificate",
            AccessControl.SECOND_FACTOR: "second factor authentication",
        }
        listed = ", ".join(names[c] for c in AccessControl if c in auth.access_controls)
        parts.append(f"Access controls: {listed}.")
    if auth.role_differentiation:
        parts.append("Assigned roles with privilege differentiation.")
    if auth.depositor_approval_required:
        parts.append("Approval by the data depositor is required.")
    if auth.ip_validation:
        parts.append("Validation according to source IP.")
    return " ".join(parts)


def _access_text(access: AccessRight) -> str:
    return {
        AccessRight.PUBLIC_PLAIN_DOWNLOAD: "Public access without authentication; plain download.",
        AccessRight.REGISTERED_ENCRYPTED_DOWNLOAD: (
            "Access by registered users; downloads delivered encrypted with a password."
        ),
        AccessRight.APPROVED_ENCRYPTED_DOWNLOAD: (
            "Registered users can access the data after authorisation of the "
            "depositor; downloads delivered encrypted with a password."
        ),
        AccessRight.VIEW_ONLY_NO_DOWNLOAD: (
            "Access to protected data without permission to download; downloads disabled."
        ),
    }[access]


def _storage_text(storage: StoragePolicy) -> str:
    at_rest = {
        AtRest.PLAIN: "unencrypted",
        AtRest.DOUBLE_ENCRYPTED: "double encryption",
    }[storage.at_rest]
    in_transit = {
        InTransit.PLAIN: "unencrypted",
        InTransit.SECURE_CHANNEL: "secure channel",
        InTransit.DOUBLE_ENCRYPTED: "double encryption",
    }[storage.in_transit]
    return f"Storage: {at_rest}. Transmission: {in_transit}."


def _keys_text(keys: KeyScheme) -> str:
    return {
        KeyScheme.NO_KEYS: "No encryption keys.",
        KeyScheme.SEPARATE_FROM_REPOSITORY_DATA: (
            "Encryption key stored separately from repository data."
        ),
        KeyScheme.SEPARATE_FROM_REPOSITORY_AND_DEPOSITOR: (
            "Encryption key stored separately from repository and depositor data."
        ),
        KeyScheme.SPLIT_REPO_PLUS_TRUSTED_THIRD_PARTY: (
            "One key stored separately from the data by the repository; the "
            "other key held by a trusted third party."
        ),
    }[keys]


HandlingMatrix = Mapping[TagId, HandlingPolicy]


class MatrixError(Exception):
    """Base class for matrix problems."""


class MatrixSyntaxError(MatrixError):
    pass


class NoPolicyForUnclassified(MatrixError):
    def __init__(self):
        super().__init__(
            "no handling policy exists for an unclassifiable dataset; "
            "it stays quarantined until the DPO assigns a tag"
        )


class MatrixValidationError(MatrixError):
    def __init__(self, report: "MatrixReport"):
        super().__init__("; ".join(str(v) for v in report.violations))
        self.report = report


@dataclass(frozen=True)
class MatrixViolation:
    kind: str  # incomplete-matrix | order-violation | row-invariant | below-floor
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class MatrixReport:
    ok: bool
    violations: tuple[MatrixViolation, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "violations": [{"kind": v.kind, "detail": v.detail} for v in self.violations],
        }


def _dimension_ranks(policy: HandlingPolicy) -> dict[str, int]:
    return {
        "auth": policy.auth.rank(),
        "access": ACCESS_RANK[policy.access],
        "storage-at-rest": AT_REST_RANK[policy.storage.at_rest],
        "keys": KEY_RANK[policy.keys],
    }


def _row_invariants(policy: HandlingPolicy) -> list[MatrixViolation]:
    violations = []
    tag = policy.tag.value
    if policy.auth.depositor_approval_required and not policy.auth.registration_required:
        violations.append(
            MatrixViolation(
                "row-invariant", f"{tag}: depositor approval requires registration"
            )
        )
    if policy.auth.ip_validation and not policy.auth.depositor_approval_required:
        violations.append(
            MatrixViolation(
                "row-invariant", f"{tag}: ip validation requires depositor approval"
            )
        )
    if policy.tag is not TagId.BLUE:
        if policy.storage.at_rest is not AtRest.DOUBLE_ENCRYPTED:
            violations.append(
                MatrixViolation(
                    "row-invariant",
                    f"{tag}: every tag except blue stores double-encrypted",
                )
            )
        if policy.storage.in_transit is InTransit.PLAIN:
            violations.append(
                MatrixViolation(
                    "row-invariant",
                    f"{tag}: transmission must use a secure channel for every tag except blue",
                )
            )
        if policy.access is AccessRight.PUBLIC_PLAIN_DOWNLOAD:
            violations.append(
                MatrixViolation(
                    "row-invariant", f"{tag}: plain public download is reserved for blue"
                )
            )
    return violations


def check_monotonicity(matrix: HandlingMatrix) -> MatrixReport:
    """Verify the matrix escalates with strictness and respects the row rules.

    For every ordered tag pair t1 <= t2 each safeguard dimension of t1 must
    be no stricter than t2's; orange and purple (equal strictness) must match
    on every machine-enforced dimension. Returns the violations instead of
    raising.
    """
    violations: list[MatrixViolation] = []

    missing = [t.value for t in CLASSIFIABLE_TAGS if t not in matrix]
    if missing:
        violations.append(
            MatrixViolation("incomplete-matrix", f"missing tags: {', '.join(missing)}")
        )
        return MatrixReport(ok=False, violations=tuple(violations))

    for tag in CLASSIFIABLE_TAGS:
        if matrix[tag].tag is not tag:
            violations.append(
                MatrixViolation(
                    "row-invariant",
                    f"row keyed {tag.value} carries tag {matrix[tag].tag.value}",
                )
            )
        violations.extend(_row_invariants(matrix[tag]))

    from .taxonomy import tag_metadata  # local import to keep module load light

    ranked = sorted(CLASSIFIABLE_TAGS, key=lambda t: tag_metadata(t).strictness)
    for i, lower in enumerate(ranked):
        for higher in ranked[i + 1 :]:
            lo_strict = tag_metadata(lower).strictness
            hi_strict = tag_metadata(higher).strictness
            lo = _dimension_ranks(matrix[lower])
            hi = _dimension_ranks(matrix[higher])
            for dimension in lo:
                if lo[dimension] > hi[dimension]:
                    violations.append(
                        MatrixViolation(
                            "order-violation",
                            f"{lower.value} is stricter than {higher.value} on "
                            f"{dimension} ({lo[dimension]} > {hi[dimension]})",
                        )
                    )
                elif lo_strict == hi_strict and lo[dimension] != hi[dimension]:
                    violations.append(
                        MatrixViolation(
                            "order-violation",
                            f"{lower.value} and {higher.value} share a strictness rank "
                            f"but differ on {dimension}",
                        )
                    )

    return MatrixReport(ok=not violations, violations=tuple(violations))


def check_floor(matrix: HandlingMatrix, floor: HandlingMatrix) -> MatrixReport:
    """Flag any cell looser than the floor matrix (tightening is fine)."""
    violations: list[MatrixViolation] = []
    for tag in CLASSIFIABLE_TAGS:
        if tag not in matrix or tag not in floor:
            continue
        have = _dimension_ranks(matrix[tag])
        need = _dimension_ranks(floor[tag])
        for dimension in need:
            if have[dimension] < need[dimension]:
                violations.append(
                    MatrixViolation(
                        "below-floor",
                        f"{tag.value}: {dimension} loosened below the shipped default",
                    )
                )
    return MatrixReport(ok=not violations, violations=tuple(violations))


def policy_for_tag(tag: TagId | str, matrix: HandlingMatrix | None = None) -> HandlingPolicy:
    """The matrix row for a classifiable tag; refuses the unclassifiable outcome."""
    if not isinstance(tag, TagId):
        tag = TagId.parse(tag)
    if tag is TagId.NOTAG:
        raise NoPolicyForUnclassified()
    if matrix is None:
        matrix = default_matrix()
    return matrix[tag]


def _policy_from_json(tag: TagId, data: Mapping[str, Any]) -> HandlingPolicy:
    try:
        auth_raw = data["auth"]
        storage_raw = data["storage"]
        return HandlingPolicy(
            tag=tag,
            auth=AuthRequirement(
                registration_required=bool(auth_raw["registration_required"]),
                access_controls=frozenset(
                    AccessControl(c) for c in auth_raw.get("access_controls", [])
                ),
                role_differentiation=bool(auth_raw.get("role_differentiation", False)),
                depositor_approval_required=bool(auth_raw["depositor_approval_required"]),
                ip_validation=bool(auth_raw["ip_validation"]),
            ),
            access=AccessRight(data["access"]),
            storage=StoragePolicy(
                at_rest=AtRest(storage_raw["at_rest"]),
                in_transit=InTransit(storage_raw["in_transit"]),
            ),
            keys=KeyScheme(data["keys"]),
            approval_criteria_note=str(data.get("approval_criteria_note") or ""),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise MatrixSyntaxError(f"bad policy row for {tag.value!r}: {exc}") from None


def parse_matrix(document: str) -> dict[TagId, HandlingPolicy]:
    """Parse a matrix document into rows; no escalation checks yet."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MatrixSyntaxError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(data, dict) or not isinstance(data.get("tags"), dict):
        raise MatrixSyntaxError("matrix document needs a 'tags' object")
    matrix: dict[TagId, HandlingPolicy] = {}
    for key, row in data["tags"].items():
        tag = TagId.parse(key)
        if tag is TagId.NOTAG:
            raise MatrixSyntaxError("the unclassifiable outcome cannot carry a policy row")
        matrix[tag] = _policy_from_json(tag, row)
    return matrix


def load_matrix(path, *, enforce_floor: bool = True) -> dict[TagId, HandlingPolicy]:
    """Load a matrix file and validate it (escalation + never below default)."""
    with open(path, encoding="utf-8") as fh:
        matrix = parse_matrix(fh.read())
    report = check_monotonicity(matrix)
    if not report.ok:
        raise MatrixValidationError(report)
    if enforce_floor:
        floor_report = check_floor(matrix, default_matrix())
        if not floor_report.ok:
            raise MatrixValidationError(floor_report)
    return matrix


@lru_cache(maxsize=1)
def _default_matrix_cached() -> tuple[tuple[TagId, HandlingPolicy], ...]:
    document = (
        resources.files("datatags").joinpath("data", _DEFAULT_MATRIX_RESOURCE).read_text("utf-8")
    )
    return tuple(parse_matrix(document).items())


def default_matrix() -> dict[TagId, HandlingPolicy]:
    """The shipped safeguard matrix, one row per classifiable tag."""
    return dict(_default_matrix_cached())
