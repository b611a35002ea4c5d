"""The seven dataset tags, their strictness ordering, and the legal bases behind them.

Everything here is immutable reference data: tag records are built once at
import time and shared freely between threads. The module stores citations
(GDPR / LOPDGDD provisions) as plain data; it does not interpret statutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class TagId(str, Enum):
    """Classification outcome identifiers, lowercase on the wire."""

    BLUE = "blue"
    GREEN = "green"
    YELLOW = "yellow"
    ORANGE = "orange"
    PURPLE = "purple"
    RED = "red"
    NOTAG = "notag"

    @classmethod
    def parse(cls, value: str) -> "TagId":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise UnknownTagId(value) from None


class UnknownTagId(ValueError):
    def __init__(self, value: str):
        super().__init__(f"unknown tag id: {value!r}")
        self.value = value


#: Tags that carry a handling policy; NOTAG is excluded on purpose — an
#: unclassifiable dataset is parked for DPO review, not handled.
CLASSIFIABLE_TAGS = (
    TagId.BLUE,
    TagId.GREEN,
    TagId.YELLOW,
    TagId.ORANGE,
    TagId.PURPLE,
    TagId.RED,
)


class Instrument(str, Enum):
    GDPR = "GDPR"
    LOPDGDD = "LOPDGDD"


class SpecialCategoryKind(str, Enum):
    """Which flavour of Art. 9 GDPR data a tag is concerned with."""

    HEALTH_OR_GENETIC = "health-or-genetic"
    OTHER_SPECIAL_CATEGORY = "other-special-category"
    NONE = "none"


@dataclass(frozen=True)
class LegalBasis:
    """A single provision citation, e.g. (GDPR, "Art. 5.1b")."""

    instrument: Instrument
    provision: str
    note: str = ""

    def to_json(self) -> dict[str, str]:
        return {
            "instrument": self.instrument.value,
            "provision": self.provision,
            "note": self.note,
        }


@dataclass(frozen=True)
class Tag:
    """One classification outcome with its rank and legal metadata.

    ``strictness`` is None for the unclassifiable outcome: it sits outside
    the blue-to-red ordering entirely.
    """

    id: TagId
    label: str
    strictness: int | None
    requires_depositor_review: bool
    description: str
    special_category_kind: SpecialCategoryKind = SpecialCategoryKind.NONE
    legal_bases: tuple[LegalBasis, ...] = field(default_factory=tuple)

    @property
    def classifiable(self) -> bool:
        return self.strictness is not None

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id.value,
            "label": self.label,
            "strictness": self.strictness,
            "requires_depositor_review": self.requires_depositor_review,
            "description": self.description,
            "special_category_kind": self.special_category_kind.value,
            "legal_bases": [b.to_json() for b in self.legal_bases],
        }


class Ordering(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


_TAGS: dict[TagId, Tag] = {
    TagId.BLUE: Tag(
        id=TagId.BLUE,
        label="Blue",
        strictness=0,
        requires_depositor_review=False,
        description="No personal data. The dataset can be published openly.",
    ),
    TagId.GREEN: Tag(
        id=TagId.GREEN,
        label="Green",
        strictness=1,
        requires_depositor_review=False,
        description=(
            "Personal data whose publication record states either that the "
            "participants were informed the data would be made available to "
            "other researchers, or that consent covers re-use in an indicated "
            "research area."
        ),
        legal_bases=(
            LegalBasis(
                Instrument.GDPR,
                "Recital 33",
                "Consent may cover re-use within an indicated research area; "
                "the publication must state which condition applies: informed "
                "participants or area-scoped consent.",
            ),
        ),
    ),
    TagId.YELLOW: Tag(
        id=TagId.YELLOW,
        label="Yellow",
        strictness=2,
        requires_depositor_review=True,
        description=(
            "Personal data whose re-use the depositor has to assess for "
            "purpose compatibility before granting access."
        ),
        legal_bases=(
            LegalBasis(
                Instrument.GDPR,
                "Art. 5.1b",
                "Re-use must stay compatible with the purpose the data was "
                "collected for.",
            ),
            LegalBasis(
                Instrument.GDPR,
                "Recital 50",
                "Compatibility assessment for further processing.",
            ),
        ),
    ),
    TagId.ORANGE: Tag(
        id=TagId.ORANGE,
        label="Orange",
        strictness=3,
        requires_depositor_review=True,
        description=(
            "Health or genetic data with consent for re-use in a general area "
            "linked to a medical or research speciality; the depositor checks "
            "that the re-use stays inside that consented area."
        ),
        special_category_kind=SpecialCategoryKind.HEALTH_OR_GENETIC,
        legal_bases=(
            LegalBasis(
                Instrument.LOPDGDD,
                "DA 17a §2a",
                "Re-use of health data in research under consent scoped to a "
                "general area linked to a medical or research speciality.",
            ),
        ),
    ),
    TagId.PURPLE: Tag(
        id=TagId.PURPLE,
        label="Purple",
        strictness=3,
        requires_depositor_review=True,
        description=(
            "Special-category data other than health or genetics with consent "
            "for re-use in a particular research area; the depositor checks "
            "that the re-use stays inside that consented area."
        ),
        special_category_kind=SpecialCategoryKind.OTHER_SPECIAL_CATEGORY,
        legal_bases=(
            LegalBasis(
                Instrument.GDPR,
                "Recital 33",
                "Consent given for re-use in a particular research area.",
            ),
            LegalBasis(
                Instrument.GDPR,
                "Art. 9.2a",
                "Explicit consent lifts the processing ban on special "
                "categories of data.",
            ),
        ),
    ),
    TagId.RED: Tag(
        id=TagId.RED,
        label="Red",
        strictness=4,
        requires_depositor_review=True,
        description=(
            "Health or genetic data without consent for re-use. The depositor "
            "assesses every request individually and downloads stay disabled."
        ),
        special_category_kind=SpecialCategoryKind.HEALTH_OR_GENETIC,
        legal_bases=(
            LegalBasis(
                Instrument.LOPDGDD,
                "DA 17a §2c",
                "Re-use of pseudonymised health data in research without "
                "fresh consent, under the safeguards the provision sets.",
            ),
            LegalBasis(
                Instrument.LOPDGDD,
                "DA 17a §2d",
                "Re-use in related research areas when obtaining fresh "
                "consent is not feasible, under the safeguards the provision "
                "sets.",
            ),
        ),
    ),
    TagId.NOTAG: Tag(
        id=TagId.NOTAG,
        label="No tag possible",
        strictness=None,
        requires_depositor_review=False,
        description=(
            "The dataset could not be classified automatically; the "
            "institution's Data Protection Officer has to review the case "
            "before it can be deposited."
        ),
    ),
}


def tag_metadata(tag_id: TagId | str) -> Tag:
    """Return the full record for a tag id. Total over the enum."""
    if not isinstance(tag_id, TagId):
        tag_id = TagId.parse(tag_id)
    return _TAGS[tag_id]


def all_tags() -> tuple[Tag, ...]:
    """All seven tag records, blue to red, then the unclassifiable one."""
    return tuple(_TAGS[t] for t in (*CLASSIFIABLE_TAGS, TagId.NOTAG))


def compare_strictness(a: TagId | str, b: TagId | str) -> Ordering:
    """Order two tags by strictness.

    The six classifiable tags form a total preorder (orange and purple tie);
    the unclassifiable outcome compares incomparable to everything,
    including itself.
    """
    ta = tag_metadata(a)
    tb = tag_metadata(b)
    if ta.strictness is None or tb.strictness is None:
        return Ordering.INCOMPARABLE
    if ta.strictness < tb.strictness:
        return Ordering.LESS
    if ta.strictness > tb.strictness:
        return Ordering.GREATER
    return Ordering.EQUAL
