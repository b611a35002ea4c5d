"""datatags: seven-tag classification for research datasets with personal data.

A decision-tree interview assigns one of seven tags to a dataset; each tag
maps to a row of safeguards (authentication, approval, encryption, key
custody, download restrictions) that the enforcement layer and the
reference repository service apply.
"""

from .decision_tree import (
    AnswerSet,
    ClassificationResult,
    InterviewSession,
    TreeDefinition,
    classify,
    classify_detailed,
    default_tree,
    enumerate_paths,
    load_tree,
    parse_tree,
    start_session,
    validate_tree,
)
from .policy_matrix import (
    AccessRight,
    HandlingPolicy,
    check_floor,
    check_monotonicity,
    default_matrix,
    load_matrix,
    policy_for_tag,
)
from .taxonomy import (
    CLASSIFIABLE_TAGS,
    LegalBasis,
    Ordering,
    SpecialCategoryKind,
    Tag,
    TagId,
    all_tags,
    compare_strictness,
    tag_metadata,
)

__version__ = "0.1.0"

__all__ = [
    "AccessRight",
    "AnswerSet",
    "CLASSIFIABLE_TAGS",
    "ClassificationResult",
    "HandlingPolicy",
    "InterviewSession",
    "LegalBasis",
    "Ordering",
    "SpecialCategoryKind",
    "Tag",
    "TagId",
    "TreeDefinition",
    "all_tags",
    "check_floor",
    "check_monotonicity",
    "classify",
    "classify_detailed",
    "compare_strictness",
    "default_matrix",
    "default_tree",
    "enumerate_paths",
    "load_matrix",
    "load_tree",
    "parse_tree",
    "policy_for_tag",
    "start_session",
    "tag_metadata",
    "validate_tree",
]
