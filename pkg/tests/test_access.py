import itertools

import pytest

import access_oracle
from datatags.enforcement.access import (
    PolicyMismatchError,
    RequestKind,
    RequesterContext,
    UnknownTagError,
    Verdict,
    decide_access,
)
from datatags.policy_matrix import default_matrix
from datatags.taxonomy import TagId

MATRIX = default_matrix()


def make_ctx(identity: str, factors: int, approved: bool, ip: bool) -> RequesterContext:
    if identity == "anon":
        return RequesterContext(source_ip_allowed=ip)
    return RequesterContext(
        user_id="u-test",
        factors_satisfied=factors,
        depositor_approved=approved,
        source_ip_allowed=ip,
    )


def test_exhaustive_oracle_agreement():
    combos = access_oracle.all_combinations()
    assert len(combos) == 432  # full cross product of the oracle dimensions
    for tag_name, identity, factors, approved, ip, request in combos:
        tag = TagId(tag_name)
        ctx = make_ctx(identity, factors, approved, ip)
        decision = decide_access(tag, MATRIX[tag], ctx, RequestKind(request))
        want_verdict, want_reason = access_oracle.expected(
            tag_name, identity, factors, approved, ip, request
        )
        assert decision.verdict.value == want_verdict, (
            tag_name, identity, factors, approved, ip, request, decision,
        )
        if want_reason is not None:
            assert want_reason in decision.reason, (tag_name, request, decision)


def _valid_contexts():
    contexts = []
    for ip in (True, False):
        contexts.append(("anon", 0, False, ip))
    for factors, approved, ip in itertools.product((0, 1, 2), (True, False), (True, False)):
        contexts.append(("registered", factors, approved, ip))
    return contexts


def _satisfied_gates(identity, factors, approved, ip):
    gates = set()
    if identity != "anon":
        gates.add("registered")
        if factors >= 2:
            gates.add("factors")
        if approved:
            gates.add("approved")
    if ip:
        gates.add("ip")
    return gates


def test_monotone_access():
    """More satisfied gates never yields a less permissive verdict."""
    contexts = _valid_contexts()
    for tag in TagId:
        if tag is TagId.NOTAG:
            continue
        for request in RequestKind:
            for combo_a in contexts:
                for combo_b in contexts:
                    if not _satisfied_gates(*combo_a) <= _satisfied_gates(*combo_b):
                        continue
                    decision_a = decide_access(tag, MATRIX[tag], make_ctx(*combo_a), request)
                    decision_b = decide_access(tag, MATRIX[tag], make_ctx(*combo_b), request)
                    assert decision_a.permissiveness <= decision_b.permissiveness, (
                        tag, request, combo_a, combo_b,
                    )


def test_spec_examples():
    anon = make_ctx("anon", 0, False, False)
    full = make_ctx("registered", 2, True, True)
    two_factor = make_ctx("registered", 2, False, False)
    approved_bad_ip = make_ctx("registered", 2, True, False)

    blue = decide_access(TagId.BLUE, MATRIX[TagId.BLUE], anon, RequestKind.DOWNLOAD)
    assert blue.verdict is Verdict.DOWNLOAD_PLAIN

    red_dl = decide_access(TagId.RED, MATRIX[TagId.RED], full, RequestKind.DOWNLOAD)
    assert red_dl.verdict is Verdict.DENY
    assert "downloads disabled" in red_dl.reason

    red_view = decide_access(TagId.RED, MATRIX[TagId.RED], full, RequestKind.VIEW)
    assert red_view.verdict is Verdict.VIEW_ONLY

    yellow = decide_access(TagId.YELLOW, MATRIX[TagId.YELLOW], two_factor, RequestKind.DOWNLOAD)
    assert yellow.verdict is Verdict.DENY
    assert "depositor approval" in yellow.reason

    orange = decide_access(TagId.ORANGE, MATRIX[TagId.ORANGE], approved_bad_ip, RequestKind.VIEW)
    assert orange.verdict is Verdict.DENY
    assert "ip validation" in orange.reason

    for tag in TagId:
        if tag is TagId.NOTAG:
            continue
        metadata = decide_access(tag, MATRIX[tag], anon, RequestKind.METADATA)
        assert metadata.verdict is Verdict.METADATA_ONLY


def test_download_plain_only_for_blue():
    for tag_name, identity, factors, approved, ip, request in access_oracle.all_combinations():
        tag = TagId(tag_name)
        decision = decide_access(
            tag, MATRIX[tag], make_ctx(identity, factors, approved, ip), RequestKind(request)
        )
        if decision.verdict is Verdict.DOWNLOAD_PLAIN:
            assert tag is TagId.BLUE


def test_notag_is_refused():
    with pytest.raises(UnknownTagError):
        decide_access(TagId.NOTAG, None, make_ctx("anon", 0, False, False), RequestKind.VIEW)


def test_policy_row_must_match_tag():
    with pytest.raises(PolicyMismatchError):
        decide_access(
            TagId.RED, MATRIX[TagId.BLUE], make_ctx("anon", 0, False, False), RequestKind.VIEW
        )


def test_anonymous_context_invariant():
    with pytest.raises(ValueError):
        RequesterContext(user_id=None, factors_satisfied=1)
    with pytest.raises(ValueError):
        RequesterContext(user_id=None, depositor_approved=True)
