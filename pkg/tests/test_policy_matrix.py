import dataclasses
import json

import pytest

from datatags.policy_matrix import (
    AccessRight,
    AtRest,
    AuthRequirement,
    InTransit,
    KeyScheme,
    MatrixSyntaxError,
    MatrixValidationError,
    NoPolicyForUnclassified,
    StoragePolicy,
    check_floor,
    check_monotonicity,
    default_matrix,
    load_matrix,
    parse_matrix,
    policy_for_tag,
)
from datatags.taxonomy import CLASSIFIABLE_TAGS, TagId
from safeguard_table_fixture import SAFEGUARD_TABLE


def test_default_matrix_matches_hand_transcription_cell_for_cell():
    matrix = default_matrix()
    assert set(matrix) == set(CLASSIFIABLE_TAGS)
    for tag_name, expected in SAFEGUARD_TABLE.items():
        row = matrix[TagId(tag_name)]
        assert row.auth.registration_required == expected["registration_required"], tag_name
        assert sorted(c.value for c in row.auth.access_controls) == sorted(
            expected["access_controls"]
        ), tag_name
        assert row.auth.role_differentiation == expected["role_differentiation"], tag_name
        assert (
            row.auth.depositor_approval_required == expected["depositor_approval_required"]
        ), tag_name
        assert row.auth.ip_validation == expected["ip_validation"], tag_name
        assert row.access.value == expected["access"], tag_name
        assert row.storage.at_rest.value == expected["at_rest"], tag_name
        assert row.storage.in_transit.value == expected["in_transit"], tag_name
        assert row.keys.value == expected["keys"], tag_name


def test_spot_checks_from_the_table():
    matrix = default_matrix()
    assert matrix[TagId.BLUE].access is AccessRight.PUBLIC_PLAIN_DOWNLOAD
    assert matrix[TagId.YELLOW].keys is KeyScheme.SEPARATE_FROM_REPOSITORY_AND_DEPOSITOR
    assert matrix[TagId.RED].access is AccessRight.VIEW_ONLY_NO_DOWNLOAD
    assert matrix[TagId.ORANGE].auth.ip_validation is True
    assert "encrypted with a password" in matrix[TagId.GREEN].summary()[
        "read_and_download_permissions"
    ]


def test_orange_and_purple_differ_only_in_the_note():
    matrix = default_matrix()
    orange, purple = matrix[TagId.ORANGE], matrix[TagId.PURPLE]
    assert orange.auth == purple.auth
    assert orange.access is purple.access
    assert orange.storage == purple.storage
    assert orange.keys is purple.keys
    assert orange.approval_criteria_note != purple.approval_criteria_note
    assert "speciality" in orange.approval_criteria_note
    assert "particular research area" in purple.approval_criteria_note


def test_policy_for_tag_refuses_unclassified():
    with pytest.raises(NoPolicyForUnclassified):
        policy_for_tag(TagId.NOTAG)


def test_policy_for_tag_defaults_to_shipped_matrix():
    assert policy_for_tag("green").keys is KeyScheme.SEPARATE_FROM_REPOSITORY_DATA


def test_transmission_never_plain_above_blue():
    matrix = default_matrix()
    for tag in CLASSIFIABLE_TAGS:
        if tag is TagId.BLUE:
            assert matrix[tag].storage.in_transit is InTransit.PLAIN
        else:
            assert matrix[tag].storage.in_transit is not InTransit.PLAIN


def test_at_rest_double_encrypted_above_blue():
    matrix = default_matrix()
    for tag in CLASSIFIABLE_TAGS:
        expected = AtRest.PLAIN if tag is TagId.BLUE else AtRest.DOUBLE_ENCRYPTED
        assert matrix[tag].storage.at_rest is expected


def test_default_matrix_is_monotone():
    report = check_monotonicity(default_matrix())
    assert report.ok, report.violations


def _mutate(matrix, tag, **changes):
    mutated = dict(matrix)
    row = mutated[tag]
    if "at_rest" in changes or "in_transit" in changes:
        storage = StoragePolicy(
            at_rest=changes.get("at_rest", row.storage.at_rest),
            in_transit=changes.get("in_transit", row.storage.in_transit),
        )
        row = dataclasses.replace(row, storage=storage)
        changes = {k: v for k, v in changes.items() if k not in ("at_rest", "in_transit")}
    if "auth" in changes:
        row = dataclasses.replace(row, auth=changes.pop("auth"))
    if changes:
        row = dataclasses.replace(row, **changes)
    mutated[tag] = row
    return mutated


# One single-cell mutation per tag that monotonicity checking must reject.
LOOSENED_MUTANTS = {
    TagId.BLUE: {"access": AccessRight.VIEW_ONLY_NO_DOWNLOAD},
    TagId.GREEN: {"at_rest": AtRest.PLAIN},
    TagId.YELLOW: {"access": AccessRight.PUBLIC_PLAIN_DOWNLOAD},
    TagId.ORANGE: {"keys": KeyScheme.SEPARATE_FROM_REPOSITORY_DATA},
    TagId.PURPLE: {
        "auth": AuthRequirement(
            registration_required=True,
            access_controls=default_matrix()[TagId.PURPLE].auth.access_controls,
            role_differentiation=True,
            depositor_approval_required=True,
            ip_validation=False,
        )
    },
    TagId.RED: {"at_rest": AtRest.PLAIN},
}


@pytest.mark.parametrize("tag", list(LOOSENED_MUTANTS))
def test_single_cell_mutants_fail_monotonicity(tag):
    mutated = _mutate(default_matrix(), tag, **LOOSENED_MUTANTS[tag])
    report = check_monotonicity(mutated)
    assert not report.ok
    assert any(tag.value in str(v) for v in report.violations)


def test_red_plain_storage_violates_order_against_yellow():
    mutated = _mutate(default_matrix(), TagId.RED, at_rest=AtRest.PLAIN)
    report = check_monotonicity(mutated)
    kinds = {v.kind for v in report.violations}
    assert "order-violation" in kinds


def test_incomplete_matrix_reported():
    matrix = default_matrix()
    del matrix[TagId.PURPLE]
    report = check_monotonicity(matrix)
    assert not report.ok
    assert report.violations[0].kind == "incomplete-matrix"
    assert "purple" in report.violations[0].detail


def test_check_floor_flags_loosening_and_allows_tightening():
    loosened = _mutate(default_matrix(), TagId.GREEN, keys=KeyScheme.NO_KEYS)
    report = check_floor(loosened, default_matrix())
    assert not report.ok
    assert any("green" in str(v) for v in report.violations)

    tightened = _mutate(
        default_matrix(), TagId.GREEN, keys=KeyScheme.SEPARATE_FROM_REPOSITORY_AND_DEPOSITOR
    )
    assert check_floor(tightened, default_matrix()).ok
    assert check_monotonicity(tightened).ok


def test_matrix_file_round_trip(tmp_path):
    from importlib import resources

    document = resources.files("datatags").joinpath("data", "default_matrix.json").read_text()
    parsed = parse_matrix(document)
    assert parsed == default_matrix()

    path = tmp_path / "matrix.json"
    path.write_text(document)
    assert load_matrix(path) == default_matrix()


def test_load_matrix_rejects_loosened_file(tmp_path):
    from importlib import resources

    data = json.loads(
        resources.files("datatags").joinpath("data", "default_matrix.json").read_text()
    )
    data["tags"]["yellow"]["keys"] = "separate-from-repository-data"
    path = tmp_path / "matrix.json"
    path.write_text(json.dumps(data))
    with pytest.raises(MatrixValidationError) as exc_info:
        load_matrix(path)
    assert any(v.kind == "below-floor" for v in exc_info.value.report.violations)


def test_parse_matrix_rejects_notag_row():
    with pytest.raises(MatrixSyntaxError):
        parse_matrix(json.dumps({"tags": {"notag": {}}}))


def test_policy_json_contains_summary_rows():
    record = default_matrix()[TagId.YELLOW].to_json()
    assert record["summary"]["key_storage"].startswith("Encryption key stored separately")
    assert "separately from repository and depositor data" in record["summary"]["key_storage"]
