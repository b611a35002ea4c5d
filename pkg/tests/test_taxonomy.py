import json

import pytest

from datatags.taxonomy import (
    CLASSIFIABLE_TAGS,
    Instrument,
    Ordering,
    SpecialCategoryKind,
    TagId,
    UnknownTagId,
    all_tags,
    compare_strictness,
    tag_metadata,
)


def test_exactly_seven_tags():
    assert len(list(TagId)) == 7
    assert len(all_tags()) == 7
    assert len(CLASSIFIABLE_TAGS) == 6


def test_blue_is_rank_zero_without_review():
    blue = tag_metadata(TagId.BLUE)
    assert blue.strictness == 0
    assert blue.requires_depositor_review is False
    assert blue.legal_bases == ()


def test_orange_and_purple_share_strictness():
    assert tag_metadata(TagId.ORANGE).strictness == tag_metadata(TagId.PURPLE).strictness


def test_depositor_review_exactly_for_four_tags():
    needing_review = {t.id for t in all_tags() if t.requires_depositor_review}
    assert needing_review == {TagId.YELLOW, TagId.ORANGE, TagId.PURPLE, TagId.RED}


def test_every_tag_except_blue_and_notag_carries_a_basis():
    for tag in all_tags():
        if tag.id in (TagId.BLUE, TagId.NOTAG):
            assert tag.legal_bases == ()
        else:
            assert len(tag.legal_bases) >= 1, tag.id


def test_red_cites_both_lopdgdd_sections():
    provisions = {b.provision for b in tag_metadata(TagId.RED).legal_bases}
    assert "DA 17a §2c" in provisions
    assert "DA 17a §2d" in provisions
    assert all(b.instrument is Instrument.LOPDGDD for b in tag_metadata(TagId.RED).legal_bases)


def test_yellow_cites_purpose_compatibility():
    provisions = {b.provision for b in tag_metadata(TagId.YELLOW).legal_bases}
    assert provisions == {"Art. 5.1b", "Recital 50"}


def test_orange_cites_lopdgdd_2a():
    provisions = {b.provision for b in tag_metadata(TagId.ORANGE).legal_bases}
    assert provisions == {"DA 17a §2a"}


def test_purple_cites_recital_33_and_9_2a():
    provisions = {b.provision for b in tag_metadata(TagId.PURPLE).legal_bases}
    assert provisions == {"Recital 33", "Art. 9.2a"}


def test_special_category_kinds():
    assert tag_metadata(TagId.ORANGE).special_category_kind is SpecialCategoryKind.HEALTH_OR_GENETIC
    assert tag_metadata(TagId.RED).special_category_kind is SpecialCategoryKind.HEALTH_OR_GENETIC
    assert (
        tag_metadata(TagId.PURPLE).special_category_kind
        is SpecialCategoryKind.OTHER_SPECIAL_CATEGORY
    )
    assert tag_metadata(TagId.BLUE).special_category_kind is SpecialCategoryKind.NONE


def test_notag_is_unranked_but_fully_described():
    notag = tag_metadata("notag")
    assert notag.strictness is None
    assert not notag.classifiable
    assert "Data Protection Officer" in notag.description


def test_tag_metadata_accepts_strings_case_insensitively():
    assert tag_metadata("Orange").id is TagId.ORANGE
    with pytest.raises(UnknownTagId):
        tag_metadata("pink")


def test_compare_strictness_total_order():
    order = [TagId.BLUE, TagId.GREEN, TagId.YELLOW, TagId.ORANGE, TagId.RED]
    for i, lower in enumerate(order):
        for higher in order[i + 1 :]:
            assert compare_strictness(lower, higher) is Ordering.LESS
            assert compare_strictness(higher, lower) is Ordering.GREATER


def test_compare_strictness_examples():
    assert compare_strictness(TagId.BLUE, TagId.RED) is Ordering.LESS
    assert compare_strictness(TagId.ORANGE, TagId.PURPLE) is Ordering.EQUAL
    assert compare_strictness(TagId.GREEN, TagId.GREEN) is Ordering.EQUAL


def test_notag_incomparable_to_everything():
    for tag in TagId:
        assert compare_strictness(TagId.NOTAG, tag) is Ordering.INCOMPARABLE
        assert compare_strictness(tag, TagId.NOTAG) is Ordering.INCOMPARABLE


def test_antisymmetry_except_orange_purple_tie():
    for a in CLASSIFIABLE_TAGS:
        for b in CLASSIFIABLE_TAGS:
            if compare_strictness(a, b) is Ordering.EQUAL and a is not b:
                assert {a, b} == {TagId.ORANGE, TagId.PURPLE}


def test_tag_json_round_trips_through_json_module():
    record = tag_metadata(TagId.ORANGE).to_json()
    parsed = json.loads(json.dumps(record))
    assert parsed["id"] == "orange"
    assert parsed["strictness"] == 3
    assert parsed["requires_depositor_review"] is True
    assert parsed["legal_bases"][0]["instrument"] == "LOPDGDD"


def test_notag_serializes_null_strictness():
    assert json.loads(json.dumps(tag_metadata(TagId.NOTAG).to_json()))["strictness"] is None
