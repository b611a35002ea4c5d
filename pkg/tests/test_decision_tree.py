import json

import pytest
from hypothesis import given, strategies as st

from conftest import ANSWERS
from datatags.decision_tree import (
    AnswerSet,
    DanglingEdgeError,
    DuplicateIdError,
    InvalidTreeError,
    MissingAnswerError,
    SessionTerminalError,
    TreeSyntaxError,
    classify,
    classify_detailed,
    default_tree,
    enumerate_paths,
    parse_tree,
    start_session,
    validate_tree,
)
from datatags.taxonomy import TagId

SINGLE_QUESTION_TREE = json.dumps(
    {
        "version": "t",
        "root": "q1",
        "nodes": {
            "q1": {"prompt": "Is it sensitive?", "yes": {"leaf": "red"}, "no": {"leaf": "blue"}}
        },
    }
)


# -- parsing -------------------------------------------------------------------


def test_default_tree_has_six_questions_and_seven_leaves():
    tree = default_tree()
    assert len(tree.nodes) == 6
    assert len(tree.leaves()) == 7
    assert tree.version == "1.0"
    assert tree.source == "reconstructed"


def test_parse_rejects_empty_document():
    with pytest.raises(TreeSyntaxError):
        parse_tree("")


def test_parse_rejects_dangling_edge():
    document = json.dumps(
        {
            "version": "t",
            "root": "q1",
            "nodes": {"q1": {"prompt": "?", "yes": "q-missing", "no": {"leaf": "blue"}}},
        }
    )
    with pytest.raises(DanglingEdgeError) as exc_info:
        parse_tree(document)
    assert exc_info.value.target == "q-missing"


def test_parse_rejects_duplicate_node_ids():
    document = (
        '{"version":"t","root":"q1","nodes":{'
        '"q1":{"prompt":"?","yes":{"leaf":"red"},"no":{"leaf":"blue"}},'
        '"q1":{"prompt":"again","yes":{"leaf":"red"},"no":{"leaf":"blue"}}}}'
    )
    with pytest.raises(DuplicateIdError):
        parse_tree(document)


def test_parse_rejects_unknown_leaf_tag():
    document = json.dumps(
        {"version": "t", "root": "q1",
         "nodes": {"q1": {"prompt": "?", "yes": {"leaf": "pink"}, "no": {"leaf": "blue"}}}}
    )
    with pytest.raises(TreeSyntaxError):
        parse_tree(document)


def test_syntax_error_carries_position():
    with pytest.raises(TreeSyntaxError) as exc_info:
        parse_tree('{"version": "t", ')
    assert exc_info.value.line is not None


# -- validation ------------------------------------------------------------------


def test_default_tree_validates_with_seven_outcomes():
    report = validate_tree(default_tree())
    assert report.ok
    assert report.reachable_outcomes == 7
    assert report.problems == ()


def test_missing_leaf_reported_as_unreachable_tag():
    document = json.loads(SINGLE_QUESTION_TREE)
    tree = parse_tree(json.dumps(document))
    report = validate_tree(tree)
    assert not report.ok
    unreachable = {p.detail for p in report.problems if p.kind == "unreachable-tag"}
    assert any("'green'" in detail for detail in unreachable)
    assert report.reachable_outcomes == 2


def test_red_leaf_removed_is_flagged():
    data = json.loads(_default_tree_document())
    data["nodes"]["q5"]["no"] = {"leaf": "orange"}
    report = validate_tree(parse_tree(json.dumps(data)))
    assert not report.ok
    assert any("'red'" in p.detail for p in report.problems if p.kind == "unreachable-tag")


def _default_tree_document() -> str:
    from importlib import resources

    return resources.files("datatags").joinpath("data", "default_tree.json").read_text("utf-8")


def test_cycle_detected():
    data = json.loads(_default_tree_document())
    data["nodes"]["q3"]["no"] = "q1"
    report = validate_tree(parse_tree(json.dumps(data)))
    assert not report.ok
    assert any(p.kind == "cycle" for p in report.problems)


def test_unreachable_node_detected():
    data = json.loads(_default_tree_document())
    data["nodes"]["orphan"] = {"prompt": "?", "yes": {"leaf": "red"}, "no": {"leaf": "blue"}}
    report = validate_tree(parse_tree(json.dumps(data)))
    assert not report.ok
    assert any(p.kind == "unreachable-node" for p in report.problems)


# -- classification ---------------------------------------------------------------


@pytest.mark.parametrize(
    "tag_name",
    ["blue", "green", "yellow", "orange", "purple", "red", "notag"],
)
def test_outcome_table(tag_name):
    assert classify(default_tree(), ANSWERS[tag_name]) is TagId(tag_name)


def test_classify_missing_answer_names_the_question():
    with pytest.raises(MissingAnswerError) as exc_info:
        classify(default_tree(), {"personal_data": True})
    assert exc_info.value.question_id == "q2"
    assert exc_info.value.field == "special_category"


def test_extraneous_answers_warn_but_do_not_fail():
    answers = dict(ANSWERS["blue"], specialty_scoped_consent=True)
    result = classify_detailed(default_tree(), answers)
    assert result.tag is TagId.BLUE
    assert any("specialty_scoped_consent" in w for w in result.warnings)


def test_green_leaf_carries_the_two_condition_note():
    result = classify_detailed(default_tree(), ANSWERS["green"])
    assert "informed" in result.note
    assert result.tree_version == "1.0"


def test_answer_set_round_trip_from_json():
    answers = AnswerSet.from_json({"personal_data": "yes", "special_category": "no",
                                   "reuse_consent_or_information": True})
    assert classify(default_tree(), answers) is TagId.GREEN


def test_answer_set_rejects_non_boolean_values():
    with pytest.raises(ValueError):
        AnswerSet.from_json({"personal_data": "maybe"})


# -- path enumeration ----------------------------------------------------------------


def test_enumerate_paths_has_seven_entries_one_per_tag():
    paths = enumerate_paths(default_tree())
    assert len(paths) == 7
    assert {tag for _, tag in paths} == set(TagId)


def test_single_question_tree_has_two_paths():
    assert len(enumerate_paths(parse_tree(SINGLE_QUESTION_TREE))) == 2


def test_paths_replay_through_classify():
    tree = default_tree()
    for answers, tag in enumerate_paths(tree):
        assert classify(tree, answers) is tag


def test_enumerated_paths_match_stepwise_sessions():
    tree = default_tree()
    for answers, tag in enumerate_paths(tree):
        session = start_session(tree)
        while not session.is_terminal:
            session = session.answer(answers[session.current_question.field])
        assert session.result.tag is tag


# -- sessions ----------------------------------------------------------------------


def test_fresh_session_is_at_the_root_question():
    session = start_session(default_tree())
    assert session.answers == ()
    assert session.current_question.prompt == "Does the dataset contain personal data?"
    assert not session.is_terminal


def test_answering_no_at_root_terminates_blue():
    session = start_session(default_tree()).answer(False)
    assert session.is_terminal
    assert session.result.tag is TagId.BLUE


def test_health_path_without_consent_terminates_red():
    session = start_session(default_tree())
    for value in (True, True, True, False):
        session = session.answer(value)
    assert session.result.tag is TagId.RED


def test_answering_a_terminal_session_raises():
    session = start_session(default_tree()).answer(False)
    with pytest.raises(SessionTerminalError):
        session.answer(True)


def test_start_session_refuses_invalid_tree():
    with pytest.raises(InvalidTreeError):
        start_session(parse_tree(SINGLE_QUESTION_TREE))


def test_undo_restores_previous_question():
    session = start_session(default_tree()).answer(True).answer(True)
    assert session.current_question.id == "q4"
    session = session.undo()
    assert session.current_question.id == "q2"
    session = session.undo().undo()  # extra undo at the root is a no-op
    assert session.current_question.id == "q1"


@given(st.lists(st.booleans(), min_size=0, max_size=6))
def test_undo_soundness_over_random_answer_sequences(values):
    tree = default_tree()
    session = start_session(tree)
    history = [session]
    for value in values:
        if session.is_terminal:
            break
        session = session.answer(value)
        history.append(session)
    for k, snapshot in enumerate(history):
        replayed = session.truncated(k) if k <= len(session.answers) else None
        if replayed is not None:
            assert replayed.answers == snapshot.answers
            assert replayed.is_terminal == snapshot.is_terminal
            assert replayed.current_question == snapshot.current_question
            assert replayed.result == snapshot.result


@given(st.lists(st.booleans(), min_size=6, max_size=6))
def test_replay_determinism(values):
    tree = default_tree()

    def run():
        session = start_session(tree)
        for value in values:
            if session.is_terminal:
                break
            session = session.answer(value)
        return session

    first, second = run(), run()
    assert first.answers == second.answers
    assert first.result == second.result
