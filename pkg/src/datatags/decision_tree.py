"""Decision tree for assigning tags: parsing, validation, interviews, batch classification.

The tree ships as data (``data/default_tree.json``) so an institution can
replace the questions without touching code. Every question is strictly
yes/no, which keeps path enumeration exhaustive and lets the classifier be
checked against the full outcome table.

Tree file shape (JSON, UTF-8)::

    {"version": "1.0", "root": "q1",
     "nodes": {"q1": {"prompt": "...", "yes": "q2", "no": {"leaf": "blue"}}, ...}}

An edge is either another node id or a ``{"leaf": "<tag-id>"}`` object
(optionally carrying a ``note``). Nodes may name the answer-sheet ``field``
they correspond to; it defaults to the node id.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields as dataclass_fields
from importlib import resources
from typing import Any, Iterator, Mapping

from .taxonomy import TagId, UnknownTagId

logger = logging.getLogger(__name__)

_DEFAULT_TREE_RESOURCE = "default_tree.json"


class TreeError(Exception):
    """Base class for tree definition problems."""


class TreeSyntaxError(TreeError):
    """Document is not well-formed. Carries a position when one is known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        position = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{position}")
        self.line = line
        self.column = column


class DuplicateIdError(TreeError):
    def __init__(self, node_id: str):
        super().__init__(f"duplicate node id: {node_id!r}")
        self.node_id = node_id


class DanglingEdgeError(TreeError):
    def __init__(self, node_id: str, answer: str, target: str):
        super().__init__(
            f"node {node_id!r} ({answer}-edge) points at unknown node {target!r}"
        )
        self.node_id = node_id
        self.answer = answer
        self.target = target


class InvalidTreeError(TreeError):
    def __init__(self, problems: list["TreeProblem"]):
        super().__init__("; ".join(str(p) for p in problems) or "invalid tree")
        self.problems = problems


class SessionTerminalError(Exception):
    def __init__(self, tag: TagId):
        super().__init__(f"session already terminal with tag {tag.value!r}")
        self.tag = tag


class MissingAnswerError(Exception):
    def __init__(self, question_id: str, field_name: str):
        super().__init__(f"no answer for question {question_id!r} (field {field_name!r})")
        self.question_id = question_id
        self.field = field_name


@dataclass(frozen=True)
class Leaf:
    """Terminal edge target: the assigned tag plus an optional annotation."""

    tag: TagId
    note: str = ""


@dataclass(frozen=True)
class Question:
    """A yes/no question shown to the user, with its legal help text."""

    id: str
    prompt: str
    help: str = ""
    field: str = ""

    def __post_init__(self):
        if not self.field:
            object.__setattr__(self, "field", self.id)


@dataclass(frozen=True)
class Node:
    question: Question
    yes: "str | Leaf"
    no: "str | Leaf"

    def edge(self, value: bool) -> "str | Leaf":
        return self.yes if value else self.no


@dataclass(frozen=True)
class TreeDefinition:
    version: str
    root: str
    nodes: Mapping[str, Node]
    source: str = ""

    def question(self, node_id: str) -> Question:
        return self.nodes[node_id].question

    def leaves(self) -> list[Leaf]:
        out = []
        for node in self.nodes.values():
            for target in (node.yes, node.no):
                if isinstance(target, Leaf):
                    out.append(target)
        return out


@dataclass(frozen=True)
class TreeProblem:
    kind: str  # cycle | unreachable-node | unreachable-tag | missing-root
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    reachable_outcomes: int
    problems: tuple[TreeProblem, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "reachable_outcomes": self.reachable_outcomes,
            "problems": [{"kind": p.kind, "detail": p.detail} for p in self.problems],
        }


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise DuplicateIdError(key)
        seen[key] = value
    return seen


def _parse_edge(node_id: str, answer: str, raw: Any, known_ids: set[str]) -> str | Leaf:
    if isinstance(raw, str):
        if raw not in known_ids:
            raise DanglingEdgeError(node_id, answer, raw)
        return raw
    if isinstance(raw, dict) and "leaf" in raw:
        try:
            tag = TagId.parse(str(raw["leaf"]))
        except UnknownTagId:
            raise TreeSyntaxError(
                f"node {node_id!r} ({answer}-edge): unknown leaf tag {raw['leaf']!r}"
            ) from None
        return Leaf(tag=tag, note=str(raw.get("note", "")))
    raise TreeSyntaxError(
        f"node {node_id!r} ({answer}-edge): expected a node id or a leaf object"
    )


def parse_tree(document: str) -> TreeDefinition:
    """Parse a tree definition document; structural checks only.

    Raises TreeSyntaxError for malformed documents, DuplicateIdError for
    repeated node ids and DanglingEdgeError for edges that do not resolve.
    Semantic properties (acyclicity, leaf coverage) are validate_tree's job.
    """
    try:
        data = json.loads(document, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise TreeSyntaxError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(data, dict):
        raise TreeSyntaxError("tree document must be a JSON object")

    raw_nodes = data.get("nodes")
    if not isinstance(raw_nodes, dict) or not raw_nodes:
        raise TreeSyntaxError("tree document needs a non-empty 'nodes' object")
    root = data.get("root")
    if not isinstance(root, str) or root not in raw_nodes:
        raise TreeSyntaxError(f"root {root!r} is not a node id")

    known_ids = set(raw_nodes)
    nodes: dict[str, Node] = {}
    for node_id, raw in raw_nodes.items():
        if not isinstance(raw, dict):
            raise TreeSyntaxError(f"node {node_id!r} must be an object")
        prompt = raw.get("prompt")
        if not isinstance(prompt, str) or not prompt.strip():
            raise TreeSyntaxError(f"node {node_id!r} needs a non-empty 'prompt'")
        if "yes" not in raw or "no" not in raw:
            raise TreeSyntaxError(f"node {node_id!r} needs both a 'yes' and a 'no' edge")
        nodes[node_id] = Node(
            question=Question(
                id=node_id,
                prompt=prompt,
                help=str(raw.get("help", "")),
                field=str(raw.get("field", "")) or node_id,
            ),
            yes=_parse_edge(node_id, "yes", raw["yes"], known_ids),
            no=_parse_edge(node_id, "no", raw["no"], known_ids),
        )

    return TreeDefinition(
        version=str(data.get("version", "")),
        root=root,
        nodes=nodes,
        source=str(data.get("source", "")),
    )


def load_tree(path) -> TreeDefinition:
    with open(path, encoding="utf-8") as fh:
        return parse_tree(fh.read())


def default_tree() -> TreeDefinition:
    """The tree shipped with the package."""
    document = (
        resources.files("datatags").joinpath("data", _DEFAULT_TREE_RESOURCE).read_text("utf-8")
    )
    return parse_tree(document)


def validate_tree(tree: TreeDefinition) -> ValidationReport:
    """Semantic validation: acyclic, fully reachable, all seven tags placed.

    Returns a report instead of raising; a tree is usable iff report.ok.
    """
    problems: list[TreeProblem] = []

    # Cycle detection over the whole node set, not just the reachable part.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node_id: WHITE for node_id in tree.nodes}

    def visit(start: str) -> bool:
        stack: list[tuple[str, Iterator[str | Leaf]]] = []
        color[start] = GRAY
        node = tree.nodes[start]
        stack.append((start, iter((node.yes, node.no))))
        while stack:
            node_id, edges = stack[-1]
            advanced = False
            for target in edges:
                if isinstance(target, Leaf):
                    continue
                if color[target] == GRAY:
                    problems.append(
                        TreeProblem("cycle", f"back-edge from {node_id!r} to {target!r}")
                    )
                    return False
                if color[target] == WHITE:
                    color[target] = GRAY
                    t = tree.nodes[target]
                    stack.append((target, iter((t.yes, t.no))))
                    advanced = True
                    break
            if not advanced:
                color[node_id] = BLACK
                stack.pop()
        return True

    acyclic = True
    for node_id in tree.nodes:
        if color[node_id] == WHITE:
            if not visit(node_id):
                acyclic = False
                break

    reachable: set[str] = set()
    reachable_tags: set[TagId] = set()
    if acyclic:
        frontier = [tree.root]
        while frontier:
            node_id = frontier.pop()
            if node_id in reachable:
                continue
            reachable.add(node_id)
            node = tree.nodes[node_id]
            for target in (node.yes, node.no):
                if isinstance(target, Leaf):
                    reachable_tags.add(target.tag)
                else:
                    frontier.append(target)
        for node_id in tree.nodes:
            if node_id not in reachable:
                problems.append(
                    TreeProblem("unreachable-node", f"node {node_id!r} not reachable from root")
                )
        for tag in TagId:
            if tag not in reachable_tags:
                problems.append(
                    TreeProblem("unreachable-tag", f"no path reaches tag {tag.value!r}")
                )

    return ValidationReport(
        ok=not problems,
        reachable_outcomes=len(reachable_tags),
        problems=tuple(problems),
    )


@dataclass(frozen=True)
class AnswerSet:
    """The answer sheet for the default tree, one optional yes/no per question.

    Fields are None exactly when the taken path never asks them. Foreign
    trees with their own field names bypass this type and pass a mapping
    directly to classify().
    """

    personal_data: bool | None = None
    special_category: bool | None = None
    health_or_genetic: bool | None = None
    reuse_consent_or_information: bool | None = None
    specialty_scoped_consent: bool | None = None
    area_scoped_consent: bool | None = None

    def to_mapping(self) -> dict[str, bool]:
        return {
            f.name: value
            for f in dataclass_fields(self)
            if (value := getattr(self, f.name)) is not None
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "AnswerSet":
        known = {f.name for f in dataclass_fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in known:
                continue  # surfaced as an extraneous-answer warning by classify
            kwargs[key] = _coerce_answer(key, value)
        extra = set(data) - known
        if extra:
            logger.warning("ignoring unknown answer fields: %s", ", ".join(sorted(extra)))
        return cls(**kwargs)


def _coerce_answer(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("yes", "no", "true", "false", "y", "n"):
        return value.strip().lower() in ("yes", "true", "y")
    raise ValueError(f"answer {key!r} must be yes/no, got {value!r}")


@dataclass(frozen=True)
class ClassificationResult:
    tag: TagId
    path: tuple[tuple[str, bool], ...]  # (question id, answer) pairs, root first
    note: str
    tree_version: str
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "tag": self.tag.value,
            "path": [
                {"question": qid, "answer": "yes" if value else "no"}
                for qid, value in self.path
            ],
            "note": self.note,
            "tree_version": self.tree_version,
            "warnings": list(self.warnings),
        }


def classify_detailed(
    tree: TreeDefinition, answers: "AnswerSet | Mapping[str, bool]"
) -> ClassificationResult:
    """Fold an answer mapping through the tree and report the full path.

    Answers are keyed by the node's field name (question id for trees
    without field bindings). Answers for questions off the taken path are
    ignored with a warning; a missing answer on the path raises
    MissingAnswerError naming the question.
    """
    if isinstance(answers, AnswerSet):
        mapping = answers.to_mapping()
    else:
        mapping = dict(answers)

    path: list[tuple[str, bool]] = []
    used_fields: set[str] = set()
    current: str | Leaf = tree.root
    for _ in range(len(tree.nodes) + 1):
        if isinstance(current, Leaf):
            break
        node = tree.nodes[current]
        field_name = node.question.field
        if field_name not in mapping:
            raise MissingAnswerError(current, field_name)
        value = bool(mapping[field_name])
        used_fields.add(field_name)
        path.append((current, value))
        current = node.edge(value)
    else:
        raise InvalidTreeError([TreeProblem("cycle", "classification did not terminate")])

    warnings = tuple(
        f"answer {name!r} not on the taken path; ignored"
        for name in sorted(set(mapping) - used_fields)
    )
    for message in warnings:
        logger.warning("%s", message)

    assert isinstance(current, Leaf)
    return ClassificationResult(
        tag=current.tag,
        path=tuple(path),
        note=current.note,
        tree_version=tree.version,
        warnings=warnings,
    )


def classify(tree: TreeDefinition, answers: "AnswerSet | Mapping[str, bool]") -> TagId:
    """The tag at the leaf the answers lead to; identical to running a session."""
    return classify_detailed(tree, answers).tag


def enumerate_paths(tree: TreeDefinition) -> list[tuple[dict[str, bool], TagId]]:
    """Every root-to-leaf path as (answer mapping, tag). Depth-first, yes before no."""
    out: list[tuple[dict[str, bool], TagId]] = []

    def walk(target: str | Leaf, acc: dict[str, bool]):
        if isinstance(target, Leaf):
            out.append((dict(acc), target.tag))
            return
        node = tree.nodes[target]
        for value in (True, False):
            acc[node.question.field] = value
            walk(node.edge(value), acc)
            del acc[node.question.field]

    walk(tree.root, {})
    return out


class InterviewSession:
    """A stepwise traversal of a validated tree.

    Sessions are immutable values: answer() and undo() return new sessions,
    and the state is always the pure fold of the recorded answers over the
    tree, so replaying a prefix reproduces every historical state.
    """

    def __init__(self, tree: TreeDefinition, answers: tuple[tuple[str, bool], ...] = ()):
        self._tree = tree
        self._answers = answers
        self._state: str | Leaf = self._replay()

    def _replay(self) -> str | Leaf:
        current: str | Leaf = self._tree.root
        for question_id, value in self._answers:
            if isinstance(current, Leaf):
                raise SessionTerminalError(current.tag)
            if question_id != current:
                raise ValueError(
                    f"recorded answer for {question_id!r} but session is at {current!r}"
                )
            current = self._tree.nodes[current].edge(value)
        return current

    @property
    def tree(self) -> TreeDefinition:
        return self._tree

    @property
    def tree_version(self) -> str:
        return self._tree.version

    @property
    def answers(self) -> tuple[tuple[str, bool], ...]:
        return self._answers

    @property
    def is_terminal(self) -> bool:
        return isinstance(self._state, Leaf)

    @property
    def result(self) -> Leaf | None:
        return self._state if isinstance(self._state, Leaf) else None

    @property
    def current_question(self) -> Question | None:
        if isinstance(self._state, Leaf):
            return None
        return self._tree.nodes[self._state].question

    def answer(self, value: bool) -> "InterviewSession":
        if isinstance(self._state, Leaf):
            raise SessionTerminalError(self._state.tag)
        return InterviewSession(self._tree, (*self._answers, (self._state, value)))

    def undo(self) -> "InterviewSession":
        """Drop the last answer; no-op on a fresh session."""
        return InterviewSession(self._tree, self._answers[:-1])

    def truncated(self, length: int) -> "InterviewSession":
        return InterviewSession(self._tree, self._answers[:length])


def start_session(tree: TreeDefinition) -> InterviewSession:
    """Open an interview at the root. The tree must validate."""
    report = validate_tree(tree)
    if not report.ok:
        raise InvalidTreeError(list(report.problems))
    return InterviewSession(tree)
