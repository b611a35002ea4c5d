"""Command-line front end: interviews, batch classification, validation, serving.

Exit codes are fixed for scriptability: 0 ok, 1 validation failure,
2 aborted interview, 3 bad input, 4 usage error, 5 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import decision_tree as dt
from . import policy_matrix as pm
from .taxonomy import TagId, UnknownTagId, tag_metadata

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ABORTED = 2
EXIT_INPUT = 3
EXIT_USAGE = 4
EXIT_RUNTIME = 5


@click.group()
@click.option("--tree", "tree_path", type=click.Path(), default=None, help="Tree definition file.")
@click.option("--matrix", "matrix_path", type=click.Path(), default=None, help="Safeguard matrix file.")
@click.option("--format", "output_format", type=click.Choice(["table", "json"]), default="table")
@click.pass_context
def cli(ctx, tree_path, matrix_path, output_format):
    """Classification tags for research datasets with personal data."""
    ctx.ensure_object(dict)
    ctx.obj["tree_path"] = tree_path
    ctx.obj["matrix_path"] = matrix_path
    ctx.obj["format"] = output_format


def _load_tree(ctx) -> dt.TreeDefinition:
    path = ctx.obj.get("tree_path")
    try:
        tree = dt.load_tree(path) if path else dt.default_tree()
    except OSError as exc:
        click.echo(f"cannot read tree file: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except dt.TreeError as exc:
        click.echo(f"invalid tree: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    report = dt.validate_tree(tree)
    if not report.ok:
        click.echo(json.dumps(report.to_json(), indent=2), err=True)
        sys.exit(EXIT_VALIDATION)
    return tree


def _load_matrix(ctx) -> dict[TagId, pm.HandlingPolicy]:
    path = ctx.obj.get("matrix_path")
    if not path:
        return pm.default_matrix()
    try:
        return pm.load_matrix(path)
    except OSError as exc:
        click.echo(f"cannot read matrix file: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except pm.MatrixValidationError as exc:
        click.echo(json.dumps(exc.report.to_json(), indent=2), err=True)
        sys.exit(EXIT_VALIDATION)
    except pm.MatrixError as exc:
        click.echo(f"invalid matrix: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _print_consequences(tag_id: TagId, matrix) -> None:
    tag = tag_metadata(tag_id)
    click.echo(f"{tag.id.value.upper()} — {tag.label}")
    click.echo(tag.description)
    if tag.legal_bases:
        click.echo("Legal bases:")
        for basis in tag.legal_bases:
            click.echo(f"  - {basis.instrument.value} {basis.provision}: {basis.note}")
    if tag_id is TagId.NOTAG:
        click.echo("Refer the dataset to your Data Protection Officer before depositing.")
        return
    policy = matrix[tag_id]
    click.echo("Safeguards:")
    for area, text in policy.summary().items():
        click.echo(f"  {area.replace('_', ' ')}: {text}")
    if policy.approval_criteria_note:
        click.echo(f"  approval criterion: {policy.approval_criteria_note}")


@cli.command()
@click.pass_context
def interview(ctx):
    """Answer the classification questions one at a time."""
    tree = _load_tree(ctx)
    matrix = _load_matrix(ctx)
    session = dt.start_session(tree)
    click.echo("Answer each question with y(es) or n(o). Ctrl-D aborts.")
    while not session.is_terminal:
        question = session.current_question
        click.echo(f"\n{question.prompt}")
        if question.help:
            click.echo(f"  {question.help}")
        raw = click.prompt("Answer", type=click.Choice(["y", "n", "yes", "no"], case_sensitive=False))
        session = session.answer(raw.lower() in ("y", "yes"))

    leaf = session.result
    click.echo("")
    if ctx.obj["format"] == "json":
        tag = tag_metadata(leaf.tag)
        record = tag.to_json()
        record["note"] = leaf.note
        record["consequences"] = (
            matrix[leaf.tag].summary() if leaf.tag is not TagId.NOTAG else None
        )
        click.echo(json.dumps(record, indent=2))
    else:
        _print_consequences(leaf.tag, matrix)
        if leaf.note:
            click.echo(f"Note: {leaf.note}")
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("answers_file", type=click.Path())
@click.option("--explain", is_flag=True, help="Show the path taken and the legal citations.")
@click.pass_context
def classify(ctx, answers_file, explain):
    """Classify a JSON answer sheet and print the tag."""
    tree = _load_tree(ctx)
    try:
        raw = json.loads(Path(answers_file).read_text(encoding="utf-8"))
        answers = dt.AnswerSet.from_json(raw) if isinstance(raw, dict) else None
        if answers is None:
            raise ValueError("answer sheet must be a JSON object")
    except (OSError, ValueError) as exc:
        click.echo(f"cannot read answers: {exc}", err=True)
        sys.exit(EXIT_INPUT)

    try:
        result = dt.classify_detailed(tree, answers)
    except dt.MissingAnswerError as exc:
        click.echo(f"incomplete answers: {exc}", err=True)
        sys.exit(EXIT_INPUT)

    if ctx.obj["format"] == "json":
        record = result.to_json()
        if explain:
            tag = tag_metadata(result.tag)
            record["legal_bases"] = [b.to_json() for b in tag.legal_bases]
            record["description"] = tag.description
        click.echo(json.dumps(record, indent=2))
    else:
        click.echo(result.tag.value)
        if explain:
            for question_id, value in result.path:
                prompt = tree.question(question_id).prompt
                click.echo(f"  {question_id} [{'yes' if value else 'no'}] {prompt}")
            tag = tag_metadata(result.tag)
            for basis in tag.legal_bases:
                click.echo(f"  {basis.instrument.value} {basis.provision}: {basis.note}")
            if result.note:
                click.echo(f"  note: {result.note}")
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("path", type=click.Path())
@click.pass_context
def validate(ctx, path):
    """Validate a tree or matrix file; exit 0 iff clean."""
    try:
        document = Path(path).read_text(encoding="utf-8")
        data = json.loads(document)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(json.dumps({"ok": False, "problems": [{"kind": "syntax", "detail": str(exc)}]}))
        sys.exit(EXIT_VALIDATION)

    if isinstance(data, dict) and "nodes" in data:
        try:
            tree = dt.parse_tree(document)
        except dt.TreeError as exc:
            click.echo(
                json.dumps({"ok": False, "problems": [{"kind": "structure", "detail": str(exc)}]})
            )
            sys.exit(EXIT_VALIDATION)
        report = dt.validate_tree(tree)
        click.echo(json.dumps(report.to_json(), indent=2))
        sys.exit(EXIT_OK if report.ok else EXIT_VALIDATION)

    if isinstance(data, dict) and "tags" in data:
        try:
            matrix = pm.parse_matrix(document)
        except pm.MatrixError as exc:
            click.echo(
                json.dumps({"ok": False, "violations": [{"kind": "structure", "detail": str(exc)}]})
            )
            sys.exit(EXIT_VALIDATION)
        report = pm.check_monotonicity(matrix)
        floor = pm.check_floor(matrix, pm.default_matrix())
        merged = pm.MatrixReport(
            ok=report.ok and floor.ok, violations=report.violations + floor.violations
        )
        click.echo(json.dumps(merged.to_json(), indent=2))
        sys.exit(EXIT_OK if merged.ok else EXIT_VALIDATION)

    click.echo("file is neither a tree (nodes) nor a matrix (tags)", err=True)
    sys.exit(EXIT_INPUT)


@cli.command()
@click.argument("tag")
@click.pass_context
def policy(ctx, tag):
    """Print the four-area safeguard row for a tag."""
    try:
        tag_id = TagId.parse(tag)
    except UnknownTagId:
        click.echo(f"unknown tag {tag!r}; expected one of "
                   f"{', '.join(t.value for t in TagId)}", err=True)
        sys.exit(EXIT_USAGE)
    if tag_id is TagId.NOTAG:
        click.echo(
            "no safeguard row: an unclassifiable dataset must be referred to "
            "the Data Protection Officer before deposit",
            err=True,
        )
        sys.exit(EXIT_USAGE)
    matrix = _load_matrix(ctx)
    if ctx.obj["format"] == "json":
        record = tag_metadata(tag_id).to_json()
        record["policy"] = matrix[tag_id].to_json()
        click.echo(json.dumps(record, indent=2))
    else:
        _print_consequences(tag_id, matrix)
    sys.exit(EXIT_OK)


@cli.command()
@click.pass_context
def report(ctx):
    """Print the whole model: outcomes, tags and the full safeguard matrix."""
    tree = _load_tree(ctx)
    matrix = _load_matrix(ctx)
    paths = dt.enumerate_paths(tree)
    if ctx.obj["format"] == "json":
        record = {
            "tree_version": tree.version,
            "outcomes": [
                {"answers": answers, "tag": tag.value} for answers, tag in paths
            ],
            "tags": [tag_metadata(t).to_json() for t in TagId],
            "matrix": {t.value: p.to_json() for t, p in matrix.items()},
        }
        click.echo(json.dumps(record, indent=2))
    else:
        click.echo(f"Decision tree version {tree.version}: {len(paths)} outcomes")
        for answers, tag in paths:
            rendered = ", ".join(f"{k}={'y' if v else 'n'}" for k, v in answers.items())
            click.echo(f"  {tag.value:<7} {rendered}")
        for tag_id in TagId:
            click.echo("")
            _print_consequences(tag_id, matrix)
    sys.exit(EXIT_OK)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
def serve(config_path):
    """Run the repository HTTP service until interrupted."""
    import uvicorn

    from .service.config import load_config
    from .service.http_api import create_app
    from .service.repository import Repository

    try:
        config = load_config(config_path)
        repository = Repository.from_config(config)
    except Exception as exc:
        click.echo(f"cannot start service: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    app = create_app(repository)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        click.echo(f"service failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    finally:
        repository.close()
    sys.exit(EXIT_OK)


def main(argv=None):
    try:
        cli(args=argv, standalone_mode=False, obj={})
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(EXIT_ABORTED)
    except click.exceptions.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        sys.exit(EXIT_USAGE)
    except click.exceptions.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)


if __name__ == "__main__":
    main()
