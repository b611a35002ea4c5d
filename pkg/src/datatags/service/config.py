"""Service configuration: one JSON file naming the stores, tree, matrix and listen address.

Relative paths resolve against the config file's own directory, so a config
can travel with its data. Example::

    {"data_dir": "data",
     "repo_keystore_dir": "keys/repository",
     "escrow_dir": "keys/escrow",
     "tree_path": "tree.json",
     "matrix_path": "matrix.json",
     "listen": "127.0.0.1:8100",
     "view": {"lines_per_page": 40, "session_byte_cap": 262144}}

``escrow_url`` may replace ``escrow_dir`` to hold the outer key shares at a
remote trusted third party instead of a local directory. ``tree_path`` and
``matrix_path`` are optional; the packaged defaults apply when absent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..enforcement.view import DEFAULT_LINES_PER_PAGE, DEFAULT_SESSION_BYTE_CAP


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path
    repo_keystore_dir: Path
    escrow_dir: Path | None = None
    escrow_url: str | None = None
    tree_path: Path | None = None
    matrix_path: Path | None = None
    host: str = "127.0.0.1"
    port: int = 8100
    view_lines_per_page: int = DEFAULT_LINES_PER_PAGE
    view_session_byte_cap: int = DEFAULT_SESSION_BYTE_CAP

    def __post_init__(self):
        if self.escrow_dir is None and self.escrow_url is None:
            raise ConfigError("config needs either escrow_dir or escrow_url")


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")

    base = path.resolve().parent
    try:
        data_dir = _resolve(base, data["data_dir"])
        repo_keystore_dir = _resolve(base, data["repo_keystore_dir"])
    except KeyError as exc:
        raise ConfigError(f"config is missing {exc.args[0]!r}") from None

    escrow_dir = _resolve(base, data["escrow_dir"]) if data.get("escrow_dir") else None
    escrow_url = data.get("escrow_url") or None

    listen = str(data.get("listen", "127.0.0.1:8100"))
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise ConfigError(f"listen must look like host:port, got {listen!r}")

    view = data.get("view") or {}
    return ServiceConfig(
        data_dir=data_dir,
        repo_keystore_dir=repo_keystore_dir,
        escrow_dir=escrow_dir,
        escrow_url=escrow_url,
        tree_path=_resolve(base, data["tree_path"]) if data.get("tree_path") else None,
        matrix_path=_resolve(base, data["matrix_path"]) if data.get("matrix_path") else None,
        host=host,
        port=int(port_text),
        view_lines_per_page=int(view.get("lines_per_page", DEFAULT_LINES_PER_PAGE)),
        view_session_byte_cap=int(view.get("session_byte_cap", DEFAULT_SESSION_BYTE_CAP)),
    )
