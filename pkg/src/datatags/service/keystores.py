"""Key-share custody backends: a local directory or a remote escrow endpoint.

Keystores live outside the dataset store's persistence namespace by
construction; the repository refuses to start otherwise. Shares are JSON
records named ``{dataset_id}.{inner|outer}.json``.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from pathlib import Path
from typing import Protocol

from ..enforcement.vault import KeyShare, ShareRole


class KeystoreError(Exception):
    pass


class ShareNotFound(KeystoreError):
    def __init__(self, dataset_id: str, which: ShareRole):
        super().__init__(f"no {which.value} share for dataset {dataset_id!r}")


class Keystore(Protocol):
    def put(self, share: KeyShare) -> None: ...

    def get(self, dataset_id: str, which: ShareRole) -> KeyShare: ...


class DirectoryKeystore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, dataset_id: str, which: ShareRole) -> Path:
        if "/" in dataset_id or "\\" in dataset_id or dataset_id in ("", ".", ".."):
            raise KeystoreError(f"unsafe dataset id: {dataset_id!r}")
        return self.directory / f"{dataset_id}.{which.value}.json"

    def put(self, share: KeyShare) -> None:
        path = self._path(share.dataset_id, share.which)
        path.write_text(json.dumps(share.to_json(), indent=2), encoding="utf-8")

    def get(self, dataset_id: str, which: ShareRole) -> KeyShare:
        path = self._path(dataset_id, which)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ShareNotFound(dataset_id, which) from None
        return KeyShare.from_json(data)


class HttpEscrowKeystore:
    """Client for a trusted-third-party escrow endpoint.

    Protocol: ``PUT /shares/{dataset_id}/{which}`` with the share record as
    JSON body, ``GET`` on the same path to retrieve it. See
    ``datatags.service.escrow.create_escrow_app`` for a matching server.
    """

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def _url(self, dataset_id: str, which: ShareRole) -> str:
        return f"{self.base_url}/shares/{dataset_id}/{which.value}"

    def put(self, share: KeyShare) -> None:
        body = json.dumps(share.to_json()).encode("utf-8")
        request = urllib.request.Request(
            self._url(share.dataset_id, share.which),
            data=body,
            method="PUT",
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                response.read()
        except urllib.error.URLError as exc:
            raise KeystoreError(f"escrow endpoint unreachable: {exc}") from exc

    def get(self, dataset_id: str, which: ShareRole) -> KeyShare:
        request = urllib.request.Request(self._url(dataset_id, which))
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                data = json.loads(response.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            if exc.code == 404:
                raise ShareNotFound(dataset_id, which) from None
            raise KeystoreError(f"escrow endpoint error: {exc}") from exc
        except urllib.error.URLError as exc:
            raise KeystoreError(f"escrow endpoint unreachable: {exc}") from exc
        return KeyShare.from_json(data)
