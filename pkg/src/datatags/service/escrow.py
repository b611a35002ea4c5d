"""A minimal trusted-third-party escrow service holding outer key shares.

Run by a different authority than the repository; the repository talks to
it through HttpEscrowKeystore. Shares are stored in a directory on the
escrow side, so neither party's disk ever holds both layers' keys for
split-custody tags.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Body, FastAPI, HTTPException

from ..enforcement.vault import KeyShare, ShareRole
from .keystores import DirectoryKeystore, ShareNotFound


def create_escrow_app(directory: str | Path) -> FastAPI:
    store = DirectoryKeystore(directory)
    app = FastAPI(title="datatags escrow", docs_url=None, redoc_url=None)

    @app.put("/shares/{dataset_id}/{which}")
    def put_share(dataset_id: str, which: str, body: dict = Body(...)):
        try:
            role = ShareRole(which)
        except ValueError:
            raise HTTPException(status_code=404, detail="unknown share role")
        share = KeyShare.from_json(body)
        if share.dataset_id != dataset_id or share.which is not role:
            raise HTTPException(status_code=400, detail="share does not match the path")
        store.put(share)
        return {"stored": True}

    @app.get("/shares/{dataset_id}/{which}")
    def get_share(dataset_id: str, which: str):
        try:
            role = ShareRole(which)
        except ValueError:
            raise HTTPException(status_code=404, detail="unknown share role")
        try:
            return store.get(dataset_id, role).to_json()
        except ShareNotFound:
            raise HTTPException(status_code=404, detail="share not found") from None

    return app
