from __future__ import annotations

import base64

import pytest
from fastapi.testclient import TestClient

from datatags.service.http_api import create_app
from datatags.service.keystores import DirectoryKeystore
from datatags.service.repository import Repository, otp_code

# Answer sheets reaching each of the seven outcomes, one per tag.
ANSWERS = {
    "blue": {"personal_data": False},
    "green": {
        "personal_data": True,
        "special_category": False,
        "reuse_consent_or_information": True,
    },
    "yellow": {
        "personal_data": True,
        "special_category": False,
        "reuse_consent_or_information": False,
    },
    "orange": {
        "personal_data": True,
        "special_category": True,
        "health_or_genetic": True,
        "specialty_scoped_consent": True,
    },
    "red": {
        "personal_data": True,
        "special_category": True,
        "health_or_genetic": True,
        "specialty_scoped_consent": False,
    },
    "purple": {
        "personal_data": True,
        "special_category": True,
        "health_or_genetic": False,
        "area_scoped_consent": True,
    },
    "notag": {
        "personal_data": True,
        "special_category": True,
        "health_or_genetic": False,
        "area_scoped_consent": False,
    },
}

SAMPLE_PAYLOAD = b"participant,score\np01,17\np02,23\np03,11\n"


def make_repository(tmp_path, **kwargs) -> Repository:
    return Repository(
        tmp_path / "data",
        DirectoryKeystore(tmp_path / "repo_keys"),
        DirectoryKeystore(tmp_path / "escrow_keys"),
        **kwargs,
    )


@pytest.fixture
def repo(tmp_path):
    repository = make_repository(tmp_path)
    yield repository
    repository.close()


@pytest.fixture
def client(repo):
    with TestClient(create_app(repo)) as test_client:
        yield test_client


def make_user(repo: Repository, username: str, role: str = "reader", factors: int = 2):
    """Register and log a user in, escalating to the requested factor count."""
    user, otp_secret = repo.register_user(username, f"pw-for-{username}", role)
    session = repo.authenticate(username, f"pw-for-{username}")
    if factors >= 2:
        session = repo.satisfy_factor(session.token, "otp", otp_code(otp_secret, session.token))
    return user, session.token


def deposit_tagged(repo: Repository, token: str, tag: str, payload: bytes = SAMPLE_PAYLOAD, **meta):
    metadata = {"title": f"{tag} dataset", **meta}
    return repo.deposit(token, metadata, payload, answers=ANSWERS[tag])


# -- HTTP helpers ------------------------------------------------------------


def api_user(client: TestClient, username: str, role: str = "reader", factors: int = 2) -> dict:
    created = client.post(
        "/users", json={"username": username, "password": f"pw-for-{username}", "role": role}
    )
    assert created.status_code == 201, created.text
    record = created.json()
    auth = client.post("/auth", json={"username": username, "password": f"pw-for-{username}"})
    assert auth.status_code == 200, auth.text
    token = auth.json()["token"]
    if factors >= 2:
        escalated = client.post(
            "/auth/factor",
            json={"factor": "otp", "proof": otp_code(record["otp_secret"], token)},
            headers=bearer(token),
        )
        assert escalated.status_code == 200, escalated.text
    return {"id": record["id"], "token": token, "otp_secret": record["otp_secret"]}


def bearer(token: str | None) -> dict:
    return {"Authorization": f"Bearer {token}"} if token else {}


def api_deposit(client: TestClient, token: str, tag: str, payload: bytes = SAMPLE_PAYLOAD) -> dict:
    response = client.post(
        "/datasets",
        json={
            "metadata": {"title": f"{tag} dataset"},
            "payload_base64": base64.b64encode(payload).decode(),
            "answers": ANSWERS[tag],
        },
        headers=bearer(token),
    )
    assert response.status_code in (201, 202), response.text
    return response.json()
