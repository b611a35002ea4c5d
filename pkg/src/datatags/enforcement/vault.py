"""Cryptographic vault: double encryption, key shares, password-protected packages.

Payloads for every tag above blue are sealed under two independent
authenticated layers with independent random keys and nonces; the key
shares go to custodians chosen by the tag's key-custody scheme, so for
split-custody tags no single keystore can decrypt anything. Download
packages wrap plaintext under a key derived from a requester-chosen
password with a memory-hard KDF (scrypt); the password itself is never
stored anywhere.

On-disk container (all multi-byte integers little-endian)::

    b"DTAG1" | u16 len + algorithm_id | u16 len + dataset_id
            | u8 len + inner_nonce | u8 len + outer_nonce
            | u64 len + ciphertext

Download package container::

    b"DPKG1" | u16 len + algorithm_id | u16 len + dataset_id
            | u16 len + salt | u32 n | u32 r | u32 p
            | u8 len + nonce | u64 len + ciphertext
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from enum import Enum

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM, ChaCha20Poly1305

from ..policy_matrix import HandlingPolicy, KeyScheme
from ..taxonomy import TagId
from .access import PolicyMismatchError, UnknownTagError

VAULT_MAGIC = b"DTAG1"
PACKAGE_MAGIC = b"DPKG1"
TAG_SIZE = 16
MIN_PASSWORD_LENGTH = 12

SCRYPT_N = 2**14
SCRYPT_R = 8
SCRYPT_P = 1
_SCRYPT_MAXMEM = 64 * 1024 * 1024


class VaultError(Exception):
    """Base class for vault failures."""


class EntropyFailure(VaultError):
    pass


class AuthFailure(VaultError):
    def __init__(self, layer: str):
        super().__init__(f"authenticated decryption failed at the {layer} layer")
        self.layer = layer


class ShareMismatch(VaultError):
    pass


class WeakPassword(VaultError):
    def __init__(self):
        super().__init__(f"password must be at least {MIN_PASSWORD_LENGTH} characters")


class WrongPassword(VaultError):
    def __init__(self):
        super().__init__("package does not open with that password")


class ContainerFormatError(VaultError):
    pass


class UnknownAlgorithm(VaultError):
    def __init__(self, algorithm_id: str):
        super().__init__(f"unknown cipher: {algorithm_id!r}")


@dataclass(frozen=True)
class AeadSpec:
    key_size: int
    nonce_size: int
    cipher: type

    def seal(self, key: bytes, nonce: bytes, data: bytes, aad: bytes) -> bytes:
        return self.cipher(key).encrypt(nonce, data, aad)

    def open(self, key: bytes, nonce: bytes, data: bytes, aad: bytes) -> bytes:
        return self.cipher(key).decrypt(nonce, data, aad)


DEFAULT_ALGORITHM = "chacha20poly1305"

ALGORITHMS: dict[str, AeadSpec] = {
    "chacha20poly1305": AeadSpec(key_size=32, nonce_size=12, cipher=ChaCha20Poly1305),
    "aes-256-gcm": AeadSpec(key_size=32, nonce_size=12, cipher=AESGCM),
}


def algorithm(algorithm_id: str) -> AeadSpec:
    try:
        return ALGORITHMS[algorithm_id]
    except KeyError:
        raise UnknownAlgorithm(algorithm_id) from None


def _random_bytes(n: int) -> bytes:
    try:
        return os.urandom(n)
    except OSError as exc:
        raise EntropyFailure(f"operating system RNG unavailable: {exc}") from exc


class ShareRole(str, Enum):
    INNER = "inner"
    OUTER = "outer"


class Custodian(str, Enum):
    REPOSITORY_KEYSTORE = "repository-keystore"
    TRUSTED_THIRD_PARTY = "trusted-third-party"


@dataclass(frozen=True)
class KeyShare:
    """One layer's key, addressed to the keystore that must hold it.

    key_material must never land in the dataset store's persistence
    namespace; custodian keystores live elsewhere (or remotely).
    """

    dataset_id: str
    which: ShareRole
    custodian: Custodian
    key_material: bytes
    algorithm_id: str = DEFAULT_ALGORITHM

    def to_json(self) -> dict[str, str]:
        import base64

        return {
            "dataset_id": self.dataset_id,
            "which": self.which.value,
            "custodian": self.custodian.value,
            "key": base64.b64encode(self.key_material).decode("ascii"),
            "algorithm_id": self.algorithm_id,
        }

    @classmethod
    def from_json(cls, data: dict) -> "KeyShare":
        import base64

        return cls(
            dataset_id=data["dataset_id"],
            which=ShareRole(data["which"]),
            custodian=Custodian(data["custodian"]),
            key_material=base64.b64decode(data["key"]),
            algorithm_id=data.get("algorithm_id", DEFAULT_ALGORITHM),
        )


@dataclass(frozen=True)
class EncryptedObject:
    """A doubly sealed payload; the authentication tags ride inside each layer."""

    dataset_id: str
    algorithm_id: str
    inner_nonce: bytes
    outer_nonce: bytes
    ciphertext: bytes

    layer_count = 2

    @property
    def outer_tag(self) -> bytes:
        return self.ciphertext[-TAG_SIZE:]

    def to_bytes(self) -> bytes:
        alg = self.algorithm_id.encode("utf-8")
        dsid = self.dataset_id.encode("utf-8")
        return b"".join(
            (
                VAULT_MAGIC,
                struct.pack("<H", len(alg)),
                alg,
                struct.pack("<H", len(dsid)),
                dsid,
                struct.pack("<B", len(self.inner_nonce)),
                self.inner_nonce,
                struct.pack("<B", len(self.outer_nonce)),
                self.outer_nonce,
                struct.pack("<Q", len(self.ciphertext)),
                self.ciphertext,
            )
        )

    @classmethod
    def from_bytes(cls, blob: bytes) -> "EncryptedObject":
        reader = _Reader(blob)
        if reader.take(len(VAULT_MAGIC)) != VAULT_MAGIC:
            raise ContainerFormatError("bad magic; not a vault container")
        alg = reader.take(reader.u16()).decode("utf-8")
        dsid = reader.take(reader.u16()).decode("utf-8")
        inner_nonce = reader.take(reader.u8())
        outer_nonce = reader.take(reader.u8())
        ciphertext = reader.take(reader.u64())
        reader.expect_end()
        return cls(
            dataset_id=dsid,
            algorithm_id=alg,
            inner_nonce=inner_nonce,
            outer_nonce=outer_nonce,
            ciphertext=ciphertext,
        )


@dataclass(frozen=True)
class PlainStoredObject:
    """Blue-tag storage: no encryption, no keys."""

    dataset_id: str
    payload: bytes


class _Reader:
    def __init__(self, blob: bytes):
        self._blob = blob
        self._pos = 0

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._blob):
            raise ContainerFormatError("container truncated")
        out = self._blob[self._pos : self._pos + n]
        self._pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<L", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def expect_end(self):
        if self._pos != len(self._blob):
            raise ContainerFormatError("trailing bytes after container")


def _layer_aad(dataset_id: str, layer: ShareRole) -> bytes:
    return b"DTAG1:%s:%s" % (layer.value.encode("ascii"), dataset_id.encode("utf-8"))


def custodians_for(scheme: KeyScheme) -> tuple[Custodian, Custodian]:
    """(inner, outer) custodians for a key-custody scheme."""
    if scheme is KeyScheme.NO_KEYS:
        raise ValueError("no custodians: the scheme stores plaintext")
    if scheme is KeyScheme.SPLIT_REPO_PLUS_TRUSTED_THIRD_PARTY:
        return (Custodian.REPOSITORY_KEYSTORE, Custodian.TRUSTED_THIRD_PARTY)
    return (Custodian.REPOSITORY_KEYSTORE, Custodian.REPOSITORY_KEYSTORE)


def encrypt_with_keys(
    plaintext: bytes,
    dataset_id: str,
    inner_key: bytes,
    outer_key: bytes,
    inner_nonce: bytes,
    outer_nonce: bytes,
    algorithm_id: str = DEFAULT_ALGORITHM,
) -> EncryptedObject:
    """Deterministic double seal; callers supply fresh key material."""
    if inner_nonce == outer_nonce:
        raise ValueError("inner and outer nonces must differ")
    spec = algorithm(algorithm_id)
    inner_blob = spec.seal(inner_key, inner_nonce, plaintext, _layer_aad(dataset_id, ShareRole.INNER))
    ciphertext = spec.seal(outer_key, outer_nonce, inner_blob, _layer_aad(dataset_id, ShareRole.OUTER))
    return EncryptedObject(
        dataset_id=dataset_id,
        algorithm_id=algorithm_id,
        inner_nonce=inner_nonce,
        outer_nonce=outer_nonce,
        ciphertext=ciphertext,
    )


def encrypt_dataset(
    plaintext: bytes,
    tag: TagId,
    policy: HandlingPolicy,
    *,
    dataset_id: str,
    algorithm_id: str = DEFAULT_ALGORITHM,
) -> PlainStoredObject | tuple[EncryptedObject, KeyShare, KeyShare]:
    """Seal a payload per the tag's policy.

    Blue stores plaintext and returns no keys. Everything else gets two
    independently generated random keys; custodians follow the policy's
    key-custody scheme (split tags send the outer share to the trusted
    third party).
    """
    if tag is TagId.NOTAG:
        raise UnknownTagError()
    if policy.tag is not tag:
        raise PolicyMismatchError(tag, policy.tag)

    if policy.keys is KeyScheme.NO_KEYS:
        return PlainStoredObject(dataset_id=dataset_id, payload=plaintext)

    spec = algorithm(algorithm_id)
    inner_key = _random_bytes(spec.key_size)
    outer_key = _random_bytes(spec.key_size)
    inner_nonce = _random_bytes(spec.nonce_size)
    outer_nonce = _random_bytes(spec.nonce_size)
    while outer_nonce == inner_nonce:
        outer_nonce = _random_bytes(spec.nonce_size)

    obj = encrypt_with_keys(
        plaintext, dataset_id, inner_key, outer_key, inner_nonce, outer_nonce, algorithm_id
    )
    inner_custodian, outer_custodian = custodians_for(policy.keys)
    inner_share = KeyShare(dataset_id, ShareRole.INNER, inner_custodian, inner_key, algorithm_id)
    outer_share = KeyShare(dataset_id, ShareRole.OUTER, outer_custodian, outer_key, algorithm_id)
    return obj, inner_share, outer_share


def decrypt_dataset(obj: EncryptedObject, inner: KeyShare, outer: KeyShare) -> bytes:
    """Open both layers; fails closed on any id, key, nonce or tag mismatch."""
    for share in (inner, outer):
        if share.dataset_id != obj.dataset_id:
            raise ShareMismatch(
                f"share for {share.dataset_id!r} offered against object {obj.dataset_id!r}"
            )
        if share.algorithm_id != obj.algorithm_id:
            raise ShareMismatch("share and object disagree on the cipher")

    spec = algorithm(obj.algorithm_id)
    try:
        inner_blob = spec.open(
            outer.key_material,
            obj.outer_nonce,
            obj.ciphertext,
            _layer_aad(obj.dataset_id, ShareRole.OUTER),
        )
    except InvalidTag:
        raise AuthFailure("outer") from None
    try:
        return spec.open(
            inner.key_material,
            obj.inner_nonce,
            inner_blob,
            _layer_aad(obj.dataset_id, ShareRole.INNER),
        )
    except InvalidTag:
        raise AuthFailure("inner") from None


@dataclass(frozen=True)
class PackageHeader:
    algorithm_id: str
    dataset_id: str
    salt: bytes
    n: int
    r: int
    p: int
    nonce: bytes


@dataclass(frozen=True)
class DownloadPackage:
    """A password-sealed copy of a payload, handed to the requester."""

    dataset_id: str
    container: bytes


def _derive_package_key(password: str, salt: bytes, n: int, r: int, p: int) -> bytes:
    return hashlib.scrypt(
        password.encode("utf-8"),
        salt=salt,
        n=n,
        r=r,
        p=p,
        dklen=32,
        maxmem=_SCRYPT_MAXMEM,
    )


def package_download(
    plaintext: bytes,
    password: str,
    *,
    dataset_id: str = "",
    algorithm_id: str = DEFAULT_ALGORITHM,
) -> DownloadPackage:
    """Seal a payload under a requester-chosen password (scrypt + AEAD).

    The salt is fresh per package and the derivation parameters ride in the
    container header, so the package is self-describing; the password is
    used once for key derivation and never persisted.
    """
    if len(password) < MIN_PASSWORD_LENGTH:
        raise WeakPassword()
    spec = algorithm(algorithm_id)
    salt = _random_bytes(16)
    nonce = _random_bytes(spec.nonce_size)
    key = _derive_package_key(password, salt, SCRYPT_N, SCRYPT_R, SCRYPT_P)
    sealed = spec.seal(key, nonce, plaintext, PACKAGE_MAGIC + dataset_id.encode("utf-8"))

    alg = algorithm_id.encode("utf-8")
    dsid = dataset_id.encode("utf-8")
    container = b"".join(
        (
            PACKAGE_MAGIC,
            struct.pack("<H", len(alg)),
            alg,
            struct.pack("<H", len(dsid)),
            dsid,
            struct.pack("<H", len(salt)),
            salt,
            struct.pack("<L", SCRYPT_N),
            struct.pack("<L", SCRYPT_R),
            struct.pack("<L", SCRYPT_P),
            struct.pack("<B", len(nonce)),
            nonce,
            struct.pack("<Q", len(sealed)),
            sealed,
        )
    )
    return DownloadPackage(dataset_id=dataset_id, container=container)


def parse_package_header(container: bytes) -> PackageHeader:
    header, _ = _split_package(container)
    return header


def _split_package(container: bytes) -> tuple[PackageHeader, bytes]:
    reader = _Reader(container)
    if reader.take(len(PACKAGE_MAGIC)) != PACKAGE_MAGIC:
        raise ContainerFormatError("bad magic; not a download package")
    alg = reader.take(reader.u16()).decode("utf-8")
    dsid = reader.take(reader.u16()).decode("utf-8")
    salt = reader.take(reader.u16())
    n = reader.u32()
    r = reader.u32()
    p = reader.u32()
    nonce = reader.take(reader.u8())
    sealed = reader.take(reader.u64())
    reader.expect_end()
    return PackageHeader(alg, dsid, salt, n, r, p, nonce), sealed


def open_package(container: bytes, password: str) -> bytes:
    """Open a download package; raises WrongPassword on any mismatch."""
    header, sealed = _split_package(container)
    spec = algorithm(header.algorithm_id)
    key = _derive_package_key(password, header.salt, header.n, header.r, header.p)
    try:
        return spec.open(
            key, header.nonce, sealed, PACKAGE_MAGIC + header.dataset_id.encode("utf-8")
        )
    except InvalidTag:
        raise WrongPassword() from None
