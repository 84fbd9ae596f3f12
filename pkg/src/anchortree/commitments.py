"""Client-side cryptography: ownership tokens and the dual-layer commitments.

The two commitments are the same keccak-256 construction applied at two
levels: ``tree_id`` binds a secret key to the root anchor id (the tree
identity) and ``token_commitment`` binds the same key to each individual
anchor id (the per-anchor initiation proof). The preimage is the raw 32 key
bytes followed by the UTF-8 bytes of the identifier, with no separator;
because the key is fixed-width the encoding is injective.

Nothing in here ever touches registry state. The registry receives digests
only; the key stays with the client.
"""

from __future__ import annotations

import re
import secrets
from dataclasses import dataclass

from .errors import InvalidEntropy
from .keccak import keccak256

_HEX64 = re.compile(r"[0-9a-f]{64}\Z")


@dataclass(frozen=True, slots=True)
class Digest32:
    """A 32-byte digest. The all-zero value is the governance sentinel."""

    value: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.value, bytes) or len(self.value) != 32:
            raise ValueError("Digest32 requires exactly 32 bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Digest32":
        """Parse the canonical rendering: 64 lowercase hex chars, no prefix."""
        if not isinstance(text, str) or not _HEX64.match(text):
            raise ValueError(f"not a 64-char lowercase hex digest: {text!r}")
        return cls(bytes.fromhex(text))

    @property
    def hex(self) -> str:
        return self.value.hex()

    @property
    def is_zero(self) -> bool:
        return self.value == b"\x00" * 32


#: Reserved sentinel: governance anchors carry this instead of a commitment.
ZERO_DIGEST = Digest32(b"\x00" * 32)


@dataclass(frozen=True, slots=True)
class AnchorId:
    """A globally unique artifact identifier: non-empty ASCII, at most 128 bytes."""

    value: str

    def __post_init__(self) -> None:
        if not isinstance(self.value, str) or not self.value:
            raise ValueError("anchor id must be a non-empty string")
        if not self.value.isascii():
            raise ValueError(f"anchor id must be ASCII: {self.value!r}")
        if len(self.value) > 128:
            raise ValueError("anchor id longer than 128 bytes")


@dataclass(frozen=True, slots=True)
class OwnershipToken:
    """The 256-bit client-side secret. Never handed to registry code."""

    key: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.key, bytes) or len(self.key) != 32:
            raise ValueError("ownership token requires exactly 32 key bytes")

    @classmethod
    def from_hex(cls, text: str) -> "OwnershipToken":
        if not isinstance(text, str) or not _HEX64.match(text):
            raise ValueError("ownership token hex must be 64 lowercase hex chars")
        return cls(bytes.fromhex(text))

    @property
    def hex(self) -> str:
        return self.key.hex()

    def __repr__(self) -> str:  # keep the secret out of logs and tracebacks
        return "OwnershipToken(<secret>)"


def keygen(entropy: bytes) -> OwnershipToken:
    """Derive a token as keccak256(entropy).

    The caller supplies the 32 entropy bytes so tests can be reproducible;
    production callers should use :func:`generate_token`.
    """
    if not isinstance(entropy, bytes) or len(entropy) != 32:
        raise InvalidEntropy("entropy must be exactly 32 bytes")
    return OwnershipToken(keccak256(entropy))


def generate_token() -> OwnershipToken:
    """Derive a token from fresh OS CSPRNG entropy."""
    return keygen(secrets.token_bytes(32))


def tree_id(token: OwnershipToken, root_id: AnchorId) -> Digest32:
    """Tree identity commitment: keccak256(key || utf8(root_id))."""
    return Digest32(keccak256(token.key + root_id.value.encode("utf-8")))


def token_commitment(token: OwnershipToken, anchor_id: AnchorId) -> Digest32:
    """Per-anchor initiation commitment: keccak256(key || utf8(anchor_id)).

    Same construction as :func:`tree_id`; applied to the root id they are
    identical, which is what lets one key prove ownership and initiation at
    once. The astronomically unlikely all-zero output is returned as-is and
    left for the registry to reject.
    """
    return Digest32(keccak256(token.key + anchor_id.value.encode("utf-8")))
