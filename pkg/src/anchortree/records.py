"""Registration domain records shared by the registry, the event log codec,
and reconstruction."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .commitments import AnchorId, Digest32
from .errors import BadManifestHash, MalformedTreeId
from .taxonomy import ArtifactClass, ArtifactType

_HEX40 = re.compile(r"[0-9a-f]{40}\Z")
_HEX64 = re.compile(r"[0-9a-f]{64}\Z")


@dataclass(frozen=True, slots=True)
class OperatorId:
    """A 20-byte wallet address, canonically 40 lowercase hex chars."""

    address: str

    def __post_init__(self) -> None:
        if not isinstance(self.address, str) or not _HEX40.match(self.address):
            raise ValueError(f"operator address must be 40 lowercase hex chars: {self.address!r}")

    @classmethod
    def from_hex(cls, text: str) -> "OperatorId":
        """Accept an optional 0x prefix and mixed case; normalize."""
        if text.lower().startswith("0x"):
            text = text[2:]
        return cls(text.lower())

    @classmethod
    def from_bytes(cls, raw: bytes) -> "OperatorId":
        if len(raw) != 20:
            raise ValueError("operator address requires exactly 20 bytes")
        return cls(raw.hex())


@dataclass(frozen=True, slots=True)
class RegistrationRequest:
    """What a client submits (via the operator) to register one anchor.

    ``parent_ar_id`` is None for a root registration. ``tree_id_plain`` is
    the hex tree identity the client claims: the registry checks it against
    the parent for children and stores it verbatim for roots (it cannot
    recompute it, since it never sees the key; verifying the claim is the
    verifier's job).
    """

    ar_id: AnchorId
    artifact_type: ArtifactType
    manifest_hash: str
    tree_id_plain: str
    token_commitment: Digest32
    parent_ar_id: AnchorId | None = None
    descriptor: str = ""
    title: str = ""
    author: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.manifest_hash, str) or not _HEX64.match(self.manifest_hash):
            raise BadManifestHash(f"manifest hash must be 64 lowercase hex chars: {self.manifest_hash!r}")
        if not isinstance(self.tree_id_plain, str) or not _HEX64.match(self.tree_id_plain):
            raise MalformedTreeId(f"tree id must be 64 lowercase hex chars: {self.tree_id_plain!r}")

    @property
    def ar_id_plain(self) -> str:
        return self.ar_id.value

    @property
    def is_root(self) -> bool:
        return self.parent_ar_id is None


@dataclass(frozen=True, slots=True)
class AnchorRecord:
    """One node of a provenance tree, as held by the registry and as
    rebuilt from the event log."""

    ar_id: AnchorId
    artifact_type: ArtifactType
    manifest_hash: str
    tree_id_plain: str
    token_commitment: Digest32
    parent_ar_id: AnchorId | None
    descriptor: str
    title: str
    author: str
    registrant: OperatorId
    block_number: int
    log_index: int
    tree_id: Digest32

    @property
    def ar_id_plain(self) -> str:
        return self.ar_id.value

    @property
    def is_root(self) -> bool:
        return self.parent_ar_id is None

    @property
    def artifact_class(self) -> ArtifactClass:
        return self.artifact_type.artifact_class

    @property
    def position(self) -> tuple[int, int]:
        """Total registration order: (block_number, log_index)."""
        return (self.block_number, self.log_index)


# Gas model for the commitment scheme, per registration. The figures are a
# fixed accounting model: one cold SSTORE for the commitment slot, one zero
# check, one extra 32-byte topic in the event. O(1) in registry size.
GAS_STORE_COMMITMENT = 20_000
GAS_ZERO_CHECK = 3
GAS_EVENT_EMISSION = 375
GAS_TOTAL_ADDED = 20_378


@dataclass(frozen=True, slots=True)
class GasReport:
    store_commitment: int = GAS_STORE_COMMITMENT
    zero_check: int = GAS_ZERO_CHECK
    event_emission: int = GAS_EVENT_EMISSION
    total_added: int = field(default=GAS_TOTAL_ADDED)

    def __post_init__(self) -> None:
        if self.total_added != self.store_commitment + self.zero_check + self.event_emission:
            raise ValueError("gas report components do not sum to total_added")


def gas_estimate(kind: str) -> GasReport:
    """Fixed per-registration gas model; identical for both kinds.

    Whether a governance registration pays the commitment store for its
    sentinel write is unresolved upstream, so both kinds report the content
    path's table. The report is constant regardless of registry size.
    """
    if kind not in ("content", "governance"):
        raise ValueError(f"kind must be 'content' or 'governance', got {kind!r}")
    return GasReport()
