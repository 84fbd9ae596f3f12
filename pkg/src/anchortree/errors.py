"""Exception hierarchy. One class per rejection so callers can map errors
to exit codes / revert reasons without string matching."""

from __future__ import annotations


class AnchorTreeError(Exception):
    """Base class for every error raised by this package."""


# --- commitments -----------------------------------------------------------

class InvalidEntropy(AnchorTreeError):
    """keygen entropy is not exactly 32 bytes."""


# --- registry (simulated revert reasons) -----------------------------------

class RegistryError(AnchorTreeError):
    """Base class for registration rejections."""


class NoOperators(RegistryError):
    """Registry constructed with an empty operator whitelist."""


class NotOperator(RegistryError):
    """Caller is not on the operator whitelist."""


class MissingTokenCommitment(RegistryError):
    """Content registration carried the all-zero commitment sentinel."""


class DuplicateArtifact(RegistryError):
    """The anchor id is already registered."""


class UnreservedId(RegistryError):
    """The anchor id never passed the reservation endpoint."""


class UnknownParent(RegistryError):
    """parent_ar_id names an anchor that is not registered."""


class UnknownTarget(RegistryError):
    """Target anchor of a governance/targeted registration is not registered."""


class TreeIdMismatch(RegistryError):
    """Child registration declared a tree id different from its parent's."""


class MalformedTreeId(TreeIdMismatch):
    """tree_id_plain does not parse as 64 lowercase hex chars."""


class BadManifestHash(RegistryError):
    """manifest_hash is not 64 lowercase hex chars."""


class WrongArtifactClass(RegistryError):
    """Artifact type not admitted on this registration path."""


class NoAccountAnchor(RegistryError):
    """Gated registration referenced a missing or non-ACCOUNT anchor."""


class AccountTreeMismatch(RegistryError):
    """Gated registration's tree differs from its ACCOUNT anchor's tree."""


# --- event log -------------------------------------------------------------

class MalformedLine(AnchorTreeError):
    """A serialized event line is structurally invalid."""


class TopicMismatch(AnchorTreeError):
    """An indexed topic does not hash-match its plain field (tampered export)."""


# --- reconstruction --------------------------------------------------------

class ReconstructionError(AnchorTreeError):
    """Base class for event-log reconstruction failures."""


class OrphanParent(ReconstructionError):
    """A child event appeared before (or without) its parent."""


class DuplicateId(ReconstructionError):
    """Two events carry the same anchor id (corrupt export)."""


class CycleDetected(ReconstructionError):
    """Defensive: the children relation formed a cycle."""


class UnknownId(ReconstructionError):
    """descendants() asked about an anchor the tree does not contain."""


class UnknownTree(ReconstructionError):
    """priority() asked about a tree id the forest does not contain."""


# --- verification ----------------------------------------------------------

class GovernanceAnchor(AnchorTreeError):
    """Initiation check requested for a zero-commitment (governance) anchor."""


class SeparationViolation(AnchorTreeError):
    """Zero-commitment/governance biconditional broken: corrupted record."""


class UnknownRoot(AnchorTreeError):
    """authenticate_tree asked for a root id absent from the forest."""


# --- poisoning simulator ----------------------------------------------------

class UnknownMechanism(AnchorTreeError):
    """necessity_drill asked for an unrecognized closure mechanism."""
