"""Ownership, initiation, and governance-separation checks.

These run against reconstructed on-log data, not live registry state: a
verifier holding only the public event log and a key can run every check
here. Producing the key reveals it; that is inherent to the scheme, which
trades zero-knowledge for having no verifier infrastructure at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .commitments import AnchorId, Digest32, OwnershipToken, token_commitment, tree_id
from .errors import GovernanceAnchor, SeparationViolation, UnknownRoot
from .records import AnchorRecord
from .reconstruction import Forest
from .taxonomy import ArtifactClass


def verify_ownership(token: OwnershipToken, root_id: AnchorId, claimed_tree_id: Digest32) -> bool:
    """True iff the key binds to the root id exactly as the tree identity claims."""
    return tree_id(token, root_id) == claimed_tree_id


def verify_initiation(token: OwnershipToken, anchor_id: AnchorId, claimed_commitment: Digest32) -> bool:
    """True iff the key reproduces this anchor's initiation commitment.

    Zero commitments identify governance anchors, which carry no initiation
    proof by design; asking about one is a category error, not a False.
    """
    if claimed_commitment.is_zero:
        raise GovernanceAnchor("zero commitment: governance anchors carry no initiation proof")
    return token_commitment(token, anchor_id) == claimed_commitment


def is_governance(record: AnchorRecord) -> bool:
    """Zero commitment and governance type must travel together.

    A record where they disagree did not come out of the registry; that is
    a corrupted log and is reported as such rather than guessed about.
    """
    zero = record.token_commitment.is_zero
    governance_typed = record.artifact_class is ArtifactClass.GOVERNANCE
    if zero != governance_typed:
        raise SeparationViolation(
            f"{record.ar_id.value!r}: commitment zero={zero} but "
            f"artifact class is {record.artifact_class.value}")
    return zero


@dataclass(frozen=True, slots=True)
class AuthResult:
    """Outcome of authenticate_tree.

    ``authenticated`` holds iff the root check and every per-anchor check
    passed; governance anchors are listed separately and take no part in
    the verdict.
    """

    authenticated: bool
    root_check: bool
    anchor_checks: Mapping[str, bool]
    governance_skipped: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "authenticated": self.authenticated,
            "rootCheck": self.root_check,
            "anchorChecks": dict(self.anchor_checks),
            "governanceSkipped": list(self.governance_skipped),
        }


def authenticate_tree(token: OwnershipToken, root_id: AnchorId, forest: Forest) -> AuthResult:
    """The unified proof: one key must satisfy the tree identity and every
    content anchor's commitment at once.

    Raises UnknownRoot when no component of the forest is rooted at
    ``root_id``, and SeparationViolation when the tree contains a record a
    real registry could never have emitted.
    """
    tree = forest.roots.get(root_id.value)
    if tree is None:
        raise UnknownRoot(f"no tree rooted at {root_id.value!r}")
    root_check = verify_ownership(token, root_id, tree.tree_id)
    anchor_checks: dict[str, bool] = {}
    governance_skipped: list[str] = []
    for ar_id, record in tree.nodes.items():
        if is_governance(record):
            governance_skipped.append(ar_id)
            continue
        anchor_checks[ar_id] = verify_initiation(
            token, record.ar_id, record.token_commitment)
    authenticated = root_check and all(anchor_checks.values())
    return AuthResult(
        authenticated=authenticated,
        root_check=root_check,
        anchor_checks=anchor_checks,
        governance_skipped=tuple(governance_skipped),
    )


class Verdict(Enum):
    SELF_INCRIMINATING = "SELF_INCRIMINATING"
    DISMISSED = "DISMISSED"


def adjudicate_accusation(token: OwnershipToken | None, record: AnchorRecord) -> Verdict:
    """Settle a claim that the operator registered this anchor unilaterally.

    Either the accuser produces a key that verifies, proving they initiated
    the registration themselves, or the claim amounts to asserting the hash
    is broken and is dismissed. Refusal and a non-verifying key land in the
    same bucket; there is no third outcome.
    """
    if record.token_commitment.is_zero:
        raise GovernanceAnchor("governance anchors are operator actions; nothing to adjudicate")
    if token is not None and verify_initiation(token, record.ar_id, record.token_commitment):
        return Verdict.SELF_INCRIMINATING
    return Verdict.DISMISSED
