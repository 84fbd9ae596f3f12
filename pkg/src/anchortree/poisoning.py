"""Adversarial simulator for the three tree-poisoning attack variants.

Each attack runs as a script against the production registry API (there is
no privileged backdoor) and its runner gathers the evidence that the
matching closure mechanism actually shut the attack down:

  fraudulent root   -> cryptographic priority (distinct identities plus
                       registration order decide legitimacy)
  malicious child   -> governance cascade (VOID hides the subtree at the
                       view layer; nothing on the log changes)
  identity spoofing -> contract enforcement (the gate and the zero-check
                       reject it, and what slips through as data cannot
                       verify under anyone's key)

The necessity drills re-run one variant with exactly one mechanism switched
off (the only test-only toggles in the package) and show the attack then
succeeds in its harmful sense.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .commitments import (
    AnchorId,
    Digest32,
    OwnershipToken,
    ZERO_DIGEST,
    keygen,
    token_commitment,
    tree_id,
)
from .errors import (
    MissingTokenCommitment,
    NotOperator,
    SeparationViolation,
    TreeIdMismatch,
    UnknownMechanism,
)
from .records import OperatorId, RegistrationRequest
from .reconstruction import Forest, ProvenanceTree, priority, reconstruct
from .registry import Registry
from .taxonomy import ArtifactClass
from .verification import AuthResult, authenticate_tree, is_governance, verify_initiation


class Variant(Enum):
    FRAUDULENT_ROOT = "FRAUDULENT_ROOT"
    MALICIOUS_CHILD = "MALICIOUS_CHILD"
    TREE_SPOOFING = "TREE_SPOOFING"


class Mechanism(Enum):
    CRYPTOGRAPHIC_PRIORITY = "CRYPTOGRAPHIC_PRIORITY"
    GOVERNANCE_CASCADE = "GOVERNANCE_CASCADE"
    CONTRACT_ENFORCEMENT = "CONTRACT_ENFORCEMENT"


#: Closure mechanism expected per variant (the summary table).
CLOSURE_TABLE = {
    Variant.FRAUDULENT_ROOT: Mechanism.CRYPTOGRAPHIC_PRIORITY,
    Variant.MALICIOUS_CHILD: Mechanism.GOVERNANCE_CASCADE,
    Variant.TREE_SPOOFING: Mechanism.CONTRACT_ENFORCEMENT,
}


@dataclass
class AttackScenario:
    variant: Variant
    victim_key: OwnershipToken
    adversary_key: OwnershipToken
    victim_root: AnchorId
    operator: OperatorId
    adversary_address: OperatorId  # not on the whitelist
    script: list[str] = field(default_factory=list)


@dataclass
class AttackOutcome:
    variant: Variant
    closed_by: Mechanism
    closed: bool
    evidence: dict[str, object]

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "closedBy": self.closed_by.value,
            "closed": self.closed,
            "evidence": self.evidence,
        }


@dataclass
class DrillReport:
    mechanism: Mechanism
    variant: Variant
    harmful_success: bool
    evidence: dict[str, object]

    def to_json_dict(self) -> dict:
        return {
            "mechanism": self.mechanism.value,
            "variant": self.variant.value,
            "harmfulSuccess": self.harmful_success,
            "evidence": self.evidence,
        }


# --- scenario construction ---------------------------------------------------

def _register_anchor(
    registry: Registry,
    caller: OperatorId,
    key: OwnershipToken,
    type_name: str,
    *,
    manifest: str,
    parent: AnchorId | None = None,
    tree_hex: str | None = None,
    target: AnchorId | None = None,
    title: str = "",
) -> AnchorId:
    """Client-side flow: reserve, commit with the key, register."""
    ar_id = registry.reserve()
    if tree_hex is None:
        if parent is not None:
            tree_hex = registry.registered[parent.value].tree_id_plain
        else:
            tree_hex = tree_id(key, ar_id).hex
    req = RegistrationRequest(
        ar_id=ar_id,
        artifact_type=registry.taxonomy.get(type_name),
        manifest_hash=manifest,
        tree_id_plain=tree_hex,
        token_commitment=token_commitment(key, ar_id),
        parent_ar_id=parent if target is None else None,
        title=title,
    )
    if target is not None:
        registry.register_targeted(caller, req, target)
    else:
        registry.register_content(caller, req)
    return ar_id


def _manifest(rng: random.Random) -> str:
    return f"{rng.getrandbits(256):064x}"


def make_scenario(variant: Variant, *, seed: int = 0) -> tuple[Registry, AttackScenario]:
    """Fresh registry with a registered victim tree and an adversary key.

    Victim tree: a root, two content children, one REVIEW annotation. The
    attack steps run afterwards, against this state.
    """
    rng = random.Random(seed)
    operator = OperatorId(f"{rng.getrandbits(160):040x}")
    adversary_address = OperatorId(f"{rng.getrandbits(160):040x}")
    registry = Registry([operator], seed=rng.getrandbits(64))
    victim_key = keygen(rng.randbytes(32))
    adversary_key = keygen(rng.randbytes(32))

    victim_root = _register_anchor(
        registry, operator, victim_key, "DATASET", manifest=_manifest(rng), title="victim root")
    for i in range(2):
        _register_anchor(
            registry, operator, victim_key, "MODEL",
            manifest=_manifest(rng), parent=victim_root, title=f"victim child {i}")
    registry.register_governance(operator, "REVIEW", victim_root, descriptor="routine review")

    scripts = {
        Variant.FRAUDULENT_ROOT: [
            "register fraudulent root with adversary key",
            "register children under the fraudulent root",
            "compare tree identities and registration order",
            "attempt victim-tree authentication with adversary key",
        ],
        Variant.MALICIOUS_CHILD: [
            "attach malicious child to the victim root (targeted)",
            "grow two grandchildren under the attachment",
            "operator registers VOID on the attachment root",
            "reconstruct and read the suppression view",
        ],
        Variant.TREE_SPOOFING: [
            "attempt direct registration without operator access",
            "attempt registration with a zero commitment",
            "attempt child carrying the victim tree id under own tree",
            "register parentless anchor claiming the victim tree id",
            "run verification over the spoofed claim",
        ],
    }
    scenario = AttackScenario(
        variant=variant,
        victim_key=victim_key,
        adversary_key=adversary_key,
        victim_root=victim_root,
        operator=operator,
        adversary_address=adversary_address,
        script=scripts[variant],
    )
    return registry, scenario


def _auth_snapshot(registry: Registry, key: OwnershipToken, root: AnchorId) -> AuthResult:
    return authenticate_tree(key, root, reconstruct(registry.log))


# --- the three variants -------------------------------------------------------

def run_fraudulent_root(registry: Registry, scenario: AttackScenario) -> AttackOutcome:
    """Variant 1: a competing root claiming to predate the victim's.

    The registration itself succeeds, since the registry cannot know intent, so
    closure is evidential: the identities are distinct, the order names the
    victim, and the adversary cannot authenticate the victim's tree.
    """
    rng = random.Random(17)
    before = _auth_snapshot(registry, scenario.victim_key, scenario.victim_root)

    fraud_root = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DATASET",
        manifest=_manifest(rng), title="fraudulent root")
    for i in range(2):
        _register_anchor(
            registry, scenario.operator, scenario.adversary_key, "MODEL",
            manifest=_manifest(rng), parent=fraud_root, title=f"fraud child {i}")

    forest = reconstruct(registry.log)
    victim_tree = forest.roots[scenario.victim_root.value].tree_id
    fraud_tree = forest.roots[fraud_root.value].tree_id
    winner = priority(forest, victim_tree, fraud_tree)
    foreign_auth = authenticate_tree(scenario.adversary_key, scenario.victim_root, forest)
    after = _auth_snapshot(registry, scenario.victim_key, scenario.victim_root)

    evidence: dict[str, object] = {
        "attack_registered": True,
        "tree_ids_distinct": victim_tree != fraud_tree,
        "priority_names_victim": winner == victim_tree,
        "adversary_cannot_authenticate_victim": not foreign_auth.authenticated,
        "victim_auth_unchanged": after == before,
        "victim_authenticated": after.authenticated,
        "victim_tree_id": victim_tree.hex,
        "fraudulent_tree_id": fraud_tree.hex,
    }
    closed = (
        evidence["tree_ids_distinct"]
        and evidence["priority_names_victim"]
        and evidence["adversary_cannot_authenticate_victim"]
        and evidence["victim_auth_unchanged"]
    )
    return AttackOutcome(scenario.variant, Mechanism.CRYPTOGRAPHIC_PRIORITY, bool(closed), evidence)


def run_malicious_child(registry: Registry, scenario: AttackScenario) -> AttackOutcome:
    """Variant 2: permissionless attachment under a victim anchor, closed by
    the VOID cascade at the view layer. The log only ever grows."""
    rng = random.Random(23)
    before = _auth_snapshot(registry, scenario.victim_key, scenario.victim_root)
    log_before = len(registry.log)
    victim_nodes_before = set(
        reconstruct(registry.log).roots[scenario.victim_root.value].nodes)

    attach = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DOCUMENT",
        manifest=_manifest(rng), target=scenario.victim_root, title="malicious attachment")
    grandchildren = [
        _register_anchor(
            registry, scenario.operator, scenario.adversary_key, "DOCUMENT",
            manifest=_manifest(rng), parent=attach, title=f"malicious grandchild {i}")
        for i in range(2)
    ]
    void_event = registry.register_governance(
        scenario.operator, "VOID", attach, descriptor="malicious attachment")

    forest = reconstruct(registry.log)
    attachment_tree = forest.roots[attach.value]
    victim_tree = forest.roots[scenario.victim_root.value]
    after = authenticate_tree(scenario.victim_key, scenario.victim_root, forest)
    attachment_ids = {attach.value} | {g.value for g in grandchildren}
    commitment = registry.registered[attach.value].token_commitment

    evidence: dict[str, object] = {
        "attachment_succeeded": True,
        "cross_edge_recorded": (attach, scenario.victim_root) in forest.cross_edges,
        "suppressed_exactly_attachment": attachment_tree.suppressed == attachment_ids,
        "victim_nodes_untouched": set(victim_tree.nodes) == victim_nodes_before,
        "log_strictly_grown": len(registry.log) == log_before + 4,
        "void_commitment_zero": void_event.token_commitment == ZERO_DIGEST,
        "attributable_to_adversary": verify_initiation(
            scenario.adversary_key, attach, commitment),
        "not_attributable_to_victim": not verify_initiation(
            scenario.victim_key, attach, commitment),
        "victim_auth_unchanged": after == before,
        "suppressed_count": len(attachment_tree.suppressed),
    }
    closed = (
        evidence["suppressed_exactly_attachment"]
        and evidence["victim_nodes_untouched"]
        and evidence["log_strictly_grown"]
        and evidence["void_commitment_zero"]
        and evidence["attributable_to_adversary"]
        and evidence["not_attributable_to_victim"]
        and evidence["victim_auth_unchanged"]
    )
    return AttackOutcome(scenario.variant, Mechanism.GOVERNANCE_CASCADE, bool(closed), evidence)


def run_tree_spoofing(registry: Registry, scenario: AttackScenario) -> AttackOutcome:
    """Variant 3: carrying the victim's public tree identity.

    Every path is shut by the contract rules themselves: no gate access, no
    zero commitments, no mismatched lineage; the one shape that does
    reach the log (a parentless duplicate claim) verifies under no key and
    never enters the victim's component.
    """
    rng = random.Random(29)
    before = _auth_snapshot(registry, scenario.victim_key, scenario.victim_root)
    forest0 = reconstruct(registry.log)
    victim_tree_id = forest0.roots[scenario.victim_root.value].tree_id
    victim_hex = victim_tree_id.hex

    def spoof_request(*, commitment: Digest32 | None, parent: AnchorId | None) -> RegistrationRequest:
        ar_id = registry.reserve()
        return RegistrationRequest(
            ar_id=ar_id,
            artifact_type=registry.taxonomy.get("DOCUMENT"),
            manifest_hash=_manifest(rng),
            tree_id_plain=victim_hex,
            token_commitment=(
                commitment if commitment is not None
                else token_commitment(scenario.adversary_key, ar_id)),
            parent_ar_id=parent,
        )

    # Path 1: no operator access at all.
    try:
        registry.register_content(scenario.adversary_address, spoof_request(
            commitment=None, parent=None))
        gate_error = None
    except NotOperator as exc:
        gate_error = type(exc).__name__

    # Path 2a: through the operator, zero commitment.
    try:
        registry.register_content(scenario.operator, spoof_request(
            commitment=ZERO_DIGEST, parent=None))
        zero_error = None
    except MissingTokenCommitment as exc:
        zero_error = type(exc).__name__

    # Path 2b: through the operator, as a child of the adversary's own tree
    # but carrying the victim's tree id.
    own_root = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DATASET",
        manifest=_manifest(rng), title="adversary root")
    try:
        registry.register_content(scenario.operator, spoof_request(
            commitment=None, parent=own_root))
        mismatch_error = None
    except TreeIdMismatch as exc:
        mismatch_error = type(exc).__name__

    # Path 2c: parentless anchor claiming the victim's tree id. The registry
    # stores what it is given; the claim dies at verification instead.
    spoof_req = spoof_request(commitment=None, parent=None)
    registry.register_content(scenario.operator, spoof_req)
    spoof_id = spoof_req.ar_id

    forest = reconstruct(registry.log)
    victim_tree = forest.roots[scenario.victim_root.value]
    spoof_component = forest.roots[spoof_id.value]
    after = authenticate_tree(scenario.victim_key, scenario.victim_root, forest)
    spoof_under_adversary = authenticate_tree(scenario.adversary_key, spoof_id, forest)

    evidence: dict[str, object] = {
        "direct_call_rejected": gate_error == "NotOperator",
        "zero_commitment_rejected": zero_error == "MissingTokenCommitment",
        "cross_tree_child_rejected": mismatch_error == "TreeIdMismatch",
        "spoofed_root_is_duplicate_claim": spoof_component in forest.duplicate_claims,
        "spoof_not_in_victim_tree": spoof_id.value not in victim_tree.nodes,
        "spoof_fails_under_victim_key": not verify_initiation(
            scenario.victim_key, spoof_id, registry.registered[spoof_id.value].token_commitment),
        "spoof_fails_under_adversary_key": not spoof_under_adversary.authenticated,
        "victim_auth_unchanged": after == before,
        "rejections": {
            "gate": gate_error,
            "zero_commitment": zero_error,
            "tree_mismatch": mismatch_error,
        },
    }
    closed = (
        evidence["direct_call_rejected"]
        and evidence["zero_commitment_rejected"]
        and evidence["cross_tree_child_rejected"]
        and evidence["spoofed_root_is_duplicate_claim"]
        and evidence["spoof_not_in_victim_tree"]
        and evidence["spoof_fails_under_victim_key"]
        and evidence["spoof_fails_under_adversary_key"]
        and evidence["victim_auth_unchanged"]
    )
    return AttackOutcome(scenario.variant, Mechanism.CONTRACT_ENFORCEMENT, bool(closed), evidence)


RUNNERS = {
    Variant.FRAUDULENT_ROOT: run_fraudulent_root,
    Variant.MALICIOUS_CHILD: run_malicious_child,
    Variant.TREE_SPOOFING: run_tree_spoofing,
}


def run_variant(variant: Variant, *, seed: int = 0) -> AttackOutcome:
    registry, scenario = make_scenario(variant, seed=seed)
    return RUNNERS[variant](registry, scenario)


# --- necessity drills ---------------------------------------------------------

def necessity_drill(mechanism: Mechanism, *, seed: int = 0) -> DrillReport:
    """Disable exactly one closure mechanism and show its variant opens up.

    Harmful success is concrete per variant: legitimacy undecidable from
    identities alone; the attachment permanently visible; a spoofed member
    accepted into the victim's lineage.
    """
    if mechanism is Mechanism.CRYPTOGRAPHIC_PRIORITY:
        return _drill_priority(seed)
    if mechanism is Mechanism.GOVERNANCE_CASCADE:
        return _drill_cascade(seed)
    if mechanism is Mechanism.CONTRACT_ENFORCEMENT:
        return _drill_enforcement(seed)
    raise UnknownMechanism(f"no such mechanism: {mechanism!r}")


def _drill_priority(seed: int) -> DrillReport:
    """Without the order comparison, both roots are equally self-consistent."""
    registry, scenario = make_scenario(Variant.FRAUDULENT_ROOT, seed=seed)
    rng = random.Random(31)
    fraud_root = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DATASET",
        manifest=_manifest(rng), title="fraudulent root")
    forest = reconstruct(registry.log)
    victim_ok = authenticate_tree(scenario.victim_key, scenario.victim_root, forest)
    fraud_ok = authenticate_tree(scenario.adversary_key, fraud_root, forest)
    victim_tid = forest.roots[scenario.victim_root.value].tree_id
    fraud_tid = forest.roots[fraud_root.value].tree_id
    # Priority suppressed: no call to priority(); identity data is all we have.
    evidence: dict[str, object] = {
        "priority_comparison_suppressed": True,
        "tree_ids_distinct": victim_tid != fraud_tid,
        "victim_self_consistent": victim_ok.authenticated,
        "fraud_self_consistent": fraud_ok.authenticated,
        "decidable_from_identity_alone": False,
    }
    harmful = (
        evidence["victim_self_consistent"]
        and evidence["fraud_self_consistent"]
        and not evidence["decidable_from_identity_alone"]
    )
    return DrillReport(
        Mechanism.CRYPTOGRAPHIC_PRIORITY, Variant.FRAUDULENT_ROOT, bool(harmful), evidence)


def _drill_cascade(seed: int) -> DrillReport:
    """With VOID ignored by reconstruction, the attachment stays visible."""
    registry, scenario = make_scenario(Variant.MALICIOUS_CHILD, seed=seed)
    rng = random.Random(37)
    attach = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DOCUMENT",
        manifest=_manifest(rng), target=scenario.victim_root)
    child = _register_anchor(
        registry, scenario.operator, scenario.adversary_key, "DOCUMENT",
        manifest=_manifest(rng), parent=attach)
    registry.register_governance(scenario.operator, "VOID", attach)

    forest = reconstruct(registry.log, apply_void_cascade=False)
    attachment_tree = forest.roots[attach.value]
    evidence: dict[str, object] = {
        "void_registered": True,
        "cascade_disabled": True,
        "suppression_empty": not attachment_tree.suppressed,
        "attachment_visible": {attach.value, child.value} <= attachment_tree.visible,
    }
    harmful = evidence["suppression_empty"] and evidence["attachment_visible"]
    return DrillReport(
        Mechanism.GOVERNANCE_CASCADE, Variant.MALICIOUS_CHILD, bool(harmful), evidence)


def _drill_enforcement(seed: int) -> DrillReport:
    """With the gate and zero-check off, spoofed members enter the lineage."""
    rng = random.Random(seed)
    operator = OperatorId(f"{rng.getrandbits(160):040x}")
    adversary_address = OperatorId(f"{rng.getrandbits(160):040x}")
    registry = Registry([operator], seed=rng.getrandbits(64),
                        unsafe_disable_enforcement=True)
    victim_key = keygen(rng.randbytes(32))
    victim_root = _register_anchor(
        registry, operator, victim_key, "DATASET", manifest=_manifest(rng))
    victim_hex = registry.registered[victim_root.value].tree_id_plain

    # Direct call by a non-operator, zero commitment, victim tree id, child
    # of the victim root: everything the contract would revert, accepted.
    spoof_id = registry.reserve()
    registry.register_content(adversary_address, RegistrationRequest(
        ar_id=spoof_id,
        artifact_type=registry.taxonomy.get("DOCUMENT"),
        manifest_hash=_manifest(rng),
        tree_id_plain=victim_hex,
        token_commitment=ZERO_DIGEST,
        parent_ar_id=victim_root,
    ))

    forest = reconstruct(registry.log)
    victim_tree = forest.roots[victim_root.value]
    spoof_record = registry.registered[spoof_id.value]
    try:
        is_governance(spoof_record)
        separation_broken = False
    except SeparationViolation:
        separation_broken = True

    evidence: dict[str, object] = {
        "gate_bypassed": spoof_record.registrant == adversary_address,
        "zero_commitment_accepted": spoof_record.token_commitment.is_zero,
        "spoofed_member_in_victim_tree": spoof_id.value in victim_tree.nodes,
        "separation_violation_detected": separation_broken,
    }
    harmful = (
        evidence["gate_bypassed"]
        and evidence["zero_commitment_accepted"]
        and evidence["spoofed_member_in_victim_tree"]
    )
    return DrillReport(
        Mechanism.CONTRACT_ENFORCEMENT, Variant.TREE_SPOOFING, bool(harmful), evidence)


# --- dominated-strategy proxies ------------------------------------------------

def detect_duplicate_manifests(tree: ProvenanceTree) -> dict[str, list[str]]:
    """Flag manifest hashes shared by two or more content anchors in a tree.

    Batch-registering the same artifact n times is self-evident on the log;
    this is the trivial detector for that pattern.
    """
    by_manifest: dict[str, list[str]] = {}
    for ar_id, record in tree.nodes.items():
        if record.artifact_class is ArtifactClass.GOVERNANCE:
            continue
        by_manifest.setdefault(record.manifest_hash, []).append(ar_id)
    return {m: ids for m, ids in by_manifest.items() if len(ids) >= 2}


def run_enterprise_griefing(
    registry: Registry,
    operator: OperatorId,
    key: OwnershipToken,
    n: int,
    *,
    seed: int = 0,
) -> dict[str, object]:
    """Batch n identical-manifest registrations under one ACCOUNT anchor.

    Returns evidence that the pattern is useless as an accusation: every
    registration got a distinct id with a distinct commitment that verifies
    under the batching key, and the duplicate-manifest detector fires.
    """
    rng = random.Random(seed)
    account = _register_anchor(registry, operator, key, "ACCOUNT", manifest=_manifest(rng))
    account_tree_hex = registry.registered[account.value].tree_id_plain
    manifest = _manifest(rng)
    anchor_ids: list[AnchorId] = []
    for _ in range(n):
        ar_id = registry.reserve()
        req = RegistrationRequest(
            ar_id=ar_id,
            artifact_type=registry.taxonomy.get("DOCUMENT"),
            manifest_hash=manifest,
            tree_id_plain=account_tree_hex,
            token_commitment=token_commitment(key, ar_id),
            parent_ar_id=account,
        )
        registry.register_gated(operator, req, account)
        anchor_ids.append(ar_id)

    commitments = [registry.registered[a.value].token_commitment for a in anchor_ids]
    forest = reconstruct(registry.log)
    flagged = detect_duplicate_manifests(forest.roots[account.value])
    return {
        "batch_size": n,
        "distinct_ids": len({a.value for a in anchor_ids}) == n,
        "distinct_commitments": len({c.hex for c in commitments}) == n,
        "all_verify_under_batch_key": all(
            verify_initiation(key, a, c) for a, c in zip(anchor_ids, commitments)),
        "duplicate_manifest_flagged": manifest in flagged and len(flagged[manifest]) == n,
    }


def run_honest_session(*, seed: int = 0) -> dict[str, object]:
    """Honest-equilibrium smoke run: a mixed scripted session with no errors."""
    rng = random.Random(seed)
    operator = OperatorId(f"{rng.getrandbits(160):040x}")
    registry = Registry([operator], seed=rng.getrandbits(64))
    key = keygen(rng.randbytes(32))
    root = _register_anchor(registry, operator, key, "DATASET", manifest=_manifest(rng))
    children = [
        _register_anchor(registry, operator, key, "MODEL",
                         manifest=_manifest(rng), parent=root)
        for _ in range(3)
    ]
    registry.register_governance(operator, "REVIEW", root)
    registry.register_governance(operator, "AFFIRMED", children[0])
    forest = reconstruct(registry.log)
    auth = authenticate_tree(key, root, forest)
    return {
        "events": len(registry.log),
        "authenticated": auth.authenticated,
        "governance_skipped": len(auth.governance_skipped),
        "errors": 0,
    }


def forest_victim_view(forest: Forest, root: AnchorId) -> ProvenanceTree:
    """Convenience accessor used by drill assertions and the CLI."""
    return forest.roots[root.value]
