"""anchortree: an operator-gated provenance anchor registry.

A deterministic, single-process simulation of an on-chain provenance
registry: client-side dual-layer keccak-256 commitments, the operator-gated
registration state machine with its enforcement rules, an append-only
Anchored event log in JSONL, trustless forest reconstruction with the VOID
suppression view, ownership/initiation verification, and an adversarial
simulator for the three tree-poisoning attack variants.
"""

from .commitments import (
    AnchorId,
    Digest32,
    OwnershipToken,
    ZERO_DIGEST,
    generate_token,
    keygen,
    token_commitment,
    tree_id,
)
from .errors import (
    AccountTreeMismatch,
    AnchorTreeError,
    BadManifestHash,
    CycleDetected,
    DuplicateArtifact,
    DuplicateId,
    GovernanceAnchor,
    InvalidEntropy,
    MalformedLine,
    MalformedTreeId,
    MissingTokenCommitment,
    NoAccountAnchor,
    NoOperators,
    NotOperator,
    OrphanParent,
    ReconstructionError,
    RegistryError,
    SeparationViolation,
    TopicMismatch,
    TreeIdMismatch,
    UnknownId,
    UnknownMechanism,
    UnknownParent,
    UnknownRoot,
    UnknownTarget,
    UnknownTree,
    UnreservedId,
    WrongArtifactClass,
)
from .eventlog import (
    AnchoredEvent,
    EventLog,
    FIELD_ORDER,
    LogQuery,
    deserialize,
    event_from_record,
    get_logs,
    query_from_json_dict,
    query_to_json_dict,
    read_log,
    record_from_event,
    serialize,
    string_topic,
    write_log,
)
from .keccak import acceleration_enabled, enable_acceleration, keccak256
from .poisoning import (
    AttackOutcome,
    AttackScenario,
    CLOSURE_TABLE,
    DrillReport,
    Mechanism,
    Variant,
    detect_duplicate_manifests,
    make_scenario,
    necessity_drill,
    run_enterprise_griefing,
    run_fraudulent_root,
    run_honest_session,
    run_malicious_child,
    run_tree_spoofing,
    run_variant,
)
from .records import (
    AnchorRecord,
    GasReport,
    GAS_EVENT_EMISSION,
    GAS_STORE_COMMITMENT,
    GAS_TOTAL_ADDED,
    GAS_ZERO_CHECK,
    OperatorId,
    RegistrationRequest,
    gas_estimate,
)
from .reconstruction import (
    Forest,
    ProvenanceTree,
    descendants,
    forest_to_json,
    priority,
    reconstruct,
)
from .registry import DEPLOY_BLOCK, Registry, new_registry
from .taxonomy import (
    ArtifactClass,
    ArtifactType,
    DEFAULT_TAXONOMY,
    GOVERNANCE_TYPE_NAMES,
    Taxonomy,
    classify_type_name,
    load_taxonomy,
)
from .verification import (
    AuthResult,
    Verdict,
    adjudicate_accusation,
    authenticate_tree,
    is_governance,
    verify_initiation,
    verify_ownership,
)

__version__ = "0.1.0"
