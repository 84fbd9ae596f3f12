"""The operator-gated registration state machine.

Simulates the on-chain contract's behavior in one process: reservations,
the three registration entry points plus governance, and every enforcement
rule: operator whitelist, non-zero commitment on content paths, anchor-id
uniqueness, parent-before-child, and tree membership. Each successful
operation appends exactly one event to an append-only log and mutates state
atomically with the append (single writer, lock held across both).

The registry never sees an ownership key. It stores the digests it is
given; whether a claimed tree identity actually binds to a key is the
verifier's concern, not the registry's.
"""

from __future__ import annotations

import random
import threading
from types import MappingProxyType
from typing import Iterable, Mapping

from .commitments import AnchorId, Digest32, ZERO_DIGEST
from .errors import (
    AccountTreeMismatch,
    DuplicateArtifact,
    MissingTokenCommitment,
    NoAccountAnchor,
    NoOperators,
    NotOperator,
    SeparationViolation,
    TreeIdMismatch,
    UnknownParent,
    UnknownTarget,
    UnreservedId,
    WrongArtifactClass,
)
from .eventlog import AnchoredEvent, EventLog, event_from_record, record_from_event
from .records import AnchorRecord, OperatorId, RegistrationRequest
from .records import GasReport, gas_estimate  # noqa: F401  (registry surface)
from .taxonomy import (
    ArtifactClass,
    DEFAULT_TAXONOMY,
    GOVERNANCE_TYPE_NAMES,
    Taxonomy,
)

DEPLOY_BLOCK = 1

_GOV_ID_PREFIX = "GOV-"


class Registry:
    """Deterministic single-process registry instance.

    ``seed`` makes reservation-id and governance-id generation reproducible
    (the test seam); without it a system CSPRNG is used. Block model: one
    logical block per event, starting at the deploy block; log_index is the
    event's position in the log, so (block_number, log_index) is a total
    registration order.

    ``unsafe_disable_enforcement`` exists only for the poisoning necessity
    drills: it bypasses the operator gate and the zero-commitment check.
    Never set it outside that harness.
    """

    def __init__(
        self,
        operators: Iterable[OperatorId],
        *,
        taxonomy: Taxonomy = DEFAULT_TAXONOMY,
        seed: int | None = None,
        deploy_block: int = DEPLOY_BLOCK,
        unsafe_disable_enforcement: bool = False,
    ):
        ops = {op.address: op for op in operators}
        if not ops:
            raise NoOperators("registry requires at least one operator")
        self._operators = ops
        self._taxonomy = taxonomy
        self._registered: dict[str, AnchorRecord] = {}
        self._reservations: dict[str, str] = {}  # ar_id -> opaque client ref
        self._log = EventLog()
        self._next_block = deploy_block
        self._rng = random.Random(seed) if seed is not None else random.SystemRandom()
        self._unsafe_disable_enforcement = unsafe_disable_enforcement
        self._write_lock = threading.Lock()

    # --- read surface ------------------------------------------------------

    @property
    def registered(self) -> Mapping[str, AnchorRecord]:
        return MappingProxyType(self._registered)

    @property
    def reservations(self) -> Mapping[str, str]:
        return MappingProxyType(self._reservations)

    @property
    def operators(self) -> frozenset[str]:
        return frozenset(self._operators)

    @property
    def taxonomy(self) -> Taxonomy:
        return self._taxonomy

    @property
    def log(self) -> EventLog:
        return self._log

    @property
    def next_block(self) -> int:
        return self._next_block

    # --- reservation -------------------------------------------------------

    def reserve(self, requested_by: str = "") -> AnchorId:
        """Pre-generate a unique PENDING anchor id (32 hex chars)."""
        with self._write_lock:
            while True:
                candidate = f"{self._rng.getrandbits(128):032x}"
                if candidate not in self._registered and candidate not in self._reservations:
                    break
            self._reservations[candidate] = requested_by
            return AnchorId(candidate)

    # --- registration entry points -----------------------------------------

    def register_content(self, caller: OperatorId, req: RegistrationRequest) -> AnchoredEvent:
        """The paid content path; also registers ACCOUNT anchors."""
        with self._write_lock:
            self._check_operator(caller)
            self._check_class(req, (ArtifactClass.CONTENT, ArtifactClass.ACCOUNT))
            return self._register_lineage(caller, req)

    def register_gated(
        self,
        caller: OperatorId,
        req: RegistrationRequest,
        account_anchor: AnchorId,
    ) -> AnchoredEvent:
        """Batch path: content registration spent from an ACCOUNT anchor.

        The account anchor must be registered, of ACCOUNT type, and in the
        same tree as the request; everything else is the content path.
        """
        with self._write_lock:
            self._check_operator(caller)
            self._check_class(req, (ArtifactClass.CONTENT,))
            account = self._registered.get(account_anchor.value)
            if account is None or account.artifact_class is not ArtifactClass.ACCOUNT:
                raise NoAccountAnchor(f"no ACCOUNT anchor registered as {account_anchor.value!r}")
            if account.tree_id_plain != req.tree_id_plain:
                raise AccountTreeMismatch(
                    f"account anchor tree {account.tree_id_plain} != request tree {req.tree_id_plain}")
            return self._register_lineage(caller, req)

    def register_targeted(
        self,
        caller: OperatorId,
        req: RegistrationRequest,
        target_ar_id: AnchorId,
    ) -> AnchoredEvent:
        """Permissionless attachment: parent forced to the target anchor.

        Cross-tree attachment is allowed by design (citation-style lineage):
        when the declared tree differs from the target's, the child keeps
        its own tree identity and only the lineage edge crosses.
        """
        with self._write_lock:
            self._check_operator(caller)
            self._check_class(req, (ArtifactClass.CONTENT,))
            if req.parent_ar_id is not None and req.parent_ar_id != target_ar_id:
                raise ValueError("targeted request carries a conflicting parent_ar_id")
            target = self._registered.get(target_ar_id.value)
            if target is None:
                raise UnknownTarget(f"target {target_ar_id.value!r} is not registered")
            self._check_commitment(req.token_commitment)
            self._check_fresh(req.ar_id)
            tree = Digest32.from_hex(req.tree_id_plain)
            record = self._build_record(caller, req, parent=target_ar_id, tree=tree)
            return self._commit(record)

    def register_governance(
        self,
        caller: OperatorId,
        governance_type: str,
        target_ar_id: AnchorId,
        descriptor: str = "",
    ) -> AnchoredEvent:
        """Operator-only governance anchor under a registered target.

        There is no commitment parameter: the zero sentinel is hardcoded
        here and nowhere else, which is what makes it a registrant-capacity
        signal rather than data. Governance ids skip the reservation flow
        and are auto-generated.
        """
        with self._write_lock:
            self._check_operator(caller)
            if governance_type not in GOVERNANCE_TYPE_NAMES:
                raise WrongArtifactClass(f"not a governance type: {governance_type!r}")
            target = self._registered.get(target_ar_id.value)
            if target is None:
                raise UnknownTarget(f"target {target_ar_id.value!r} is not registered")
            ar_id = self._fresh_governance_id()
            record = AnchorRecord(
                ar_id=ar_id,
                artifact_type=self._taxonomy.get(governance_type),
                manifest_hash="0" * 64,  # governance anchors carry no manifest
                tree_id_plain=target.tree_id_plain,
                token_commitment=ZERO_DIGEST,
                parent_ar_id=target_ar_id,
                descriptor=descriptor,
                title="",
                author="",
                registrant=caller,
                block_number=self._next_block,
                log_index=len(self._log),
                tree_id=target.tree_id,
            )
            return self._commit(record, consume_reservation=False)

    # --- replay (trusted rebuild from an exported log) ----------------------

    @classmethod
    def replay(
        cls,
        events: Iterable[AnchoredEvent],
        operators: Iterable[OperatorId],
        *,
        taxonomy: Taxonomy = DEFAULT_TAXONOMY,
        seed: int | None = None,
    ) -> "Registry":
        """Rebuild live state from an event log (the CLI's persistence path).

        Historical registrants are kept as recorded; the operator whitelist
        passed here gates future operations only. The governance/zero
        biconditional is re-checked per event so a doctored log fails loudly.
        """
        registry = cls(operators, taxonomy=taxonomy, seed=seed)
        for event in events:
            record = record_from_event(event)
            is_gov = record.artifact_class is ArtifactClass.GOVERNANCE
            if is_gov != record.token_commitment.is_zero:
                raise SeparationViolation(
                    f"event {record.ar_id.value!r}: zero-commitment/governance mismatch")
            if record.ar_id.value in registry._registered:
                raise DuplicateArtifact(f"replayed log repeats {record.ar_id.value!r}")
            registry._registered[record.ar_id.value] = record
            registry._log.append(event)
            registry._next_block = record.block_number + 1
        return registry

    def restore_reservations(self, pending: Mapping[str, str]) -> None:
        """Re-attach PENDING reservations after a replay, skipping any id
        that has since been registered."""
        with self._write_lock:
            for ar_id, client_ref in pending.items():
                if ar_id not in self._registered:
                    self._reservations[ar_id] = client_ref

    # --- internals ----------------------------------------------------------

    def _check_operator(self, caller: OperatorId) -> None:
        if self._unsafe_disable_enforcement:
            return
        if caller.address not in self._operators:
            raise NotOperator(f"{caller.address} is not a whitelisted operator")

    def _check_class(self, req: RegistrationRequest, allowed: tuple[ArtifactClass, ...]) -> None:
        name = req.artifact_type.name
        if name not in self._taxonomy or self._taxonomy.get(name) != req.artifact_type:
            raise WrongArtifactClass(f"artifact type not in taxonomy: {name!r}")
        if req.artifact_type.artifact_class not in allowed:
            raise WrongArtifactClass(
                f"{name} ({req.artifact_type.artifact_class.value}) not admitted on this path")

    def _check_commitment(self, commitment: Digest32) -> None:
        if self._unsafe_disable_enforcement:
            return
        if commitment.is_zero:
            raise MissingTokenCommitment("content registration requires a non-zero commitment")

    def _check_fresh(self, ar_id: AnchorId) -> None:
        if ar_id.value in self._registered:
            raise DuplicateArtifact(f"{ar_id.value!r} is already registered")
        if ar_id.value not in self._reservations:
            raise UnreservedId(f"{ar_id.value!r} was never reserved")

    def _register_lineage(self, caller: OperatorId, req: RegistrationRequest) -> AnchoredEvent:
        """Shared content/gated path: within-tree lineage rules."""
        self._check_commitment(req.token_commitment)
        self._check_fresh(req.ar_id)
        if req.parent_ar_id is not None:
            parent = self._registered.get(req.parent_ar_id.value)
            if parent is None:
                raise UnknownParent(f"parent {req.parent_ar_id.value!r} is not registered")
            if req.tree_id_plain != parent.tree_id_plain:
                raise TreeIdMismatch(
                    f"child declared tree {req.tree_id_plain}, parent carries {parent.tree_id_plain}")
            tree = parent.tree_id
        else:
            tree = Digest32.from_hex(req.tree_id_plain)
        record = self._build_record(caller, req, parent=req.parent_ar_id, tree=tree)
        return self._commit(record)

    def _build_record(
        self,
        caller: OperatorId,
        req: RegistrationRequest,
        *,
        parent: AnchorId | None,
        tree: Digest32,
    ) -> AnchorRecord:
        return AnchorRecord(
            ar_id=req.ar_id,
            artifact_type=req.artifact_type,
            manifest_hash=req.manifest_hash,
            tree_id_plain=req.tree_id_plain,
            token_commitment=req.token_commitment,
            parent_ar_id=parent,
            descriptor=req.descriptor,
            title=req.title,
            author=req.author,
            registrant=caller,
            block_number=self._next_block,
            log_index=len(self._log),
            tree_id=tree,
        )

    def _commit(self, record: AnchorRecord, *, consume_reservation: bool = True) -> AnchoredEvent:
        event = event_from_record(record)
        self._log.append(event)
        self._registered[record.ar_id.value] = record
        if consume_reservation:
            self._reservations.pop(record.ar_id.value, None)
        self._next_block += 1
        return event

    def _fresh_governance_id(self) -> AnchorId:
        while True:
            candidate = f"{_GOV_ID_PREFIX}{self._rng.getrandbits(128):032x}"
            if candidate not in self._registered and candidate not in self._reservations:
                return AnchorId(candidate)


def new_registry(operators: Iterable[OperatorId], **kwargs) -> Registry:
    return Registry(operators, **kwargs)
