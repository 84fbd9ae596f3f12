"""The Anchored event record, its JSONL wire format, and log queries.

One JSON object per line, field names and order fixed. The two indexed
topics mirror EVM semantics for indexed dynamic types: a topic is the
keccak-256 of the UTF-8 plain string, so the plain fields must ride along
or the log could not be reconstructed. ``deserialize`` recomputes the
topics and treats a mismatch as a tampered export.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .commitments import AnchorId, Digest32
from .errors import MalformedLine, TopicMismatch
from .keccak import keccak256
from .records import AnchorRecord, OperatorId
from .taxonomy import classify_type_name

FIELD_ORDER = (
    "arId", "registrant", "artifactType", "arIdPlain", "descriptor", "title",
    "author", "manifestHash", "parentArId", "treeId", "treeIdPlain",
    "tokenCommitment", "blockNumber", "logIndex",
)


def string_topic(plain: str) -> Digest32:
    """Indexed-topic simulation: keccak256 of the UTF-8 plain string."""
    return Digest32(keccak256(plain.encode("utf-8")))


@dataclass(frozen=True, slots=True)
class AnchoredEvent:
    """The immutable log entry emitted once per registration."""

    ar_id_topic: Digest32
    registrant: OperatorId
    artifact_type: str
    ar_id_plain: str
    descriptor: str
    title: str
    author: str
    manifest_hash: str
    parent_ar_id: str  # empty string for a root
    tree_id_topic: Digest32
    tree_id_plain: str
    token_commitment: Digest32
    block_number: int
    log_index: int

    @property
    def position(self) -> tuple[int, int]:
        return (self.block_number, self.log_index)

    @property
    def is_root(self) -> bool:
        return self.parent_ar_id == ""


def event_from_record(record: AnchorRecord) -> AnchoredEvent:
    """Wire form of a record; computes the indexed topics."""
    return AnchoredEvent(
        ar_id_topic=string_topic(record.ar_id.value),
        registrant=record.registrant,
        artifact_type=record.artifact_type.name,
        ar_id_plain=record.ar_id.value,
        descriptor=record.descriptor,
        title=record.title,
        author=record.author,
        manifest_hash=record.manifest_hash,
        parent_ar_id=record.parent_ar_id.value if record.parent_ar_id else "",
        tree_id_topic=string_topic(record.tree_id_plain),
        tree_id_plain=record.tree_id_plain,
        token_commitment=record.token_commitment,
        block_number=record.block_number,
        log_index=record.log_index,
    )


def record_from_event(event: AnchoredEvent) -> AnchorRecord:
    """Rebuild the domain record from a log entry.

    The artifact class comes from the structural naming convention, so a
    verifier needs no registry configuration.
    """
    return AnchorRecord(
        ar_id=AnchorId(event.ar_id_plain),
        artifact_type=classify_type_name(event.artifact_type),
        manifest_hash=event.manifest_hash,
        tree_id_plain=event.tree_id_plain,
        token_commitment=event.token_commitment,
        parent_ar_id=AnchorId(event.parent_ar_id) if event.parent_ar_id else None,
        descriptor=event.descriptor,
        title=event.title,
        author=event.author,
        registrant=event.registrant,
        block_number=event.block_number,
        log_index=event.log_index,
        tree_id=Digest32.from_hex(event.tree_id_plain),
    )


def serialize(event: AnchoredEvent) -> bytes:
    """One compact JSON object, fields in FIELD_ORDER, digests as lowercase hex."""
    obj = {
        "arId": event.ar_id_topic.hex,
        "registrant": event.registrant.address,
        "artifactType": event.artifact_type,
        "arIdPlain": event.ar_id_plain,
        "descriptor": event.descriptor,
        "title": event.title,
        "author": event.author,
        "manifestHash": event.manifest_hash,
        "parentArId": event.parent_ar_id,
        "treeId": event.tree_id_topic.hex,
        "treeIdPlain": event.tree_id_plain,
        "tokenCommitment": event.token_commitment.hex,
        "blockNumber": event.block_number,
        "logIndex": event.log_index,
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def deserialize(line: bytes | str) -> AnchoredEvent:
    """Inverse of serialize. Verifies the topic fields against the plain ones."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedLine(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"not a JSON object: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != set(FIELD_ORDER):
        raise MalformedLine("wrong field set for an Anchored event")
    for key in FIELD_ORDER:
        want_int = key in ("blockNumber", "logIndex")
        if want_int and not isinstance(obj[key], int):
            raise MalformedLine(f"{key} must be an integer")
        if not want_int and not isinstance(obj[key], str):
            raise MalformedLine(f"{key} must be a string")
    if obj["blockNumber"] < 0 or obj["logIndex"] < 0:
        raise MalformedLine("negative block number or log index")
    try:
        event = AnchoredEvent(
            ar_id_topic=Digest32.from_hex(obj["arId"]),
            registrant=OperatorId(obj["registrant"]),
            artifact_type=obj["artifactType"],
            ar_id_plain=obj["arIdPlain"],
            descriptor=obj["descriptor"],
            title=obj["title"],
            author=obj["author"],
            manifest_hash=obj["manifestHash"],
            parent_ar_id=obj["parentArId"],
            tree_id_topic=Digest32.from_hex(obj["treeId"]),
            tree_id_plain=obj["treeIdPlain"],
            token_commitment=Digest32.from_hex(obj["tokenCommitment"]),
            block_number=obj["blockNumber"],
            log_index=obj["logIndex"],
        )
    except ValueError as exc:
        raise MalformedLine(str(exc)) from exc
    if event.ar_id_topic != string_topic(event.ar_id_plain):
        raise TopicMismatch(f"arId topic does not match arIdPlain {event.ar_id_plain!r}")
    if event.tree_id_topic != string_topic(event.tree_id_plain):
        raise TopicMismatch(f"treeId topic does not match treeIdPlain {event.tree_id_plain!r}")
    return event


@dataclass(frozen=True, slots=True)
class LogQuery:
    """Block-range filter with an optional indexed tree topic.

    ``to_block`` None means "latest" (encoded as the string "latest" in
    query files and CLI arguments).
    """

    tree_id_topic: Digest32 | None = None
    from_block: int = 0
    to_block: int | None = None

    def __post_init__(self) -> None:
        if self.to_block is not None and self.from_block > self.to_block:
            raise ValueError("from_block must not exceed to_block")

    def admits(self, event: AnchoredEvent) -> bool:
        if event.block_number < self.from_block:
            return False
        if self.to_block is not None and event.block_number > self.to_block:
            return False
        if self.tree_id_topic is not None and event.tree_id_topic != self.tree_id_topic:
            return False
        return True


class EventLog:
    """Append-only event sequence with a per-tree topic index.

    Appends are serialized by the registry's single writer; readers may
    scan snapshots freely. (block_number, log_index) must be strictly
    increasing, which append enforces.
    """

    def __init__(self, events: Iterable[AnchoredEvent] = ()):
        self._events: list[AnchoredEvent] = []
        self._by_topic: dict[Digest32, list[AnchoredEvent]] = {}
        for event in events:
            self.append(event)

    def append(self, event: AnchoredEvent) -> None:
        if self._events and event.position <= self._events[-1].position:
            raise ValueError(
                f"event position {event.position} not after {self._events[-1].position}")
        self._events.append(event)
        self._by_topic.setdefault(event.tree_id_topic, []).append(event)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[AnchoredEvent]:
        return iter(self._events)

    def __getitem__(self, index: int) -> AnchoredEvent:
        return self._events[index]

    @property
    def last_position(self) -> tuple[int, int] | None:
        return self._events[-1].position if self._events else None

    def get_logs(self, query: LogQuery) -> list[AnchoredEvent]:
        """Events matching the query, in (block_number, log_index) order.

        With a topic filter this reads the per-topic index (O(matches));
        otherwise it scans the block range.
        """
        if query.tree_id_topic is not None:
            candidates: Sequence[AnchoredEvent] = self._by_topic.get(query.tree_id_topic, [])
        else:
            candidates = self._events
        return [e for e in candidates if query.admits(e)]


def get_logs(log: EventLog | Sequence[AnchoredEvent], query: LogQuery) -> list[AnchoredEvent]:
    if isinstance(log, EventLog):
        return log.get_logs(query)
    return [e for e in log if query.admits(e)]


def query_to_json_dict(query: LogQuery) -> dict:
    return {
        "treeIdTopic": query.tree_id_topic.hex if query.tree_id_topic else None,
        "fromBlock": query.from_block,
        "toBlock": "latest" if query.to_block is None else query.to_block,
    }


def query_from_json_dict(obj: dict) -> LogQuery:
    """Parse a query file/argument; "latest" is the unbounded sentinel."""
    topic = obj.get("treeIdTopic")
    to_block = obj.get("toBlock", "latest")
    if to_block == "latest":
        to_block = None
    elif not isinstance(to_block, int):
        raise ValueError(f"toBlock must be an integer or 'latest': {to_block!r}")
    return LogQuery(
        tree_id_topic=Digest32.from_hex(topic) if topic else None,
        from_block=int(obj.get("fromBlock", 0)),
        to_block=to_block,
    )


# --- file helpers (the JSONL interchange format) ---------------------------

def write_log(path: str | Path, events: Iterable[AnchoredEvent]) -> None:
    data = b"".join(serialize(e) + b"\n" for e in events)
    Path(path).write_bytes(data)


def append_line(path: str | Path, event: AnchoredEvent) -> None:
    with open(path, "ab") as fh:
        fh.write(serialize(event) + b"\n")


def read_log(path: str | Path) -> list[AnchoredEvent]:
    """Read and verify a JSONL export. Errors carry the offending line number."""
    events: list[AnchoredEvent] = []
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                events.append(deserialize(raw))
            except (MalformedLine, TopicMismatch) as exc:
                exc.args = (f"line {lineno}: {exc.args[0] if exc.args else ''}",)
                raise
    return events
