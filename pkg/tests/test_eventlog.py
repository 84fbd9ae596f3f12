"""Wire format: codec round-trips, tamper detection, log queries."""

import json
import random

import pytest

from anchortree import (
    AnchoredEvent,
    Digest32,
    EventLog,
    FIELD_ORDER,
    LogQuery,
    MalformedLine,
    OperatorId,
    TopicMismatch,
    deserialize,
    get_logs,
    serialize,
    string_topic,
)
from regfuzz import fuzz_run


def random_event(rng: random.Random, *, block: int, index: int,
                 governance: bool = False, tree_plain: str | None = None) -> AnchoredEvent:
    ar_plain = f"{rng.getrandbits(128):032x}"
    tree_plain = tree_plain or f"{rng.getrandbits(256):064x}"
    if governance:
        commitment = Digest32(b"\x00" * 32)
        artifact_type = rng.choice(["REVIEW", "VOID", "AFFIRMED"])
        parent = f"{rng.getrandbits(128):032x}"
    else:
        commitment = Digest32(rng.randbytes(32))
        artifact_type = rng.choice(["DATASET", "MODEL", "CODE"])
        parent = "" if rng.random() < 0.4 else f"{rng.getrandbits(128):032x}"
    return AnchoredEvent(
        ar_id_topic=string_topic(ar_plain),
        registrant=OperatorId(f"{rng.getrandbits(160):040x}"),
        artifact_type=artifact_type,
        ar_id_plain=ar_plain,
        descriptor=rng.choice(["", "d", "some descriptor ☃"]),
        title=rng.choice(["", "t"]),
        author=rng.choice(["", "a"]),
        manifest_hash=f"{rng.getrandbits(256):064x}",
        parent_ar_id=parent,
        tree_id_topic=string_topic(tree_plain),
        tree_id_plain=tree_plain,
        token_commitment=commitment,
        block_number=block,
        log_index=index,
    )


class TestCodec:
    def test_round_trip_random_events(self):
        rng = random.Random(21)
        for i in range(1_000):
            event = random_event(rng, block=i + 1, index=i,
                                 governance=rng.random() < 0.15)
            assert deserialize(serialize(event)) == event

    def test_field_order_exact(self):
        rng = random.Random(22)
        event = random_event(rng, block=1, index=0)
        keys = list(json.loads(serialize(event)).keys())
        assert keys == list(FIELD_ORDER)

    def test_governance_event_renders_zero_commitment(self):
        rng = random.Random(23)
        event = random_event(rng, block=1, index=0, governance=True)
        obj = json.loads(serialize(event))
        assert obj["tokenCommitment"] == "0" * 64

    def test_root_event_renders_empty_parent(self):
        rng = random.Random(24)
        while True:
            event = random_event(rng, block=1, index=0)
            if event.is_root:
                break
        assert json.loads(serialize(event))["parentArId"] == ""

    def test_tampered_plain_field_detected(self):
        rng = random.Random(25)
        event = random_event(rng, block=1, index=0)
        obj = json.loads(serialize(event))
        # flip one character of the plain id while keeping the stale topic
        plain = obj["arIdPlain"]
        obj["arIdPlain"] = ("0" if plain[0] != "0" else "1") + plain[1:]
        with pytest.raises(TopicMismatch):
            deserialize(json.dumps(obj))

    def test_tampered_tree_plain_detected(self):
        rng = random.Random(26)
        event = random_event(rng, block=1, index=0)
        obj = json.loads(serialize(event))
        obj["treeIdPlain"] = obj["treeIdPlain"][::-1]
        with pytest.raises(TopicMismatch):
            deserialize(json.dumps(obj))

    @pytest.mark.parametrize("mutation", [
        lambda s: s[: len(s) // 2],          # truncated
        lambda s: s + b"}",                  # trailing junk
        lambda s: b"[1, 2, 3]",              # wrong JSON shape
        lambda s: b"not json at all",
        lambda s: b"\xff\xfe\x00",           # not UTF-8
    ])
    def test_malformed_lines(self, mutation):
        rng = random.Random(27)
        raw = serialize(random_event(rng, block=1, index=0))
        with pytest.raises(MalformedLine):
            deserialize(mutation(raw))

    def test_missing_and_extra_fields(self):
        rng = random.Random(28)
        obj = json.loads(serialize(random_event(rng, block=1, index=0)))
        missing = {k: v for k, v in obj.items() if k != "author"}
        with pytest.raises(MalformedLine):
            deserialize(json.dumps(missing))
        extra = dict(obj)
        extra["surprise"] = 1
        with pytest.raises(MalformedLine):
            deserialize(json.dumps(extra))

    def test_non_integer_block(self):
        rng = random.Random(29)
        obj = json.loads(serialize(random_event(rng, block=1, index=0)))
        obj["blockNumber"] = "1"
        with pytest.raises(MalformedLine):
            deserialize(json.dumps(obj))


class TestEventLog:
    def _log_with_trees(self, rng, n=30):
        log = EventLog()
        trees = [f"{rng.getrandbits(256):064x}" for _ in range(3)]
        for i in range(n):
            log.append(random_event(rng, block=i + 1, index=i,
                                    tree_plain=rng.choice(trees)))
        return log, trees

    def test_append_rejects_non_monotonic(self):
        rng = random.Random(31)
        log = EventLog()
        log.append(random_event(rng, block=5, index=4))
        with pytest.raises(ValueError):
            log.append(random_event(rng, block=5, index=4))
        with pytest.raises(ValueError):
            log.append(random_event(rng, block=4, index=3))

    def test_no_filter_returns_everything_in_order(self):
        rng = random.Random(32)
        log, _ = self._log_with_trees(rng)
        result = log.get_logs(LogQuery())
        assert result == list(log)

    def test_topic_filter_matches_scan(self):
        rng = random.Random(33)
        log, trees = self._log_with_trees(rng)
        for tree in trees:
            topic = string_topic(tree)
            expected = [e for e in log if e.tree_id_topic == topic]
            assert log.get_logs(LogQuery(tree_id_topic=topic)) == expected
            assert get_logs(list(log), LogQuery(tree_id_topic=topic)) == expected

    def test_block_range(self):
        rng = random.Random(34)
        log, _ = self._log_with_trees(rng)
        result = log.get_logs(LogQuery(from_block=10, to_block=20))
        assert result == [e for e in log if 10 <= e.block_number <= 20]

    def test_from_beyond_last_is_empty(self):
        rng = random.Random(35)
        log, _ = self._log_with_trees(rng)
        assert log.get_logs(LogQuery(from_block=10_000)) == []

    def test_latest_sentinel_is_unbounded(self):
        rng = random.Random(36)
        log, _ = self._log_with_trees(rng)
        assert log.get_logs(LogQuery(from_block=0, to_block=None)) == list(log)

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            LogQuery(from_block=5, to_block=4)

    def test_query_json_codec(self):
        from anchortree import query_from_json_dict, query_to_json_dict
        rng = random.Random(38)
        topic = string_topic(f"{rng.getrandbits(256):064x}")
        query = LogQuery(tree_id_topic=topic, from_block=3, to_block=None)
        encoded = query_to_json_dict(query)
        assert encoded["toBlock"] == "latest"
        assert query_from_json_dict(encoded) == query
        bounded = LogQuery(from_block=0, to_block=9)
        assert query_from_json_dict(query_to_json_dict(bounded)) == bounded
        with pytest.raises(ValueError):
            query_from_json_dict({"toBlock": "someday"})

    def test_filters_are_restrictions(self):
        rng = random.Random(37)
        log, trees = self._log_with_trees(rng)
        full = log.get_logs(LogQuery())
        sub = log.get_logs(LogQuery(tree_id_topic=string_topic(trees[0]),
                                    from_block=3, to_block=25))
        assert set(map(id, sub)) <= set(map(id, full))
        assert [e for e in full if e in sub] == sub  # order preserved


class TestAgainstRegistry:
    def test_registry_events_round_trip(self):
        state = fuzz_run(seed=41, n_ops=300)
        for event in state.registry.log:
            assert deserialize(serialize(event)) == event

    def test_tree_query_returns_whole_tree(self):
        state = fuzz_run(seed=42, n_ops=300)
        log = state.registry.log
        info = max(state.trees, key=lambda t: len(t.content_nodes))
        topic = string_topic(info.tree_hex)
        got = {e.ar_id_plain for e in log.get_logs(LogQuery(tree_id_topic=topic))}
        expected = {r.ar_id.value for r in state.registry.registered.values()
                    if r.tree_id_plain == info.tree_hex}
        assert got == expected
