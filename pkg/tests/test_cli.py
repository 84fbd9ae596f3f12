"""CLI workflows: exit codes, file persistence, key hygiene."""

import json
import subprocess
import sys

import pytest

from anchortree import keccak256, token_commitment, tree_id
from anchortree.cli import main
from anchortree.commitments import AnchorId, OwnershipToken

OPERATOR = "c386bbc4cd613e30d8f16adf91b75845ace54dbb"
OTHER_ADDRESS = "ab" * 20
ZERO_SEED = "00" * 32
# keccak256(0^32), pinned (see test_commitments)
KEY_FROM_ZERO_SEED = "290decd9548b62a8d60345a988386fc84ba6bc95484008f6362f93160ef3e563"


@pytest.fixture
def config(tmp_path):
    log_path = tmp_path / "registry.jsonl"
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "logPath": str(log_path),
        "operators": [OPERATOR],
        "seed": "11" * 32,
    }))
    return cfg, log_path


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def reserve_id(capsys, cfg) -> str:
    assert run_cli("reserve", "--config", cfg) == 0
    return json.loads(capsys.readouterr().out)["arId"]


def register_root(capsys, cfg, key_hex, *, type_name="DATASET", manifest="aa" * 32) -> str:
    ar_id = reserve_id(capsys, cfg)
    code = run_cli("register", "--config", cfg, "--id", ar_id, "--type", type_name,
                   "--manifest", manifest, "--key", key_hex)
    assert code == 0
    capsys.readouterr()
    return ar_id


class TestKeygen:
    def test_deterministic_seed(self, capsys):
        assert run_cli("keygen", "--seed", ZERO_SEED) == 0
        out = capsys.readouterr().out.strip()
        assert out == KEY_FROM_ZERO_SEED

    def test_fresh_keys_differ(self, capsys):
        run_cli("keygen")
        first = capsys.readouterr().out.strip()
        run_cli("keygen")
        second = capsys.readouterr().out.strip()
        assert first != second and len(first) == 64

    def test_malformed_seed(self, capsys):
        assert run_cli("keygen", "--seed", "xyz") == 2


class TestCommit:
    def test_matches_library(self, capsys):
        assert run_cli("commit", "--key", KEY_FROM_ZERO_SEED, "--id", "anchor-1") == 0
        obj = json.loads(capsys.readouterr().out)
        token = OwnershipToken.from_hex(KEY_FROM_ZERO_SEED)
        assert obj["tokenCommitment"] == token_commitment(token, AnchorId("anchor-1")).hex
        assert obj["treeId"] == tree_id(token, AnchorId("anchor-1")).hex


class TestHappyPath:
    def test_reserve_register_child(self, capsys, config):
        cfg, log_path = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        child = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", child, "--type", "MODEL",
                       "--manifest", "bb" * 32, "--key", KEY_FROM_ZERO_SEED,
                       "--parent", root) == 0
        event = json.loads(capsys.readouterr().out)
        assert event["parentArId"] == root
        lines = log_path.read_text().strip().splitlines()
        assert len(lines) == 2

    def test_precomputed_commitment_flow(self, capsys, config):
        cfg, log_path = config
        ar_id = reserve_id(capsys, cfg)
        run_cli("commit", "--key", KEY_FROM_ZERO_SEED, "--id", ar_id)
        derived = json.loads(capsys.readouterr().out)
        code = run_cli("register", "--config", cfg, "--id", ar_id, "--type", "DATASET",
                       "--manifest", "cc" * 32,
                       "--commitment", derived["tokenCommitment"],
                       "--tree-id", derived["treeId"])
        assert code == 0
        assert run_cli("verify", "--config", cfg, "--root", ar_id,
                       "--key", KEY_FROM_ZERO_SEED) == 0

    def test_govern_and_attach(self, capsys, config):
        cfg, log_path = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        assert run_cli("govern", "--config", cfg, "--type", "REVIEW",
                       "--target", root) == 0
        capsys.readouterr()
        attach_id = reserve_id(capsys, cfg)
        other_key = keccak256(b"\x01" * 32).hex()
        assert run_cli("attach", "--config", cfg, "--id", attach_id, "--type", "DOCUMENT",
                       "--manifest", "dd" * 32, "--key", other_key,
                       "--target", root) == 0
        capsys.readouterr()
        assert len(log_path.read_text().strip().splitlines()) == 3


class TestExitCodes:
    def test_zero_commitment_exit_11(self, capsys, config):
        cfg, _ = config
        ar_id = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", ar_id, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--commitment", "00" * 32,
                       "--tree-id", "ee" * 32) == 11

    def test_duplicate_exit_12(self, capsys, config):
        cfg, _ = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        assert run_cli("register", "--config", cfg, "--id", root, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED) == 12

    def test_unreserved_exit_13(self, capsys, config):
        cfg, _ = config
        assert run_cli("register", "--config", cfg, "--id", "neverreserved01",
                       "--type", "DATASET", "--manifest", "aa" * 32,
                       "--key", KEY_FROM_ZERO_SEED) == 13

    def test_unknown_target_exit_14(self, capsys, config):
        cfg, _ = config
        register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        assert run_cli("govern", "--config", cfg, "--type", "VOID",
                       "--target", "ghost-anchor") == 14

    def test_unknown_parent_exit_14(self, capsys, config):
        cfg, _ = config
        ar_id = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", ar_id, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED,
                       "--parent", "ghost-parent", "--tree-id", "ee" * 32) == 14

    def test_tree_mismatch_exit_15(self, capsys, config):
        cfg, _ = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        child = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", child, "--type", "MODEL",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED,
                       "--parent", root, "--tree-id", "ff" * 32) == 15

    def test_bad_manifest_exit_16(self, capsys, config):
        cfg, _ = config
        ar_id = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", ar_id, "--type", "DATASET",
                       "--manifest", "zz" * 32, "--key", KEY_FROM_ZERO_SEED) == 16

    def test_not_operator_exit_10(self, capsys, config):
        cfg, _ = config
        ar_id = reserve_id(capsys, cfg)
        assert run_cli("register", "--config", cfg, "--id", ar_id, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED,
                       "--operator", OTHER_ADDRESS) == 10


class TestVerifyAndReconstruct:
    def test_verify_exit_codes(self, capsys, config):
        cfg, _ = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        assert run_cli("verify", "--config", cfg, "--root", root,
                       "--key", KEY_FROM_ZERO_SEED) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["authenticated"] and result["rootCheck"]
        wrong = keccak256(b"\x02" * 32).hex()
        assert run_cli("verify", "--config", cfg, "--root", root, "--key", wrong) == 1

    def test_verify_unknown_root(self, capsys, config):
        cfg, _ = config
        register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        assert run_cli("verify", "--config", cfg, "--root", "ghost",
                       "--key", KEY_FROM_ZERO_SEED) == 1

    def test_reconstruct_full_and_filtered(self, capsys, config):
        cfg, _ = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        other_key = keccak256(b"\x03" * 32).hex()
        other_root = register_root(capsys, cfg, other_key, type_name="CODE",
                                   manifest="ee" * 32)
        assert run_cli("reconstruct", "--config", cfg) == 0
        full = json.loads(capsys.readouterr().out)
        assert len(full["trees"]) == 2
        topic = next(t["treeIdTopic"] for t in full["trees"].values()
                     if t["root"] == root)
        assert run_cli("reconstruct", "--config", cfg, "--tree", topic) == 0
        filtered = json.loads(capsys.readouterr().out)
        assert len(filtered["trees"]) == 1
        only = next(iter(filtered["trees"].values()))
        assert only["root"] == root
        assert other_root not in only["nodes"]

    def test_tampered_log_exit_4(self, capsys, config):
        cfg, log_path = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        line = json.loads(log_path.read_text())
        line["arIdPlain"] = line["arIdPlain"][::-1]
        log_path.write_text(json.dumps(line) + "\n")
        assert run_cli("reconstruct", "--config", cfg) == 4
        assert run_cli("verify", "--config", cfg, "--root", root,
                       "--key", KEY_FROM_ZERO_SEED) == 4

    def test_unreadable_log_exit_3(self, capsys, config):
        cfg, log_path = config
        register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        log_path.write_text(log_path.read_text()[:40] + "\n")
        assert run_cli("reconstruct", "--config", cfg) == 3

    def test_logs_query(self, capsys, config):
        cfg, _ = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        other_key = keccak256(b"\x04" * 32).hex()
        register_root(capsys, cfg, other_key, manifest="ee" * 32)
        assert run_cli("logs", "--config", cfg) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        topic = json.loads(lines[0])["treeId"]
        assert json.loads(lines[0])["arIdPlain"] == root
        assert run_cli("logs", "--config", cfg, "--tree", topic) == 0
        filtered = capsys.readouterr().out.strip().splitlines()
        assert len(filtered) == 1 and json.loads(filtered[0])["arIdPlain"] == root
        assert run_cli("logs", "--config", cfg, "--from-block", "2",
                       "--to-block", "latest") == 0
        ranged = capsys.readouterr().out.strip().splitlines()
        assert len(ranged) == 1
        assert run_cli("logs", "--config", cfg, "--to-block", "someday") == 2


class TestAttackCommand:
    @pytest.mark.parametrize("variant", ["fraudulent-root", "malicious-child", "tree-spoofing"])
    def test_variants_exit_0(self, capsys, variant):
        assert run_cli("attack", "--variant", variant) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["closed"]

    @pytest.mark.parametrize("drill", ["priority", "cascade", "enforcement"])
    def test_drills_exit_0(self, capsys, drill):
        assert run_cli("attack", "--drill", drill) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["harmfulSuccess"]

    def test_drill_variant_mismatch_is_usage_error(self, capsys):
        assert run_cli("attack", "--drill", "priority",
                       "--variant", "malicious-child") == 2


class TestFileHygiene:
    def test_failed_command_leaves_log_identical(self, capsys, config):
        cfg, log_path = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        before = log_path.read_bytes()
        assert run_cli("register", "--config", cfg, "--id", root, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED) == 12
        assert log_path.read_bytes() == before

    def test_key_never_persisted(self, capsys, config, tmp_path):
        cfg, log_path = config
        root = register_root(capsys, cfg, KEY_FROM_ZERO_SEED)
        run_cli("govern", "--config", cfg, "--type", "REVIEW", "--target", root)
        run_cli("verify", "--config", cfg, "--root", root, "--key", KEY_FROM_ZERO_SEED)
        capsys.readouterr()
        for path in tmp_path.rglob("*"):
            if path.is_file():
                assert KEY_FROM_ZERO_SEED.encode() not in path.read_bytes(), path

    def test_reservations_survive_between_invocations(self, capsys, config):
        cfg, _ = config
        first = reserve_id(capsys, cfg)
        second = reserve_id(capsys, cfg)
        assert first != second
        assert run_cli("register", "--config", cfg, "--id", first, "--type", "DATASET",
                       "--manifest", "aa" * 32, "--key", KEY_FROM_ZERO_SEED) == 0


class TestSubprocessEntry:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "anchortree", "keygen", "--seed", ZERO_SEED],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert proc.stdout.strip() == KEY_FROM_ZERO_SEED
