"""Command-line front end with file-based persistence.

The JSONL event log is the registry's durable state: every mutating command
replays it, applies one operation, and appends exactly one line on success
(a failed command leaves the file byte-identical). PENDING reservations are
not events, so they live in a sidecar JSON file next to the log. A POSIX
advisory lock serializes mutating commands per log file.

Machine-readable JSON goes to stdout, diagnostics to stderr. Ownership keys
are accepted as arguments and printed by ``keygen`` but are never written
to the log, the sidecar, or any other file.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import keccak
from .commitments import AnchorId, Digest32, OwnershipToken, generate_token, keygen, token_commitment, tree_id
from .errors import (
    AccountTreeMismatch,
    AnchorTreeError,
    BadManifestHash,
    DuplicateArtifact,
    MalformedLine,
    MissingTokenCommitment,
    NoAccountAnchor,
    NotOperator,
    RegistryError,
    TopicMismatch,
    TreeIdMismatch,
    UnknownParent,
    UnknownRoot,
    UnknownTarget,
    UnreservedId,
)
from .eventlog import append_line, get_logs, query_from_json_dict, read_log, serialize, string_topic
from .poisoning import Mechanism, Variant, necessity_drill, run_variant
from .records import OperatorId, RegistrationRequest
from .reconstruction import forest_to_json, reconstruct, tree_to_json
from .registry import Registry
from .taxonomy import DEFAULT_TAXONOMY, Taxonomy, load_taxonomy
from .verification import authenticate_tree

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BAD_LOG = 3
EXIT_TAMPERED = 4
EXIT_NOT_OPERATOR = 10
EXIT_MISSING_COMMITMENT = 11
EXIT_DUPLICATE = 12
EXIT_UNRESERVED = 13
EXIT_UNKNOWN_PARENT = 14
EXIT_TREE_MISMATCH = 15
EXIT_BAD_MANIFEST = 16
EXIT_ACCOUNT = 17
EXIT_REGISTRY_OTHER = 18

_HEX64 = re.compile(r"[0-9a-f]{64}\Z")


def exit_code_for(exc: AnchorTreeError) -> int:
    if isinstance(exc, NotOperator):
        return EXIT_NOT_OPERATOR
    if isinstance(exc, MissingTokenCommitment):
        return EXIT_MISSING_COMMITMENT
    if isinstance(exc, DuplicateArtifact):
        return EXIT_DUPLICATE
    if isinstance(exc, UnreservedId):
        return EXIT_UNRESERVED
    if isinstance(exc, (UnknownParent, UnknownTarget)):
        return EXIT_UNKNOWN_PARENT
    if isinstance(exc, TreeIdMismatch):
        return EXIT_TREE_MISMATCH
    if isinstance(exc, BadManifestHash):
        return EXIT_BAD_MANIFEST
    if isinstance(exc, (NoAccountAnchor, AccountTreeMismatch)):
        return EXIT_ACCOUNT
    if isinstance(exc, RegistryError):
        return EXIT_REGISTRY_OTHER
    if isinstance(exc, TopicMismatch):
        return EXIT_TAMPERED
    if isinstance(exc, MalformedLine):
        return EXIT_BAD_LOG
    return EXIT_FAILED


@dataclass
class CliConfig:
    log_path: Path
    operators: list[OperatorId]
    taxonomy: Taxonomy
    seed: int | None

    @property
    def reservations_path(self) -> Path:
        return Path(str(self.log_path) + ".reservations.json")

    @property
    def lock_path(self) -> Path:
        return Path(str(self.log_path) + ".lock")


def load_config(path: str) -> CliConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(_usage_error(f"cannot read config {path}: {exc}"))
    log_path = raw.get("logPath")
    operators = raw.get("operators")
    if not isinstance(log_path, str) or not log_path:
        raise SystemExit(_usage_error("config needs a logPath"))
    if not isinstance(operators, list) or not operators:
        raise SystemExit(_usage_error("config needs a non-empty operators list"))
    log = Path(log_path)
    if not log.parent.exists():
        raise SystemExit(_usage_error(f"log directory does not exist: {log.parent}"))
    try:
        ops = [OperatorId.from_hex(o) for o in operators]
    except (ValueError, AttributeError) as exc:
        raise SystemExit(_usage_error(f"bad operator address: {exc}"))
    taxonomy = DEFAULT_TAXONOMY
    if raw.get("taxonomyPath"):
        try:
            taxonomy = load_taxonomy(raw["taxonomyPath"])
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise SystemExit(_usage_error(f"bad taxonomy file: {exc}"))
    seed = None
    if raw.get("seed") is not None:
        seed_hex = raw["seed"]
        if not isinstance(seed_hex, str) or not _HEX64.match(seed_hex):
            raise SystemExit(_usage_error("config seed must be 64 lowercase hex chars"))
        seed = int.from_bytes(bytes.fromhex(seed_hex), "big")
    return CliConfig(log_path=log, operators=ops, taxonomy=taxonomy, seed=seed)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


@contextlib.contextmanager
def _file_lock(path: Path):
    """Advisory lock honoring the single-writer contract per log file."""
    try:
        import fcntl
    except ImportError:  # non-POSIX fallback: no locking
        yield
        return
    with open(path, "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _load_registry(cfg: CliConfig) -> Registry:
    events = read_log(cfg.log_path) if cfg.log_path.exists() else []
    registry = Registry.replay(events, cfg.operators, taxonomy=cfg.taxonomy, seed=cfg.seed)
    if cfg.reservations_path.exists():
        pending = json.loads(cfg.reservations_path.read_text(encoding="utf-8"))
        registry.restore_reservations(pending)
    return registry


def _save_reservations(cfg: CliConfig, registry: Registry) -> None:
    payload = json.dumps(dict(registry.reservations), indent=2, sort_keys=True)
    tmp = cfg.reservations_path.with_name(cfg.reservations_path.name + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    os.replace(tmp, cfg.reservations_path)


def _print_json(obj: object) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _resolve_operator(cfg: CliConfig, flag: str | None) -> OperatorId:
    return OperatorId.from_hex(flag) if flag else cfg.operators[0]


def _parse_key(text: str) -> OwnershipToken:
    return OwnershipToken.from_hex(text.lower().removeprefix("0x"))


# --- commands ----------------------------------------------------------------

def cmd_keygen(args: argparse.Namespace) -> int:
    if args.seed is not None:
        seed_hex = args.seed.lower().removeprefix("0x")
        if not _HEX64.match(seed_hex):
            return _usage_error("--seed must be 64 hex chars")
        token = keygen(bytes.fromhex(seed_hex))
    else:
        token = generate_token()
    print(token.hex)
    print("keep this key offline; it is the only proof of tree ownership", file=sys.stderr)
    return EXIT_OK


def cmd_commit(args: argparse.Namespace) -> int:
    """Client-side helper: derive commitments without touching registry state,
    so the key never has to reach the machine running the registry."""
    try:
        token = _parse_key(args.key)
        anchor = AnchorId(args.id)
    except ValueError as exc:
        return _usage_error(str(exc))
    _print_json({
        "arId": anchor.value,
        "tokenCommitment": token_commitment(token, anchor).hex,
        "treeId": tree_id(token, anchor).hex,
    })
    return EXIT_OK


def cmd_reserve(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    with _file_lock(cfg.lock_path):
        registry = _load_registry(cfg)
        ar_id = registry.reserve(requested_by=args.client)
        _save_reservations(cfg, registry)
    _print_json({"arId": ar_id.value, "status": "PENDING"})
    return EXIT_OK


def _registration_request(args: argparse.Namespace, cfg: CliConfig, registry: Registry) -> RegistrationRequest:
    anchor = AnchorId(args.id)
    if args.key is not None:
        token = _parse_key(args.key)
        commitment = token_commitment(token, anchor)
    else:
        commitment = Digest32.from_hex(args.commitment.lower().removeprefix("0x"))
    parent = AnchorId(args.parent) if getattr(args, "parent", None) else None
    if args.tree_id is not None:
        tree_hex = args.tree_id.lower().removeprefix("0x")
    elif parent is not None and parent.value in registry.registered:
        tree_hex = registry.registered[parent.value].tree_id_plain
    elif parent is None and getattr(args, "target", None) is None and args.key is not None:
        tree_hex = tree_id(_parse_key(args.key), anchor).hex
    elif getattr(args, "target", None) is not None and args.key is not None:
        # a targeted attachment starts its own lineage unless told otherwise
        tree_hex = tree_id(_parse_key(args.key), anchor).hex
    else:
        raise AnchorTreeError("--tree-id is required when no --key is given")
    return RegistrationRequest(
        ar_id=anchor,
        artifact_type=cfg.taxonomy.get(args.type),
        manifest_hash=args.manifest.lower().removeprefix("0x"),
        tree_id_plain=tree_hex,
        token_commitment=commitment,
        parent_ar_id=parent,
        descriptor=args.descriptor,
        title=args.title,
        author=args.author,
    )


def _mutate(cfg: CliConfig, apply) -> int:
    """Replay, apply one operation, append on success."""
    with _file_lock(cfg.lock_path):
        registry = _load_registry(cfg)
        event = apply(registry)
        append_line(cfg.log_path, event)
        _save_reservations(cfg, registry)
    print(serialize(event).decode("utf-8"))
    return EXIT_OK


def cmd_register(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    operator = _resolve_operator(cfg, args.operator)

    def apply(registry: Registry):
        req = _registration_request(args, cfg, registry)
        if args.account:
            return registry.register_gated(operator, req, AnchorId(args.account))
        return registry.register_content(operator, req)

    return _mutate(cfg, apply)


def cmd_attach(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    operator = _resolve_operator(cfg, args.operator)

    def apply(registry: Registry):
        req = _registration_request(args, cfg, registry)
        return registry.register_targeted(operator, req, AnchorId(args.target))

    return _mutate(cfg, apply)


def cmd_govern(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    operator = _resolve_operator(cfg, args.operator)

    def apply(registry: Registry):
        return registry.register_governance(
            operator, args.type, AnchorId(args.target), descriptor=args.descriptor)

    return _mutate(cfg, apply)


def cmd_reconstruct(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    keccak.enable_acceleration()
    events = read_log(cfg.log_path) if cfg.log_path.exists() else []
    forest = reconstruct(events)
    if args.tree is None:
        _print_json(forest_to_json(forest))
        return EXIT_OK
    topic = args.tree.lower().removeprefix("0x")
    matching = [t for t in forest.components()
                if string_topic(t.tree_id.hex).hex == topic]
    picked = {t.tree_id.hex: tree_to_json(t) for t in matching}
    members = set()
    for t in matching:
        members |= set(t.nodes)
    edges = [[c.value, p.value] for c, p in forest.cross_edges
             if c.value in members or p.value in members]
    _print_json({"trees": picked, "crossEdges": edges})
    return EXIT_OK


def cmd_logs(args: argparse.Namespace) -> int:
    """The targeted log query: JSONL of matching events to stdout."""
    cfg = load_config(args.config)
    try:
        query = query_from_json_dict({
            "treeIdTopic": args.tree.lower().removeprefix("0x") if args.tree else None,
            "fromBlock": args.from_block,
            "toBlock": args.to_block if args.to_block == "latest" else int(args.to_block),
        })
    except ValueError as exc:
        return _usage_error(str(exc))
    events = read_log(cfg.log_path) if cfg.log_path.exists() else []
    for event in get_logs(events, query):
        print(serialize(event).decode("utf-8"))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    keccak.enable_acceleration()
    try:
        token = _parse_key(args.key)
    except ValueError as exc:
        return _usage_error(str(exc))
    events = read_log(cfg.log_path) if cfg.log_path.exists() else []
    forest = reconstruct(events)
    try:
        result = authenticate_tree(token, AnchorId(args.root), forest)
    except UnknownRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _print_json(result.to_json_dict())
    return EXIT_OK if result.authenticated else EXIT_FAILED


_VARIANTS = {
    "fraudulent-root": Variant.FRAUDULENT_ROOT,
    "malicious-child": Variant.MALICIOUS_CHILD,
    "tree-spoofing": Variant.TREE_SPOOFING,
}

_MECHANISMS = {
    "priority": Mechanism.CRYPTOGRAPHIC_PRIORITY,
    "cascade": Mechanism.GOVERNANCE_CASCADE,
    "enforcement": Mechanism.CONTRACT_ENFORCEMENT,
}

_DRILL_VARIANT = {
    Mechanism.CRYPTOGRAPHIC_PRIORITY: Variant.FRAUDULENT_ROOT,
    Mechanism.GOVERNANCE_CASCADE: Variant.MALICIOUS_CHILD,
    Mechanism.CONTRACT_ENFORCEMENT: Variant.TREE_SPOOFING,
}


def cmd_attack(args: argparse.Namespace) -> int:
    keccak.enable_acceleration()
    if args.drill is not None:
        mechanism = _MECHANISMS[args.drill]
        if args.variant is not None and _VARIANTS[args.variant] is not _DRILL_VARIANT[mechanism]:
            return _usage_error(
                f"--drill {args.drill} exercises {_DRILL_VARIANT[mechanism].value}")
        report = necessity_drill(mechanism, seed=args.seed)
        _print_json(report.to_json_dict())
        return EXIT_OK if report.harmful_success else EXIT_FAILED
    if args.variant is None:
        return _usage_error("attack needs --variant or --drill")
    outcome = run_variant(_VARIANTS[args.variant], seed=args.seed)
    _print_json(outcome.to_json_dict())
    return EXIT_OK if outcome.closed else EXIT_FAILED


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchortree",
        description="Operator-gated provenance registry over a JSONL event log.",
        epilog=(
            "exit codes: 0 ok/authenticated/closed; 1 failed; 2 usage; "
            "3 unreadable log; 4 tampered log; 10 NotOperator; "
            "11 MissingTokenCommitment; 12 DuplicateArtifact; 13 UnreservedId; "
            "14 UnknownParent/Target; 15 TreeIdMismatch; 16 BadManifestHash; "
            "17 account-anchor errors; 18 other registry rejections"),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate an ownership key (stdout only)")
    p.add_argument("--seed", help="64 hex chars of entropy for a deterministic key")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("commit", help="derive commitments locally from a key")
    p.add_argument("--key", required=True, help="ownership key hex")
    p.add_argument("--id", required=True, help="anchor id")
    p.set_defaults(func=cmd_commit)

    p = sub.add_parser("reserve", help="reserve a fresh anchor id (PENDING)")
    p.add_argument("--config", required=True)
    p.add_argument("--client", default="", help="opaque client reference")
    p.set_defaults(func=cmd_reserve)

    def registration_flags(p: argparse.ArgumentParser, *, with_parent: bool) -> None:
        p.add_argument("--config", required=True)
        p.add_argument("--id", required=True, help="reserved anchor id")
        p.add_argument("--type", required=True, help="artifact type name")
        p.add_argument("--manifest", required=True, help="sha-256 of the manifest, hex")
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--key", help="ownership key hex (commitment computed locally)")
        group.add_argument("--commitment", help="precomputed commitment hex")
        p.add_argument("--tree-id", dest="tree_id", help="tree identity hex")
        if with_parent:
            p.add_argument("--parent", help="parent anchor id")
            p.add_argument("--account", help="ACCOUNT anchor id (batch/gated path)")
        p.add_argument("--descriptor", default="")
        p.add_argument("--title", default="")
        p.add_argument("--author", default="")
        p.add_argument("--operator", help="operator address (default: first in config)")

    p = sub.add_parser("register", help="register a content or ACCOUNT anchor")
    registration_flags(p, with_parent=True)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("attach", help="targeted attachment under any registered anchor")
    registration_flags(p, with_parent=False)
    p.add_argument("--target", required=True, help="anchor to attach under")
    p.set_defaults(func=cmd_attach)

    p = sub.add_parser("govern", help="operator governance anchor (REVIEW/VOID/AFFIRMED)")
    p.add_argument("--config", required=True)
    p.add_argument("--type", required=True, choices=["REVIEW", "VOID", "AFFIRMED"])
    p.add_argument("--target", required=True)
    p.add_argument("--descriptor", default="")
    p.add_argument("--operator")
    p.set_defaults(func=cmd_govern)

    p = sub.add_parser("reconstruct", help="rebuild the forest from the log")
    p.add_argument("--config", required=True)
    p.add_argument("--tree", help="tree topic hex: emit only that tree")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("logs", help="query the event log by tree topic and block range")
    p.add_argument("--config", required=True)
    p.add_argument("--tree", help="tree topic hex filter")
    p.add_argument("--from-block", dest="from_block", type=int, default=0)
    p.add_argument("--to-block", dest="to_block", default="latest",
                   help="block number or 'latest'")
    p.set_defaults(func=cmd_logs)

    p = sub.add_parser("verify", help="authenticate a tree with an ownership key")
    p.add_argument("--config", required=True)
    p.add_argument("--root", required=True, help="root anchor id")
    p.add_argument("--key", required=True, help="ownership key hex")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("attack", help="run a poisoning variant or necessity drill")
    p.add_argument("--variant", choices=sorted(_VARIANTS))
    p.add_argument("--drill", choices=sorted(_MECHANISMS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_attack)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TopicMismatch as exc:
        print(f"error: tampered log: {exc}", file=sys.stderr)
        return EXIT_TAMPERED
    except MalformedLine as exc:
        print(f"error: unreadable log: {exc}", file=sys.stderr)
        return EXIT_BAD_LOG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_LOG
    except AnchorTreeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
