"""Trustless reconstruction: rebuild the provenance forest from events alone.

One pass over the log, one node per event, edges from the parent field,
O(1) amortized map work per event. Components follow lineage: a parentless
event roots a component; a child joins its parent's component when it
shares the parent's tree identity (governance anchors always join). A
child that declares a foreign tree identity is a cross-tree attachment:
the edge is recorded separately and the child roots its own component, so
a victim tree's node set is never polluted by someone else's declarations.

VOID anchors are both nodes (attached under their target) and suppression
directives. The cascade is a view over the final graph: the target and
everything below it become invisible, while the log itself (and therefore
the reconstruction input) is never altered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .commitments import AnchorId, Digest32
from .errors import CycleDetected, DuplicateId, OrphanParent, UnknownId, UnknownTree
from .eventlog import AnchoredEvent, record_from_event, string_topic
from .records import AnchorRecord
from .taxonomy import ArtifactClass

_VOID = "VOID"


@dataclass(slots=True)
class ProvenanceTree:
    """One lineage component: a root and everything reachable from it."""

    root: AnchorId
    tree_id: Digest32
    nodes: dict[str, AnchorRecord] = field(default_factory=dict)
    children: dict[str, list[str]] = field(default_factory=dict)
    suppressed: set[str] = field(default_factory=set)
    root_position: tuple[int, int] = (0, 0)

    @property
    def visible(self) -> set[str]:
        return set(self.nodes) - self.suppressed


@dataclass
class ReconstructionStats:
    events_processed: int = 0
    nodes_visited: int = 0


@dataclass
class Forest:
    """All components rebuilt from a log.

    ``trees`` is keyed by tree identity and holds, for each identity, the
    component whose root registered first; registration order is the
    priority rule, so a later parentless event claiming an already-claimed
    identity lands in ``duplicate_claims`` instead (that is the spoofed-root
    shape; it never displaces the original).
    """

    trees: dict[Digest32, ProvenanceTree] = field(default_factory=dict)
    cross_edges: list[tuple[AnchorId, AnchorId]] = field(default_factory=list)
    duplicate_claims: list[ProvenanceTree] = field(default_factory=list)
    roots: dict[str, ProvenanceTree] = field(default_factory=dict)
    stats: ReconstructionStats = field(default_factory=ReconstructionStats)

    def components(self) -> list[ProvenanceTree]:
        return list(self.trees.values()) + list(self.duplicate_claims)

    def node_count(self) -> int:
        return sum(len(t.nodes) for t in self.components())


def reconstruct(events: Iterable[AnchoredEvent], *, apply_void_cascade: bool = True) -> Forest:
    """Rebuild the forest from an ordered event sequence.

    ``apply_void_cascade=False`` is the test-only toggle for the necessity
    drill: nodes and edges build as usual but no suppression view is
    computed.
    """
    forest = Forest()
    seen: dict[str, AnchorRecord] = {}
    component_of: dict[str, ProvenanceTree] = {}
    void_targets: list[tuple[ProvenanceTree, str]] = []
    last_position: tuple[int, int] | None = None
    processed = 0

    for event in events:
        if last_position is not None and event.position <= last_position:
            raise ValueError(f"events out of order at {event.position}")
        last_position = event.position
        record = record_from_event(event)
        processed += 1
        ar_id = record.ar_id.value

        if ar_id in seen:
            raise DuplicateId(f"two events carry anchor id {ar_id!r}")
        seen[ar_id] = record

        if record.parent_ar_id is None:
            _start_component(forest, component_of, record)
            continue

        parent_id = record.parent_ar_id.value
        parent = seen.get(parent_id)
        if parent is None:
            raise OrphanParent(f"{ar_id!r} arrived before its parent {parent_id!r}")

        joins_lineage = (
            record.artifact_class is ArtifactClass.GOVERNANCE
            or record.tree_id == parent.tree_id
        )
        if joins_lineage:
            tree = component_of[parent_id]
            tree.nodes[ar_id] = record
            tree.children[parent_id].append(ar_id)
            tree.children[ar_id] = []
            component_of[ar_id] = tree
            if record.artifact_type.name == _VOID:
                void_targets.append((tree, parent_id))
        else:
            forest.cross_edges.append((record.ar_id, record.parent_ar_id))
            _start_component(forest, component_of, record)

    forest.stats.events_processed = processed
    forest.stats.nodes_visited = processed
    if apply_void_cascade:
        # Governance anchors are never suppressed: the VOID directive itself
        # (a child of its target) and any other annotations stay visible as
        # the audit trail; the cascade hides the artifact subtree only.
        for tree, target in void_targets:
            below = _collect_descendants(tree, target, forest.stats)
            for ar_id in {target} | below:
                if tree.nodes[ar_id].artifact_class is not ArtifactClass.GOVERNANCE:
                    tree.suppressed.add(ar_id)

    return forest


def _start_component(
    forest: Forest,
    component_of: dict[str, ProvenanceTree],
    record: AnchorRecord,
) -> None:
    ar_id = record.ar_id.value
    tree = ProvenanceTree(
        root=record.ar_id,
        tree_id=record.tree_id,
        nodes={ar_id: record},
        children={ar_id: []},
        root_position=record.position,
    )
    component_of[ar_id] = tree
    forest.roots[ar_id] = tree
    if record.tree_id in forest.trees:
        forest.duplicate_claims.append(tree)
    else:
        forest.trees[record.tree_id] = tree


def descendants(tree: ProvenanceTree, anchor: AnchorId | str) -> set[str]:
    """Everything reachable from ``anchor`` via child edges, excluding it."""
    start = anchor.value if isinstance(anchor, AnchorId) else anchor
    if start not in tree.nodes:
        raise UnknownId(f"{start!r} is not in this tree")
    return _collect_descendants(tree, start, None)


def _collect_descendants(
    tree: ProvenanceTree,
    start: str,
    stats: ReconstructionStats | None,
) -> set[str]:
    out: set[str] = set()
    stack = list(tree.children.get(start, ()))
    while stack:
        node = stack.pop()
        if node in out:
            # impossible for honest logs (each node has exactly one parent)
            raise CycleDetected(f"{node!r} reachable twice below {start!r}")
        out.add(node)
        if stats is not None:
            stats.nodes_visited += 1
        stack.extend(tree.children.get(node, ()))
    return out


def priority(forest: Forest, tree_id_a: Digest32, tree_id_b: Digest32) -> Digest32:
    """Resolve competing tree identities: the earlier-registered root wins.

    The order is total (one block per event) so ties cannot happen.
    """
    for tid in (tree_id_a, tree_id_b):
        if tid not in forest.trees:
            raise UnknownTree(f"no tree with identity {tid.hex}")
    if tree_id_a == tree_id_b:
        return tree_id_a
    a = forest.trees[tree_id_a]
    b = forest.trees[tree_id_b]
    assert a.root_position != b.root_position, "total order violated"
    return tree_id_a if a.root_position < b.root_position else tree_id_b


# --- JSON dump (CLI output shape) -------------------------------------------

def _node_to_json(record: AnchorRecord) -> dict:
    return {
        "arId": record.ar_id.value,
        "artifactType": record.artifact_type.name,
        "arIdPlain": record.ar_id.value,
        "descriptor": record.descriptor,
        "title": record.title,
        "author": record.author,
        "manifestHash": record.manifest_hash,
        "parentArId": record.parent_ar_id.value if record.parent_ar_id else "",
        "treeIdPlain": record.tree_id_plain,
        "tokenCommitment": record.token_commitment.hex,
        "registrant": record.registrant.address,
        "blockNumber": record.block_number,
        "logIndex": record.log_index,
    }


def tree_to_json(tree: ProvenanceTree) -> dict:
    return {
        "root": tree.root.value,
        "treeId": tree.tree_id.hex,
        "treeIdTopic": string_topic(tree.tree_id.hex).hex,
        "nodes": {ar_id: _node_to_json(rec) for ar_id, rec in tree.nodes.items()},
        "children": {ar_id: list(kids) for ar_id, kids in tree.children.items()},
        "suppressed": sorted(tree.suppressed),
    }


def forest_to_json(forest: Forest) -> dict:
    return {
        "trees": {tree.tree_id.hex: tree_to_json(tree) for tree in forest.trees.values()},
        "crossEdges": [[child.value, target.value] for child, target in forest.cross_edges],
        "duplicateClaims": [tree_to_json(tree) for tree in forest.duplicate_claims],
    }
