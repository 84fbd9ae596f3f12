"""Artifact type taxonomy.

Enforcement logic never depends on a type's name, only on its class:
CONTENT anchors are user-paid registrations carrying a commitment,
GOVERNANCE anchors are operator actions carrying the zero sentinel, and the
single ACCOUNT type backs batch (gated) registration. The concrete content
type list is configuration; a default set is shipped and a JSON file can
replace it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator


class ArtifactClass(Enum):
    CONTENT = "CONTENT"
    GOVERNANCE = "GOVERNANCE"
    ACCOUNT = "ACCOUNT"


@dataclass(frozen=True, slots=True)
class ArtifactType:
    name: str
    artifact_class: ArtifactClass


#: Governance is a closed set; these names are structural, not configurable.
GOVERNANCE_TYPE_NAMES = ("REVIEW", "VOID", "AFFIRMED")

ACCOUNT_TYPE_NAME = "ACCOUNT"

DEFAULT_CONTENT_TYPE_NAMES = ("DATASET", "MODEL", "DOCUMENT", "IMAGE", "AUDIO", "CODE")


class Taxonomy:
    """An immutable name -> ArtifactType map with the class-set invariants."""

    def __init__(self, types: Iterable[ArtifactType]):
        by_name: dict[str, ArtifactType] = {}
        for t in types:
            if t.name in by_name:
                raise ValueError(f"duplicate artifact type name: {t.name}")
            by_name[t.name] = t
        governance = {n for n, t in by_name.items()
                      if t.artifact_class is ArtifactClass.GOVERNANCE}
        if governance != set(GOVERNANCE_TYPE_NAMES):
            raise ValueError(
                f"governance class must be exactly {set(GOVERNANCE_TYPE_NAMES)}, got {governance}")
        account = {n for n, t in by_name.items()
                   if t.artifact_class is ArtifactClass.ACCOUNT}
        if account != {ACCOUNT_TYPE_NAME}:
            raise ValueError(f"account class must be exactly {{{ACCOUNT_TYPE_NAME!r}}}, got {account}")
        if not any(t.artifact_class is ArtifactClass.CONTENT for t in by_name.values()):
            raise ValueError("taxonomy needs at least one content type")
        self._types = dict(by_name)

    def __contains__(self, name: str) -> bool:
        return name in self._types

    def __iter__(self) -> Iterator[ArtifactType]:
        return iter(self._types.values())

    def get(self, name: str) -> ArtifactType:
        try:
            return self._types[name]
        except KeyError:
            raise KeyError(f"unknown artifact type: {name}") from None

    def content_type_names(self) -> tuple[str, ...]:
        return tuple(n for n, t in self._types.items()
                     if t.artifact_class is ArtifactClass.CONTENT)


def _build_default() -> Taxonomy:
    types = [ArtifactType(n, ArtifactClass.CONTENT) for n in DEFAULT_CONTENT_TYPE_NAMES]
    types.append(ArtifactType(ACCOUNT_TYPE_NAME, ArtifactClass.ACCOUNT))
    types.extend(ArtifactType(n, ArtifactClass.GOVERNANCE) for n in GOVERNANCE_TYPE_NAMES)
    return Taxonomy(types)


DEFAULT_TAXONOMY = _build_default()


@lru_cache(maxsize=None)
def classify_type_name(name: str) -> ArtifactType:
    """Classify a type name by convention alone (for log reconstruction).

    Governance and ACCOUNT names are structural; anything else is content.
    This reproduces the registry's types without needing its configuration,
    which is what keeps reconstruction trustless. Cached so that rebuilding
    a large log shares one type object per name.
    """
    if name in GOVERNANCE_TYPE_NAMES:
        return ArtifactType(name, ArtifactClass.GOVERNANCE)
    if name == ACCOUNT_TYPE_NAME:
        return ArtifactType(name, ArtifactClass.ACCOUNT)
    return ArtifactType(name, ArtifactClass.CONTENT)


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Load a taxonomy from JSON: {"types": [{"name": ..., "class": ...}, ...]}.

    Governance and ACCOUNT entries may be omitted; they are always added.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = raw.get("types")
    if not isinstance(entries, list):
        raise ValueError("taxonomy file needs a 'types' list")
    types: list[ArtifactType] = []
    seen: set[str] = set()
    for entry in entries:
        name = entry.get("name")
        klass = entry.get("class", "CONTENT")
        if not isinstance(name, str) or not name:
            raise ValueError(f"bad taxonomy entry: {entry!r}")
        types.append(ArtifactType(name, ArtifactClass(klass)))
        seen.add(name)
    for name in GOVERNANCE_TYPE_NAMES:
        if name not in seen:
            types.append(ArtifactType(name, ArtifactClass.GOVERNANCE))
    if ACCOUNT_TYPE_NAME not in seen:
        types.append(ArtifactType(ACCOUNT_TYPE_NAME, ArtifactClass.ACCOUNT))
    return Taxonomy(types)
