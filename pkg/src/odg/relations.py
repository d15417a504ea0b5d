"""The common relation format exchanged between harvesters and integration.

Every harvester, whatever its source, emits :class:`RelationRecord` objects
serialized one per line as JSON. Semantic integration turns them into
:class:`IntegratedRelation` objects whose endpoints are resolved concept
(CUI) or article (PMID) identifiers; those serialize to a superset of the
same schema so files from either stage stay mutually readable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

CUI_RE = re.compile(r"^C\d{7}$")

ARTICLE_VOCAB = "PMID"
UMLS_VOCAB = "UMLS"


@dataclass(frozen=True)
class Endpoint:
    """A relation endpoint as named by its source: (vocabulary, code)."""

    vocab: str
    code: str
    label: str | None = None

    def to_json(self) -> dict:
        return {"vocab": self.vocab, "code": self.code, "label": self.label}

    @classmethod
    def from_json(cls, obj: dict) -> "Endpoint":
        return cls(vocab=obj["vocab"], code=obj["code"], label=obj.get("label"))


@dataclass
class RelationRecord:
    subject: Endpoint
    predicate: str
    object: Endpoint
    source: str
    attributes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "subject": self.subject.to_json(),
            "predicate": self.predicate,
            "object": self.object.to_json(),
            "source": self.source,
            "attributes": self.attributes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RelationRecord":
        return cls(
            subject=Endpoint.from_json(obj["subject"]),
            predicate=obj["predicate"],
            object=Endpoint.from_json(obj["object"]),
            source=obj["source"],
            attributes=dict(obj.get("attributes") or {}),
        )


@dataclass(frozen=True)
class ResolvedEndpoint:
    """A normalized endpoint: a concept (CUI) or an article (PMID)."""

    kind: str  # "concept" | "article"
    id: str
    label: str | None = None
    semantic_types: tuple[str, ...] = ()
    source_vocab: str | None = None

    def __post_init__(self):
        if self.kind not in ("concept", "article"):
            raise ValueError(f"unknown endpoint kind: {self.kind!r}")
        if self.kind == "concept" and not CUI_RE.match(self.id):
            raise ValueError(f"malformed CUI: {self.id!r}")
        if not self.id:
            raise ValueError("endpoint id must be nonempty")

    def to_json(self) -> dict:
        vocab = UMLS_VOCAB if self.kind == "concept" else ARTICLE_VOCAB
        out = {"vocab": vocab, "code": self.id, "label": self.label}
        if self.semantic_types:
            out["semtypes"] = sorted(self.semantic_types)
        if self.source_vocab:
            out["source_vocab"] = self.source_vocab
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ResolvedEndpoint":
        vocab = obj["vocab"]
        if vocab == ARTICLE_VOCAB:
            kind = "article"
        elif vocab == UMLS_VOCAB:
            kind = "concept"
        else:
            raise ValueError(
                f"endpoint vocabulary {vocab!r} is not integrated; "
                "run semantic integration before this stage"
            )
        return cls(
            kind=kind,
            id=obj["code"],
            label=obj.get("label"),
            semantic_types=tuple(obj.get("semtypes") or ()),
            source_vocab=obj.get("source_vocab"),
        )


@dataclass
class IntegratedRelation:
    subject: ResolvedEndpoint
    predicate: str
    object: ResolvedEndpoint
    source: str
    attributes: dict = field(default_factory=dict)

    @property
    def subject_cui(self) -> str | None:
        return self.subject.id if self.subject.kind == "concept" else None

    @property
    def subject_pmid(self) -> str | None:
        return self.subject.id if self.subject.kind == "article" else None

    @property
    def object_cui(self) -> str | None:
        return self.object.id if self.object.kind == "concept" else None

    @property
    def object_pmid(self) -> str | None:
        return self.object.id if self.object.kind == "article" else None

    def to_json(self) -> dict:
        return {
            "subject": self.subject.to_json(),
            "predicate": self.predicate,
            "object": self.object.to_json(),
            "source": self.source,
            "attributes": self.attributes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IntegratedRelation":
        return cls(
            subject=ResolvedEndpoint.from_json(obj["subject"]),
            predicate=obj["predicate"],
            object=ResolvedEndpoint.from_json(obj["object"]),
            source=obj["source"],
            attributes=dict(obj.get("attributes") or {}),
        )

    def as_relation_record(self) -> RelationRecord:
        sub = self.to_json()["subject"]
        obj = self.to_json()["object"]
        return RelationRecord(
            subject=Endpoint(sub["vocab"], sub["code"], sub.get("label")),
            predicate=self.predicate,
            object=Endpoint(obj["vocab"], obj["code"], obj.get("label")),
            source=self.source,
            attributes=dict(self.attributes),
        )


def write_relations(path: str | Path, relations: Iterable) -> int:
    """Write RelationRecords or IntegratedRelations, one JSON object per line."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rel in relations:
            fh.write(json.dumps(rel.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    return n


def read_relations(path: str | Path) -> Iterator[RelationRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield RelationRecord.from_json(json.loads(line))


def read_integrated_relations(path: str | Path) -> Iterator[IntegratedRelation]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield IntegratedRelation.from_json(json.loads(line))


def _looks_integrated(obj: dict) -> bool:
    for side in (obj.get("subject") or {}, obj.get("object") or {}):
        if "semtypes" in side or "source_vocab" in side:
            return True
    return False


def read_any_relations(path: str | Path) -> Iterator[RelationRecord | IntegratedRelation]:
    """Read a relation file whether or not it has been integrated yet."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if _looks_integrated(obj):
                yield IntegratedRelation.from_json(obj)
            else:
                yield RelationRecord.from_json(obj)
