"""Resolve relation endpoints to UMLS concepts and attach semantic types."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .mapping import MappingTable
from .relations import (
    ARTICLE_VOCAB,
    CUI_RE,
    UMLS_VOCAB,
    Endpoint,
    IntegratedRelation,
    RelationRecord,
    ResolvedEndpoint,
)

logger = logging.getLogger(__name__)


@dataclass
class UnmappedEntry:
    """One input relation diverted because an endpoint had no concept mapping."""

    predicate: str
    source: str
    endpoints: list[dict] = field(default_factory=list)
    record: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "predicate": self.predicate,
            "source": self.source,
            "unmapped_endpoints": self.endpoints,
            "record": self.record,
        }


def _resolve_endpoint(ep: Endpoint, table: MappingTable) -> ResolvedEndpoint | None:
    if ep.vocab == ARTICLE_VOCAB:
        return ResolvedEndpoint(kind="article", id=ep.code, label=ep.label)
    if ep.vocab == UMLS_VOCAB:
        if not CUI_RE.match(ep.code):
            return None
        cui = ep.code
        source_vocab = UMLS_VOCAB
    else:
        mapped = table.lookup(ep.vocab, ep.code)
        if mapped is None:
            return None
        cui = mapped
        source_vocab = ep.vocab
    return ResolvedEndpoint(
        kind="concept",
        id=cui,
        label=table.preferred_name(cui) or ep.label,
        semantic_types=tuple(sorted(table.semantic_types(cui))),
        source_vocab=source_vocab,
    )


def resolve_relations(
    records: Sequence[RelationRecord | IntegratedRelation],
    table: MappingTable,
) -> tuple[list[IntegratedRelation], list[UnmappedEntry]]:
    """Map every concept endpoint to a CUI; divert what cannot be mapped.

    Nothing is silently dropped: every input record lands either in the
    integrated output or in the unmapped report, so the two lengths always
    sum to the input length. Feeding the integrated output back in is a
    no-op (already-resolved endpoints pass straight through).
    """
    integrated: list[IntegratedRelation] = []
    unmapped: list[UnmappedEntry] = []
    for rec in records:
        if isinstance(rec, IntegratedRelation):
            integrated.append(rec)
            continue
        resolved_subject = _resolve_endpoint(rec.subject, table)
        resolved_object = _resolve_endpoint(rec.object, table)
        misses = []
        if resolved_subject is None:
            misses.append(rec.subject.to_json())
        if resolved_object is None:
            misses.append(rec.object.to_json())
        if misses:
            unmapped.append(
                UnmappedEntry(
                    predicate=rec.predicate,
                    source=rec.source,
                    endpoints=misses,
                    record=rec.to_json(),
                )
            )
            continue
        integrated.append(
            IntegratedRelation(
                subject=resolved_subject,
                predicate=rec.predicate,
                object=resolved_object,
                source=rec.source,
                attributes=dict(rec.attributes),
            )
        )
    return integrated, unmapped


def write_unmapped_report(path: str | Path, entries: Iterable[UnmappedEntry]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    return n
