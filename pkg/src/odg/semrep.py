"""Ingestion of externally produced fielded predication output.

The upstream extractor writes pipe-delimited records; which field sits where
is pinned by a column map (see ``data/semrep_columns.json``) so a layout
change in a future tool version is a configuration edit, not a code change.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from .relations import CUI_RE
from .resources import default_semrep_columns, semantic_relation_labels
from .tagger import ConceptMention

logger = logging.getLogger(__name__)

NEGATION_PREFIX = "NEG_"


@dataclass(frozen=True)
class Predication:
    """A subject-predicate-object triple extracted from one sentence."""

    subject_cui: str
    predicate: str
    object_cui: str
    negated: bool
    pmid: str
    sentence_index: int
    subject_name: str | None = None
    object_name: str | None = None


@dataclass
class SemrepIngest:
    mentions: list[ConceptMention] = field(default_factory=list)
    predications: list[Predication] = field(default_factory=list)
    dropped_by_allowlist: int = 0
    malformed: int = 0

    @property
    def parsed(self) -> int:
        return len(self.mentions) + len(self.predications)


def _get(fields: list[str], index: int) -> str:
    if index >= len(fields):
        raise IndexError(index)
    return fields[index].strip()


def ingest_semrep_output(
    lines: Iterable[str],
    pmid_allowlist: set[str] | None,
    columns: dict | None = None,
) -> SemrepIngest:
    """Parse fielded output lines into mentions and predications.

    Records whose pmid is not on the allowlist are dropped and tallied.
    Malformed lines (too few fields, bad identifiers, a predicate outside
    the configured relation label set, reflexive triples) are skipped and
    counted, never fatal. ``negated`` is true when the predicate carries the
    ``NEG_`` prefix or the negation column is populated.
    """
    cols = columns or default_semrep_columns()
    delim = cols.get("delimiter", "|")
    common = cols["common"]
    entity_cols = cols["entity"]
    relation_cols = cols["relation"]
    allowed_predicates = semantic_relation_labels()

    result = SemrepIngest()
    total_lines = 0
    for raw in lines:
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        total_lines += 1
        fields = line.split(delim)
        try:
            pmid = _get(fields, common["pmid"])
            record_type = _get(fields, common["record_type"]).lower()
            sentence_index = int(_get(fields, common["sentence_index"]))
            if not pmid or record_type not in ("entity", "relation"):
                raise ValueError("unrecognized record type")
            if pmid_allowlist is not None and pmid not in pmid_allowlist:
                result.dropped_by_allowlist += 1
                continue
            if record_type == "entity":
                cui = _get(fields, entity_cols["cui"])
                if not CUI_RE.match(cui):
                    raise ValueError(f"bad cui {cui!r}")
                start = int(_get(fields, entity_cols["start"]))
                end = int(_get(fields, entity_cols["end"]))
                result.mentions.append(
                    ConceptMention(
                        cui=cui,
                        matched_text=_get(fields, entity_cols["matched_text"]),
                        pmid=pmid,
                        sentence_index=sentence_index,
                        start=start,
                        end=end,
                    )
                )
            else:
                subject_cui = _get(fields, relation_cols["subject_cui"])
                object_cui = _get(fields, relation_cols["object_cui"])
                predicate = _get(fields, relation_cols["predicate"])
                negation_flag = _get(fields, relation_cols["negation"])
                negated = bool(negation_flag)
                if predicate.startswith(NEGATION_PREFIX):
                    predicate = predicate[len(NEGATION_PREFIX):]
                    negated = True
                if not CUI_RE.match(subject_cui) or not CUI_RE.match(object_cui):
                    raise ValueError("bad cui in relation record")
                if predicate not in allowed_predicates:
                    raise ValueError(f"predicate {predicate!r} not in relation label set")
                if subject_cui == object_cui:
                    raise ValueError("reflexive predication")
                result.predications.append(
                    Predication(
                        subject_cui=subject_cui,
                        predicate=predicate,
                        object_cui=object_cui,
                        negated=negated,
                        pmid=pmid,
                        sentence_index=sentence_index,
                        subject_name=_get(fields, relation_cols["subject_name"]) or None,
                        object_name=_get(fields, relation_cols["object_name"]) or None,
                    )
                )
        except (IndexError, ValueError, KeyError) as exc:
            result.malformed += 1
            logger.debug("skipping malformed fielded line: %s (%s)", line[:120], exc)

    if result.malformed:
        logger.warning("skipped %d malformed fielded output lines", result.malformed)
    if total_lines and result.parsed == 0 and result.dropped_by_allowlist == 0:
        logger.warning("fielded output contained no usable records")
    return result
