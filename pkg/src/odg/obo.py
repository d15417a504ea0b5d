"""OBO ontology parsing and hypernym extraction.

Only ``[Term]`` stanzas are consumed. The single relation type harvested is
the ``is_a`` hierarchy; everything else an ontology offers (``relationship:``
lines, typedefs, metadata) is skipped without complaint.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .relations import Endpoint, RelationRecord

logger = logging.getLogger(__name__)

IS_A_PREDICATE = "is a"


class OboParseError(Exception):
    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass
class OboTerm:
    term_id: str
    name: str = ""
    is_a_parents: list[str] = field(default_factory=list)
    xrefs: list[tuple[str, str]] = field(default_factory=list)
    is_obsolete: bool = False


def _split_prefixed_id(term_id: str) -> tuple[str, str]:
    """``GO:0008150`` -> ``("GO", "0008150")``; no colon keeps an empty vocab."""
    vocab, sep, code = term_id.partition(":")
    if not sep:
        return "", term_id
    return vocab, code


def _strip_trailing_comment(value: str) -> str:
    # `is_a: GO:0008150 ! biological_process` style trailers
    head, _, _ = value.partition("!")
    return head.strip()


def _strip_quoted_description(value: str) -> str:
    # xref values may carry a quoted display string after the identifier
    quote = value.find('"')
    if quote != -1:
        value = value[:quote]
    return value.strip()


def parse_obo(text: str) -> list[OboTerm]:
    """Parse OBO 1.2/1.4 stanza syntax into a list of terms.

    A ``[Term]`` stanza missing its ``id:`` tag raises :class:`OboParseError`
    carrying the stanza's starting line number. Non-Term stanzas are skipped.
    Unknown tags inside a Term are ignored.
    """
    terms: list[OboTerm] = []
    current: dict | None = None
    stanza_kind: str | None = None
    stanza_line = 0

    def finish():
        nonlocal current
        if current is None:
            return
        if not current.get("id"):
            raise OboParseError("[Term] stanza has no id: tag", stanza_line)
        terms.append(
            OboTerm(
                term_id=current["id"],
                name=current.get("name", ""),
                is_a_parents=current.get("is_a", []),
                xrefs=current.get("xref", []),
                is_obsolete=current.get("is_obsolete", False),
            )
        )
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("!"):
            continue
        if line.startswith("["):
            finish()
            stanza_kind = line.strip("[]").strip().lower()
            stanza_line = lineno
            current = {} if stanza_kind == "term" else None
            continue
        if current is None:
            continue  # header lines or non-Term stanza body
        tag, sep, value = line.partition(":")
        if not sep:
            continue
        tag = tag.strip()
        value = value.strip()
        if tag == "id":
            current["id"] = _strip_trailing_comment(value)
        elif tag == "name":
            current["name"] = value
        elif tag == "is_a":
            parent = _strip_trailing_comment(value)
            if parent:
                current.setdefault("is_a", []).append(parent)
        elif tag == "xref":
            ident = _strip_quoted_description(value)
            vocab, code = _split_prefixed_id(ident)
            if code:
                current.setdefault("xref", []).append((vocab, code))
        elif tag == "is_obsolete":
            current["is_obsolete"] = value.lower().startswith("true")
    finish()
    return terms


def obo_to_relations(terms: list[OboTerm], source_name: str) -> list[RelationRecord]:
    """One ``is a`` relation per (child, parent) pair of non-obsolete children.

    Parents that never appear as terms in the file are still emitted; whether
    they can be integrated is the mapping table's decision. Self-referential
    parents are dropped so the output never contains an ``is a`` loop.
    """
    by_id = {t.term_id: t for t in terms}
    out: list[RelationRecord] = []
    for term in terms:
        if term.is_obsolete:
            continue
        s_vocab, s_code = _split_prefixed_id(term.term_id)
        for parent_id in term.is_a_parents:
            if parent_id == term.term_id:
                logger.warning("dropping is_a self-loop on %s", term.term_id)
                continue
            p_vocab, p_code = _split_prefixed_id(parent_id)
            parent = by_id.get(parent_id)
            out.append(
                RelationRecord(
                    subject=Endpoint(s_vocab, s_code, term.name or None),
                    predicate=IS_A_PREDICATE,
                    object=Endpoint(p_vocab, p_code, parent.name if parent and parent.name else None),
                    source=source_name,
                    attributes={},
                )
            )
    return out
