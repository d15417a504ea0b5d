"""Drug-drug interaction extraction from DrugBank-style XML."""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .relations import Endpoint, RelationRecord

DRUGBANK_ID_RE = re.compile(r"^DB\d{5}$")
DRUGBANK_VOCAB = "DRUGBANK"
INTERACTS_PREDICATE = "interacts with"


@dataclass
class DrugEntry:
    drugbank_id: str
    name: str = ""
    interaction_partner_ids: list[str] = field(default_factory=list)
    partner_names: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not DRUGBANK_ID_RE.match(self.drugbank_id):
            raise ValueError(f"malformed drugbank id: {self.drugbank_id!r}")


def _local(tag: str) -> str:
    # the real export namespaces every element; fixtures often do not
    return tag.rsplit("}", 1)[-1]


def _child_text(elem, name: str) -> str:
    for c in elem:
        if _local(c.tag) == name:
            return (c.text or "").strip()
    return ""


def parse_drugbank_entries(xml_text: str | bytes) -> list[DrugEntry]:
    root = ET.fromstring(xml_text)
    entries = []
    for drug in root:
        if _local(drug.tag) != "drug":
            continue
        primary_id = None
        for c in drug:
            if _local(c.tag) == "drugbank-id":
                text = (c.text or "").strip()
                if c.get("primary") == "true":
                    primary_id = text
                    break
                if primary_id is None:
                    primary_id = text
        if not primary_id:
            continue
        entry = DrugEntry(drugbank_id=primary_id, name=_child_text(drug, "name"))
        for c in drug:
            if _local(c.tag) != "drug-interactions":
                continue
            for inter in c:
                if _local(inter.tag) != "drug-interaction":
                    continue
                partner = _child_text(inter, "drugbank-id")
                if not partner:
                    continue
                entry.interaction_partner_ids.append(partner)
                pname = _child_text(inter, "name")
                if pname:
                    entry.partner_names[partner] = pname
        entries.append(entry)
    return entries


def drugbank_to_relations(entries: list[DrugEntry], source_name: str = "DrugBank") -> list[RelationRecord]:
    """One directed ``interacts with`` record per listed partner.

    No symmetrization: the reverse direction exists only if the partner's own
    entry lists it back. Partners whose id never appears as a drug entry are
    emitted anyway.
    """
    out = []
    for entry in entries:
        for partner in entry.interaction_partner_ids:
            out.append(
                RelationRecord(
                    subject=Endpoint(DRUGBANK_VOCAB, entry.drugbank_id, entry.name or None),
                    predicate=INTERACTS_PREDICATE,
                    object=Endpoint(DRUGBANK_VOCAB, partner, entry.partner_names.get(partner)),
                    source=source_name,
                    attributes={},
                )
            )
    return out


def parse_drugbank_interactions(xml_text: str | bytes, source_name: str = "DrugBank") -> list[RelationRecord]:
    return drugbank_to_relations(parse_drugbank_entries(xml_text), source_name)
