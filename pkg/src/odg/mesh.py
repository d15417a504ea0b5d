"""MeSH descriptor XML to OBO conversion.

MeSH publishes its hierarchy as tree numbers rather than explicit parent
links, so the converter reconstructs parentage: the parent of tree number
``C04.588.894`` is whichever descriptor owns ``C04.588``. Tree numbers whose
parent prefix is owned by nobody are roots and contribute no parent.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass


@dataclass
class MeshDescriptor:
    ui: str
    name: str
    tree_numbers: list[str]


def parse_mesh_descriptors(xml_text: str | bytes) -> list[MeshDescriptor]:
    root = ET.fromstring(xml_text)
    out = []
    for rec in root.iter("DescriptorRecord"):
        ui_el = rec.find("DescriptorUI")
        name_el = rec.find("DescriptorName/String")
        if ui_el is None or not (ui_el.text or "").strip():
            continue
        trees = [
            (t.text or "").strip()
            for t in rec.findall("TreeNumberList/TreeNumber")
            if (t.text or "").strip()
        ]
        out.append(
            MeshDescriptor(
                ui=ui_el.text.strip(),
                name=(name_el.text or "").strip() if name_el is not None else "",
                tree_numbers=trees,
            )
        )
    return out


def _parent_prefix(tree_number: str) -> str | None:
    head, sep, _ = tree_number.rpartition(".")
    return head if sep else None


def compute_parent_uis(descriptors: list[MeshDescriptor]) -> dict[str, list[str]]:
    """Descriptor UI -> sorted list of parent descriptor UIs (deduplicated)."""
    owner = {}
    for d in descriptors:
        for t in d.tree_numbers:
            owner[t] = d.ui
    parents: dict[str, list[str]] = {}
    for d in descriptors:
        found = set()
        for t in d.tree_numbers:
            prefix = _parent_prefix(t)
            if prefix is None:
                continue
            parent_ui = owner.get(prefix)
            if parent_ui is not None and parent_ui != d.ui:
                found.add(parent_ui)
        parents[d.ui] = sorted(found)
    return parents


def mesh_xml_to_obo(xml_text: str | bytes) -> str:
    """Render descriptor XML as an OBO document with ``MSH:<UI>`` term ids."""
    descriptors = parse_mesh_descriptors(xml_text)
    names = {d.ui: d.name for d in descriptors}
    parents = compute_parent_uis(descriptors)

    chunks = ["format-version: 1.2", "ontology: mesh", ""]
    for d in descriptors:
        chunks.append("[Term]")
        chunks.append(f"id: MSH:{d.ui}")
        if d.name:
            chunks.append(f"name: {d.name}")
        for parent_ui in parents[d.ui]:
            label = names.get(parent_ui, "")
            suffix = f" ! {label}" if label else ""
            chunks.append(f"is_a: MSH:{parent_ui}{suffix}")
        chunks.append("")
    return "\n".join(chunks)
