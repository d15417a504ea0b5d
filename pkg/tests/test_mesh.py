import xml.etree.ElementTree as ET

from odg.mesh import compute_parent_uis, mesh_xml_to_obo, parse_mesh_descriptors
from odg.obo import obo_to_relations, parse_obo

SINGLE = """\
<DescriptorRecordSet>
  <DescriptorRecord>
    <DescriptorUI>D000010</DescriptorUI>
    <DescriptorName><String>Owner Of Prefix</String></DescriptorName>
    <TreeNumberList><TreeNumber>C04.588</TreeNumber></TreeNumberList>
  </DescriptorRecord>
  <DescriptorRecord>
    <DescriptorUI>D000020</DescriptorUI>
    <DescriptorName><String>Deep Child</String></DescriptorName>
    <TreeNumberList><TreeNumber>C04.588.894</TreeNumber></TreeNumberList>
  </DescriptorRecord>
</DescriptorRecordSet>
"""


def oracle_parents(xml_text: str) -> dict[str, set[str]]:
    """Independent prefix computation straight off the XML."""
    root = ET.fromstring(xml_text)
    trees = {}
    records = []
    for rec in root.iter("DescriptorRecord"):
        ui = rec.findtext("DescriptorUI")
        tns = [t.text for t in rec.findall("TreeNumberList/TreeNumber")]
        records.append((ui, tns))
        for t in tns:
            trees[t] = ui
    out = {}
    for ui, tns in records:
        parents = set()
        for t in tns:
            if "." not in t:
                continue
            owner = trees.get(t.rsplit(".", 1)[0])
            if owner and owner != ui:
                parents.add(owner)
        out[ui] = parents
    return out


def test_prefix_parent_found():
    parents = compute_parent_uis(parse_mesh_descriptors(SINGLE))
    assert parents["D000020"] == ["D000010"]


def test_single_segment_tree_number_is_root():
    parents = compute_parent_uis(parse_mesh_descriptors(SINGLE))
    assert parents["D000010"] == []


def test_two_tree_numbers_under_same_parent_dedup():
    xml = """\
<DescriptorRecordSet>
  <DescriptorRecord>
    <DescriptorUI>D000001</DescriptorUI>
    <DescriptorName><String>Parent</String></DescriptorName>
    <TreeNumberList><TreeNumber>C04</TreeNumber></TreeNumberList>
  </DescriptorRecord>
  <DescriptorRecord>
    <DescriptorUI>D000002</DescriptorUI>
    <DescriptorName><String>Child Twice</String></DescriptorName>
    <TreeNumberList><TreeNumber>C04.100</TreeNumber><TreeNumber>C04.200</TreeNumber></TreeNumberList>
  </DescriptorRecord>
</DescriptorRecordSet>
"""
    parents = compute_parent_uis(parse_mesh_descriptors(xml))
    assert parents["D000002"] == ["D000001"]


def test_orphan_prefix_gets_no_parent():
    xml = """\
<DescriptorRecordSet>
  <DescriptorRecord>
    <DescriptorUI>D000003</DescriptorUI>
    <DescriptorName><String>Orphan</String></DescriptorName>
    <TreeNumberList><TreeNumber>C10.500.300</TreeNumber></TreeNumberList>
  </DescriptorRecord>
</DescriptorRecordSet>
"""
    parents = compute_parent_uis(parse_mesh_descriptors(xml))
    assert parents["D000003"] == []


def test_obo_round_trip_term_count_and_parents(fixtures_dir):
    xml = (fixtures_dir / "mesh_prefix20.xml").read_text()
    descriptors = parse_mesh_descriptors(xml)
    terms = parse_obo(mesh_xml_to_obo(xml))
    assert len(terms) == len(descriptors) == 20

    expected = oracle_parents(xml)
    for term in terms:
        ui = term.term_id.removeprefix("MSH:")
        got = {p.removeprefix("MSH:") for p in term.is_a_parents}
        assert got == expected[ui], ui


def test_relations_from_converted_obo(fixtures_dir):
    xml = (fixtures_dir / "mesh_small.xml").read_text()
    relations = obo_to_relations(parse_obo(mesh_xml_to_obo(xml)), "MeSH")
    pairs = {(r.subject.code, r.object.code) for r in relations}
    assert pairs == {("D008175", "D009369"), ("D009538", "D010936")}
    assert all(r.subject.vocab == "MSH" and r.object.vocab == "MSH" for r in relations)
