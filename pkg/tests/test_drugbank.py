import pytest

from odg.drugbank import DrugEntry, parse_drugbank_entries, parse_drugbank_interactions


def test_fixture_yields_enumerated_directed_interactions(fixtures_dir):
    xml = (fixtures_dir / "drugbank_mini.xml").read_text()
    relations = parse_drugbank_interactions(xml)
    directed = {(r.subject.code, r.object.code) for r in relations}
    assert directed == {
        ("DB00515", "DB00958"),
        ("DB00515", "DB99999"),
        ("DB00958", "DB00515"),
    }
    assert len(relations) == 3
    assert all(r.predicate == "interacts with" for r in relations)
    assert all(r.subject.vocab == "DRUGBANK" for r in relations)


def test_empty_interaction_list_yields_nothing(fixtures_dir):
    xml = (fixtures_dir / "drugbank_mini.xml").read_text()
    entries = {e.drugbank_id: e for e in parse_drugbank_entries(xml)}
    assert entries["DB01234"].interaction_partner_ids == []
    assert all(r.subject.code != "DB01234" for r in parse_drugbank_interactions(xml))


def test_primary_id_wins_over_secondary(fixtures_dir):
    xml = (fixtures_dir / "drugbank_mini.xml").read_text()
    entries = [e.drugbank_id for e in parse_drugbank_entries(xml)]
    assert "BTD00001" not in entries
    assert "DB00515" in entries


def test_labels_carried_through(fixtures_dir):
    xml = (fixtures_dir / "drugbank_mini.xml").read_text()
    by_pair = {(r.subject.code, r.object.code): r for r in parse_drugbank_interactions(xml)}
    rel = by_pair[("DB00515", "DB00958")]
    assert rel.subject.label == "Cisplatin"
    assert rel.object.label == "Carboplatin"


def test_output_size_is_sum_of_partner_lists(fixtures_dir):
    xml = (fixtures_dir / "drugbank_mini.xml").read_text()
    entries = parse_drugbank_entries(xml)
    relations = parse_drugbank_interactions(xml)
    assert len(relations) == sum(len(e.interaction_partner_ids) for e in entries)


def test_malformed_drug_id_rejected():
    with pytest.raises(ValueError):
        DrugEntry(drugbank_id="XX123")


def test_works_without_namespace():
    xml = """<drugbank><drug><drugbank-id primary="true">DB00001</drugbank-id>
    <name>Plainium</name>
    <drug-interactions><drug-interaction><drugbank-id>DB00002</drugbank-id>
    <name>Other</name></drug-interaction></drug-interactions></drug></drugbank>"""
    relations = parse_drugbank_interactions(xml)
    assert [(r.subject.code, r.object.code) for r in relations] == [("DB00001", "DB00002")]
