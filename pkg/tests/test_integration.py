from odg.integration import resolve_relations
from odg.mapping import load_mapping_table
from odg.relations import Endpoint, RelationRecord


def _table(fixtures_dir):
    return load_mapping_table(fixtures_dir / "conso.tsv", fixtures_dir / "sty.tsv")


def _rel(subject, predicate, obj, source="T"):
    return RelationRecord(subject=subject, predicate=predicate, object=obj, source=source)


def test_mesh_endpoint_resolves_to_cui(fixtures_dir):
    rel = _rel(Endpoint("PMID", "p1"), "HAS_MESH", Endpoint("MSH", "D008175"))
    integrated, unmapped = resolve_relations([rel], _table(fixtures_dir))
    assert unmapped == []
    out = integrated[0]
    assert out.object_cui == "C0024121"
    assert out.object.label == "Lung Neoplasms"
    assert out.object.semantic_types == ("Neoplastic Process",)
    assert out.object.source_vocab == "MSH"
    assert out.subject_pmid == "p1"


def test_unmappable_endpoint_diverts_whole_record(fixtures_dir):
    rel = _rel(Endpoint("DOID", "162"), "is a", Endpoint("DOID", "55555"))
    integrated, unmapped = resolve_relations([rel], _table(fixtures_dir))
    assert integrated == []
    assert len(unmapped) == 1
    assert unmapped[0].endpoints == [{"vocab": "DOID", "code": "55555", "label": None}]


def test_fully_mappable_batch_has_empty_report(fixtures_dir):
    rels = [
        _rel(Endpoint("DOID", "162"), "is a", Endpoint("DOID", "4")),
        _rel(Endpoint("DRUGBANK", "DB00515"), "interacts with", Endpoint("DRUGBANK", "DB00958")),
        _rel(Endpoint("UMLS", "C0028128"), "AFFECTS", Endpoint("UMLS", "C0024121")),
    ]
    integrated, unmapped = resolve_relations(rels, _table(fixtures_dir))
    assert len(integrated) == 3
    assert unmapped == []


def test_accounting_inputs_equal_outputs_plus_report(fixtures_dir):
    rels = [
        _rel(Endpoint("DOID", "162"), "is a", Endpoint("DOID", "4")),
        _rel(Endpoint("DOID", "162"), "is a", Endpoint("DOID", "55555")),
        _rel(Endpoint("NOPE", "1"), "is a", Endpoint("NOPE", "2")),
        _rel(Endpoint("UMLS", "C0008838"), "TREATS", Endpoint("UMLS", "C0024121")),
    ]
    integrated, unmapped = resolve_relations(rels, _table(fixtures_dir))
    assert len(integrated) + len(unmapped) == len(rels)


def test_umls_endpoint_passes_through_with_format_check(fixtures_dir):
    good = _rel(Endpoint("UMLS", "C0024121"), "ISA", Endpoint("UMLS", "C0006826"))
    bad = _rel(Endpoint("UMLS", "notacui"), "ISA", Endpoint("UMLS", "C0006826"))
    integrated, unmapped = resolve_relations([good, bad], _table(fixtures_dir))
    assert len(integrated) == 1
    assert len(unmapped) == 1
    assert integrated[0].subject_cui == "C0024121"


def test_umls_endpoint_gets_table_label_and_types(fixtures_dir):
    rel = _rel(Endpoint("UMLS", "C0008838", "some variant name"), "TREATS", Endpoint("UMLS", "C0024121"))
    integrated, _ = resolve_relations([rel], _table(fixtures_dir))
    assert integrated[0].subject.label == "Cisplatin"
    assert set(integrated[0].subject.semantic_types) == {
        "Inorganic Chemical",
        "Pharmacologic Substance",
    }


def test_unknown_cui_keeps_input_label(fixtures_dir):
    rel = _rel(Endpoint("UMLS", "C0555555", "mystery concept"), "AFFECTS", Endpoint("UMLS", "C0024121"))
    integrated, unmapped = resolve_relations([rel], _table(fixtures_dir))
    assert unmapped == []
    assert integrated[0].subject.label == "mystery concept"
    assert integrated[0].subject.semantic_types == ()


def test_resolution_is_idempotent_on_own_output(fixtures_dir):
    table = _table(fixtures_dir)
    rels = [
        _rel(Endpoint("DOID", "162"), "is a", Endpoint("DOID", "4")),
        _rel(Endpoint("PMID", "p1"), "HAS_MESH", Endpoint("MSH", "D010936")),
    ]
    once, report_once = resolve_relations(rels, table)
    twice, report_twice = resolve_relations(once, table)
    assert report_once == report_twice == []
    assert [r.to_json() for r in once] == [r.to_json() for r in twice]


def test_attributes_preserved(fixtures_dir):
    rel = RelationRecord(
        subject=Endpoint("UMLS", "C0028128"),
        predicate="MENTIONED_IN",
        object=Endpoint("PMID", "101"),
        source="literature",
        attributes={"count": 2, "sentences": [0, 1]},
    )
    integrated, _ = resolve_relations([rel], _table(fixtures_dir))
    assert integrated[0].attributes == {"count": 2, "sentences": [0, 1]}
