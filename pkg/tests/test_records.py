import json
from datetime import date

import pytest

from odg.records import ArticleRecord, read_article_records, write_article_records


def test_jsonl_field_names_are_the_wire_format(tmp_path):
    record = ArticleRecord(
        pmid="11",
        title="T",
        abstract_text="A.",
        fulltext_body="F.",
        mesh_headings=["D000001"],
        pub_date=date(2020, 2, 3),
        pmcid="PMC11",
    )
    path = tmp_path / "articles.jsonl"
    write_article_records(path, [record])
    obj = json.loads(path.read_text().splitlines()[0])
    assert list(obj) == ["pmid", "title", "abstract", "fulltext", "mesh_headings", "pub_date", "pmcid"]
    assert obj["abstract"] == "A."
    assert obj["fulltext"] == "F."
    assert obj["pub_date"] == "2020-02-03"


def test_round_trip(tmp_path):
    records = [
        ArticleRecord(pmid="1", title="x", abstract_text="A."),
        ArticleRecord(pmid="2", mesh_headings=["D000001", "C123456"]),
    ]
    path = tmp_path / "articles.jsonl"
    write_article_records(path, records)
    assert list(read_article_records(path)) == records


def test_pmid_required():
    with pytest.raises(ValueError):
        ArticleRecord(pmid="")


def test_mesh_ui_pattern_enforced():
    with pytest.raises(ValueError):
        ArticleRecord(pmid="1", mesh_headings=["Lung Neoplasms"])


def test_fulltext_requires_pmcid():
    with pytest.raises(ValueError):
        ArticleRecord(pmid="1", fulltext_body="body")
    record = ArticleRecord(pmid="1").with_fulltext("body", pmcid="PMC1")
    assert record.fulltext_body == "body"
    assert record.pmcid == "PMC1"
