from datetime import date

import pytest

from odg.medline import (
    MedlineParseError,
    parse_medline_xml,
    parse_pmc_body,
    split_pubmed_article_set,
)


def test_multisection_fixture_parses_to_expected_record(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline_multisection.xml").read_text())
    assert record.pmid == "31000001"
    assert record.abstract_text == "Background: A. Results: B."
    assert record.mesh_headings == ["D008175", "D002945", "D006801", "D008875", "D016016"]
    assert record.title == "A citation with two abstract sections."
    assert record.pub_date == date(2019, 2, 15)
    assert record.pmcid is None


def test_mesh_heading_ui_comes_from_descriptor_attribute(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline_multisection.xml").read_text())
    assert "D008175" in record.mesh_headings


def test_missing_abstract_is_valid(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline" / "103.xml").read_text())
    assert record.abstract_text is None
    assert record.pmid == "103"


def test_missing_pmid_is_a_parse_error():
    doc = "<PubmedArticle><MedlineCitation><Article/></MedlineCitation></PubmedArticle>"
    with pytest.raises(MedlineParseError):
        parse_medline_xml(doc)


def test_parse_is_deterministic(fixtures_dir):
    doc = (fixtures_dir / "medline" / "101.xml").read_text()
    assert parse_medline_xml(doc) == parse_medline_xml(doc)


def test_pmcid_extracted_when_present(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline" / "101.xml").read_text())
    assert record.pmcid == "PMC101"


def test_month_name_in_pub_date(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline" / "102.xml").read_text())
    assert record.pub_date == date(2019, 4, 30)


def test_pub_date_defaults_missing_day(fixtures_dir):
    record = parse_medline_xml((fixtures_dir / "medline" / "103.xml").read_text())
    assert record.pub_date == date(2019, 7, 1)


def test_split_article_set(fixtures_dir):
    docs = [
        (fixtures_dir / "medline" / name).read_text()
        for name in ("101.xml", "102.xml")
    ]
    combined = "<PubmedArticleSet>" + "".join(docs) + "</PubmedArticleSet>"
    split = split_pubmed_article_set(combined)
    assert set(split) == {"101", "102"}
    assert parse_medline_xml(split["101"]).pmid == "101"


def test_pmc_body_excludes_tables_and_captions(fixtures_dir):
    body = parse_pmc_body((fixtures_dir / "pmc" / "PMC101.xml").read_text())
    assert body == (
        "Cisplatin treatment altered cell viability. "
        "Plants produce diverse compounds. "
        "These data support further study."
    )
    assert "Dose summary" not in body
    assert "figure caption" not in body
    assert "reference title" not in body
    assert "10" not in body


def test_pmc_bodyless_document_returns_none():
    assert parse_pmc_body("<article><front><p>No body here.</p></front></article>") is None
