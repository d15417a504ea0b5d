"""Parsers for MEDLINE citation XML and PMC full-text XML.

The MEDLINE format defines far more element types than this pipeline needs;
the parser pulls the PMID, title, abstract sections, MeSH heading descriptor
UIs, and a publication date, ignoring everything else.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from datetime import date

from .records import MESH_UI_RE, ArticleRecord

logger = logging.getLogger(__name__)

_MONTHS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6,
    "jul": 7, "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
}

# PMC containers whose text never belongs in the harvested body
_PMC_EXCLUDED = {"table-wrap", "table", "fig", "caption", "ref-list", "ack", "front", "back"}


class MedlineParseError(Exception):
    pass


def _text(elem) -> str:
    return "".join(elem.itertext()).strip()


def _int_or_none(value: str | None):
    try:
        return int(value) if value else None
    except ValueError:
        return None


def _month_number(raw: str | None) -> int | None:
    if not raw:
        return None
    raw = raw.strip()
    if raw.isdigit():
        n = int(raw)
        return n if 1 <= n <= 12 else None
    return _MONTHS.get(raw[:3].lower())


def _parse_pub_date(article_el) -> date | None:
    # journal issue date first, the electronic article date as fallback
    candidates = []
    journal_date = article_el.find("Journal/JournalIssue/PubDate")
    if journal_date is not None:
        candidates.append(journal_date)
    candidates.extend(article_el.findall("ArticleDate"))
    for el in candidates:
        year = _int_or_none(el.findtext("Year"))
        if year is None:
            medline_date = el.findtext("MedlineDate") or ""
            head = medline_date.strip().split(" ")[0]
            year = _int_or_none(head)
        if year is None:
            continue
        month = _month_number(el.findtext("Month")) or 1
        day = _int_or_none(el.findtext("Day")) or 1
        try:
            return date(year, month, day)
        except ValueError:
            continue
    return None


def parse_medline_xml(doc: str | bytes) -> ArticleRecord:
    """Parse one MEDLINE citation document into an :class:`ArticleRecord`.

    Accepts a ``PubmedArticle`` element (or anything containing one). The
    abstract is the concatenation of all abstract sections in document
    order, joined with single spaces, section labels left untouched. A
    missing abstract is valid; a missing PMID is not.
    """
    root = ET.fromstring(doc)
    if root.tag == "MedlineCitation":
        citation = root
        container = None
    else:
        citation = root.find(".//MedlineCitation")
        container = root
        if citation is None:
            raise MedlineParseError("document contains no MedlineCitation element")

    pmid_el = citation.find("PMID")
    if pmid_el is None or not (pmid_el.text or "").strip():
        raise MedlineParseError("citation has no PMID element")
    pmid = pmid_el.text.strip()

    article_el = citation.find("Article")
    title = ""
    abstract_text = None
    pub_date = None
    if article_el is not None:
        title_el = article_el.find("ArticleTitle")
        if title_el is not None:
            title = _text(title_el)
        abstract_el = article_el.find("Abstract")
        if abstract_el is not None:
            sections = [_text(s) for s in abstract_el.findall("AbstractText")]
            sections = [s for s in sections if s]
            if sections:
                abstract_text = " ".join(sections)
        pub_date = _parse_pub_date(article_el)

    headings = []
    for heading in citation.findall("MeshHeadingList/MeshHeading"):
        descriptor = heading.find("DescriptorName")
        if descriptor is None:
            continue
        ui = (descriptor.get("UI") or "").strip()
        if MESH_UI_RE.match(ui):
            headings.append(ui)
        elif ui:
            logger.debug("pmid %s: skipping malformed MeSH UI %r", pmid, ui)

    pmcid = None
    if container is not None:
        for article_id in container.findall(".//PubmedData/ArticleIdList/ArticleId"):
            if article_id.get("IdType") == "pmc" and article_id.text:
                value = article_id.text.strip()
                pmcid = value if value.startswith("PMC") else f"PMC{value}"
                break

    return ArticleRecord(
        pmid=pmid,
        title=title,
        abstract_text=abstract_text,
        mesh_headings=headings,
        pub_date=pub_date,
        pmcid=pmcid,
    )


def split_pubmed_article_set(doc: str | bytes) -> dict[str, str]:
    """Split a ``PubmedArticleSet`` into per-PMID citation documents."""
    root = ET.fromstring(doc)
    out: dict[str, str] = {}
    articles = root.findall("PubmedArticle") if root.tag == "PubmedArticleSet" else [root]
    for article in articles:
        pmid_el = article.find("MedlineCitation/PMID")
        if pmid_el is None or not (pmid_el.text or "").strip():
            continue
        out[pmid_el.text.strip()] = ET.tostring(article, encoding="unicode")
    return out


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _gather_text(elem) -> list[str]:
    parts = []
    if _local(elem.tag) in _PMC_EXCLUDED:
        return parts
    if elem.text:
        parts.append(elem.text)
    for child in elem:
        parts.extend(_gather_text(child))
        if child.tail:
            parts.append(child.tail)
    return parts


def _collect_paragraphs(elem, out: list[str]):
    tag = _local(elem.tag)
    if tag in _PMC_EXCLUDED:
        return
    if tag == "p":
        text = " ".join("".join(_gather_text(elem)).split())
        if text:
            out.append(text)
        return
    for child in elem:
        _collect_paragraphs(child, out)


def parse_pmc_body(doc: str | bytes) -> str | None:
    """Extract the running text of a PMC article body.

    Returns the paragraph texts joined with single spaces, with reference
    lists, tables, and figure captions left out. ``None`` when the document
    has no body or the body holds no paragraph text.
    """
    root = ET.fromstring(doc)
    body = None
    for elem in root.iter():
        if _local(elem.tag) == "body":
            body = elem
            break
    if body is None:
        return None
    paragraphs: list[str] = []
    _collect_paragraphs(body, paragraphs)
    return " ".join(paragraphs) if paragraphs else None
