"""Disease-driven literature harvesting.

Finds every PubMed citation indexed under a disease's MeSH descriptor,
fetches and parses the MEDLINE records, and pulls PMC full-text bodies for
as many articles as the configured cap allows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from datetime import date

from .entrez import EntrezClient
from .medline import parse_medline_xml, parse_pmc_body, split_pubmed_article_set
from .records import ArticleRecord

logger = logging.getLogger(__name__)

FETCH_BATCH_SIZE = 200
DEFAULT_FULLTEXT_CAP = 10_000
DEFAULT_RATE_LIMIT = 3.0


@dataclass
class HarvestConfig:
    disease_mesh_descriptor: str
    disease_mesh_ui: str = ""
    date_floor: date | None = None
    fulltext_cap: int = DEFAULT_FULLTEXT_CAP
    rate_limit: float = DEFAULT_RATE_LIMIT
    api_key: str | None = None
    email: str | None = None
    entrez_base_url: str | None = None

    def __post_init__(self):
        if not self.disease_mesh_descriptor.strip():
            raise ValueError("disease MeSH descriptor must be nonempty")
        if self.fulltext_cap < 0:
            raise ValueError("fulltext_cap must be >= 0")
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")

    def search_term(self) -> str:
        term = f'"{self.disease_mesh_descriptor}"[MeSH Terms]'
        if self.date_floor is not None:
            floor = self.date_floor.strftime("%Y/%m/%d")
            term += f' AND ("{floor}"[EDAT] : "3000/12/31"[EDAT])'
        return term

    def make_client(self) -> EntrezClient:
        kwargs = dict(rate_limit=self.rate_limit, api_key=self.api_key, email=self.email)
        if self.entrez_base_url:
            kwargs["base_url"] = self.entrez_base_url
        return EntrezClient(**kwargs)


@dataclass
class HarvestReport:
    pmids_found: int = 0
    records_fetched: int = 0
    missing_pmids: list[str] = field(default_factory=list)
    fulltext_fetched: int = 0
    fulltext_cap_skipped: int = 0
    bodyless_pmc: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pmids_found": self.pmids_found,
            "records_fetched": self.records_fetched,
            "missing_pmids": list(self.missing_pmids),
            "fulltext_fetched": self.fulltext_fetched,
            "fulltext_cap_skipped": self.fulltext_cap_skipped,
            "bodyless_pmc": list(self.bodyless_pmc),
        }


def search_disease_pmids(config: HarvestConfig, client: EntrezClient | None = None) -> list[str]:
    """All PMIDs matching the disease descriptor, paged and de-duplicated.

    When ``date_floor`` is set the entry-date range is part of the search
    term, so filtering happens server side. An empty result is an empty
    list, never an error.
    """
    client = client or config.make_client()
    return client.esearch_all(config.search_term())


def fetch_medline_records(
    pmids: list[str],
    config: HarvestConfig,
    client: EntrezClient | None = None,
    report: HarvestReport | None = None,
) -> list[str]:
    """Fetch raw citation XML for each PMID, in request batches of 200.

    PMIDs absent from the response go on the report's missing list instead
    of failing the harvest.
    """
    if len(set(pmids)) != len(pmids):
        raise ValueError("pmid list contains duplicates")
    client = client or config.make_client()
    report = report if report is not None else HarvestReport()
    docs: list[str] = []
    for i in range(0, len(pmids), FETCH_BATCH_SIZE):
        batch = pmids[i : i + FETCH_BATCH_SIZE]
        content = client.efetch_pubmed(batch)
        by_pmid = split_pubmed_article_set(content)
        for pmid in batch:
            doc = by_pmid.get(pmid)
            if doc is None:
                report.missing_pmids.append(pmid)
                logger.warning("pmid %s was requested but not returned", pmid)
            else:
                docs.append(doc)
    report.records_fetched += len(docs)
    return docs


def fetch_and_parse_pmc(
    record: ArticleRecord,
    config: HarvestConfig,
    client: EntrezClient | None = None,
    report: HarvestReport | None = None,
) -> ArticleRecord:
    """Attach the PMC full-text body to a record, when one exists.

    Records without a PMCID come back unchanged. A well-formed but bodyless
    PMC document is logged and tallied, and the record stays as it was.
    """
    if record.pmcid is None:
        return record
    client = client or config.make_client()
    content = client.efetch_pmc(record.pmcid)
    body = parse_pmc_body(content)
    if body is None:
        logger.warning("PMC record %s has no usable body", record.pmcid)
        if report is not None:
            report.bodyless_pmc.append(record.pmcid)
        return record
    return record.with_fulltext(body)


def harvest_articles(
    config: HarvestConfig,
    client: EntrezClient | None = None,
) -> tuple[list[ArticleRecord], HarvestReport]:
    """Run the full harvest: search, fetch, parse, link, full-text."""
    client = client or config.make_client()
    report = HarvestReport()

    pmids = search_disease_pmids(config, client)
    report.pmids_found = len(pmids)
    docs = fetch_medline_records(pmids, config, client, report)
    records = [parse_medline_xml(doc) for doc in docs]

    unlinked = [r.pmid for r in records if r.pmcid is None]
    pmc_map: dict[str, str] = {}
    for i in range(0, len(unlinked), FETCH_BATCH_SIZE):
        pmc_map.update(client.elink_pmc(unlinked[i : i + FETCH_BATCH_SIZE]))
    records = [
        replace(r, pmcid=pmc_map[r.pmid]) if r.pmid in pmc_map and r.pmcid is None else r
        for r in records
    ]

    out: list[ArticleRecord] = []
    for record in records:
        if record.pmcid is None:
            out.append(record)
            continue
        if report.fulltext_fetched >= config.fulltext_cap:
            report.fulltext_cap_skipped += 1
            out.append(record)
            continue
        enriched = fetch_and_parse_pmc(record, config, client, report)
        if enriched.fulltext_body is not None:
            report.fulltext_fetched += 1
        out.append(enriched)
    return out, report
