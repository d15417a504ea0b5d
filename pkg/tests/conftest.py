"""Shared fixtures: file locations and a local E-utilities fixture server."""

from __future__ import annotations

import re
import threading
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_TERM_DESCRIPTOR_RE = re.compile(r'"([^"]+)"\[MeSH Terms\]')
_TERM_DATE_RE = re.compile(r'"(\d{4}/\d{2}/\d{2})"\[EDAT\]')


def _parse_date(raw: str) -> date:
    y, m, d = raw.split("/")
    return date(int(y), int(m), int(d))


class EntrezFixtureServer:
    """An in-process HTTP server speaking just enough of the E-utilities
    protocol (esearch/efetch/elink) to drive the harvester in tests.

    ``corpus`` maps pmid -> dict with keys: entry (YYYY/MM/DD string),
    xml (citation document text), mesh_names (searchable descriptor names),
    pmcid (bare numeric id or None), pmc_xml (full-text document or None).
    """

    def __init__(self):
        self.corpus: dict[str, dict] = {}
        self.failures_remaining = 0
        self.requests_seen: list[str] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                params = {k: v for k, v in parse_qs(urlparse(self.path).query).items()}
                self._respond(params)

            def do_POST(self):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length).decode("utf-8")
                self._respond(parse_qs(body))

            def _respond(self, params):
                outer.requests_seen.append(urlparse(self.path).path)
                if outer.failures_remaining > 0:
                    outer.failures_remaining -= 1
                    self.send_response(500)
                    self.end_headers()
                    self.wfile.write(b"synthetic failure")
                    return
                path = urlparse(self.path).path
                if path.endswith("esearch.fcgi"):
                    payload = outer.esearch(params)
                elif path.endswith("efetch.fcgi"):
                    payload = outer.efetch(params)
                elif path.endswith("elink.fcgi"):
                    payload = outer.elink(params)
                else:
                    self.send_response(404)
                    self.end_headers()
                    return
                data = payload.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/xml")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.02), daemon=True
        )
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()

    # -- protocol pieces -------------------------------------------------

    def _matching_pmids(self, term: str) -> list[str]:
        descriptor_match = _TERM_DESCRIPTOR_RE.search(term)
        descriptor = descriptor_match.group(1) if descriptor_match else None
        floor = None
        date_match = _TERM_DATE_RE.search(term)
        if date_match:
            floor = _parse_date(date_match.group(1))
        hits = []
        for pmid, art in self.corpus.items():
            if descriptor is not None and descriptor not in art["mesh_names"]:
                continue
            if floor is not None and _parse_date(art["entry"]) < floor:
                continue
            hits.append(pmid)
        return sorted(hits, key=int)

    def esearch(self, params) -> str:
        term = params.get("term", [""])[0]
        retstart = int(params.get("retstart", ["0"])[0])
        retmax = int(params.get("retmax", ["20"])[0])
        hits = self._matching_pmids(term)
        page = hits[retstart : retstart + retmax]
        ids = "".join(f"<Id>{p}</Id>" for p in page)
        return (
            "<eSearchResult>"
            f"<Count>{len(hits)}</Count><RetMax>{len(page)}</RetMax><RetStart>{retstart}</RetStart>"
            "<QueryKey>1</QueryKey><WebEnv>FIXTURE_ENV</WebEnv>"
            f"<IdList>{ids}</IdList>"
            "</eSearchResult>"
        )

    def efetch(self, params) -> str:
        db = params.get("db", [""])[0]
        raw_ids = params.get("id", [""])[0]
        ids = [i.strip() for i in raw_ids.split(",") if i.strip()]
        if db == "pubmed":
            docs = [self.corpus[p]["xml"] for p in ids if p in self.corpus]
            return "<PubmedArticleSet>" + "".join(docs) + "</PubmedArticleSet>"
        if db == "pmc":
            for art in self.corpus.values():
                if art.get("pmcid") in ids and art.get("pmc_xml"):
                    return art["pmc_xml"]
            return "<pmc-articleset></pmc-articleset>"
        return "<error>unknown db</error>"

    def elink(self, params) -> str:
        ids = params.get("id", [])
        linksets = []
        for pmid in ids:
            art = self.corpus.get(pmid)
            links = ""
            if art and art.get("pmcid"):
                links = (
                    "<LinkSetDb><DbTo>pmc</DbTo><LinkName>pubmed_pmc</LinkName>"
                    f"<Link><Id>{art['pmcid']}</Id></Link></LinkSetDb>"
                )
            linksets.append(
                f"<LinkSet><DbFrom>pubmed</DbFrom><IdList><Id>{pmid}</Id></IdList>{links}</LinkSet>"
            )
        return "<eLinkResult>" + "".join(linksets) + "</eLinkResult>"


def _article(pmid: str, entry: str, mesh_names: list[str], pmcid: str | None = None) -> dict:
    return {
        "entry": entry,
        "xml": (FIXTURES / "medline" / f"{pmid}.xml").read_text(encoding="utf-8"),
        "mesh_names": mesh_names,
        "pmcid": pmcid,
        "pmc_xml": (FIXTURES / "pmc" / f"PMC{pmcid}.xml").read_text(encoding="utf-8") if pmcid else None,
    }


def corpus_batch_a() -> dict[str, dict]:
    return {
        "101": _article("101", "2019/03/01", ["Lung Neoplasms", "Nicotiana"], pmcid="101"),
        "102": _article("102", "2019/05/10", ["Lung Neoplasms", "Cisplatin"]),
        "103": _article("103", "2019/07/20", ["Lung Neoplasms", "Plants"]),
    }


def corpus_batch_b() -> dict[str, dict]:
    return {
        "201": _article("201", "2021/02/01", ["Lung Neoplasms"]),
    }


@pytest.fixture
def entrez_server():
    server = EntrezFixtureServer()
    yield server
    server.close()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
