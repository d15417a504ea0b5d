"""Entrez E-utilities client: esearch, efetch, elink with paging and retry.

The base URL is a constructor argument so tests (and mirrors) can point the
client at any server speaking the same protocol. One shared rate limiter
paces every request the client makes.
"""

from __future__ import annotations

import logging
import threading
import time
import xml.etree.ElementTree as ET

import requests

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
DEFAULT_PAGE_SIZE = 500
MAX_ATTEMPTS = 5
RETRYABLE_STATUS = {429} | set(range(500, 600))


class TransportError(Exception):
    """Request still failing after the retry budget was spent."""


class EntrezParseError(Exception):
    """A response arrived but a required field was absent or unreadable."""

    def __init__(self, field: str, detail: str = ""):
        msg = f"malformed E-utilities response: missing or unreadable {field!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.field = field


class RateLimiter:
    """Blocks callers so that requests never exceed ``per_second``."""

    def __init__(self, per_second: float):
        if per_second <= 0:
            raise ValueError("rate limit must be positive")
        self._interval = 1.0 / per_second
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self):
        with self._lock:
            now = time.monotonic()
            delta = now - self._last
            if delta < self._interval:
                time.sleep(self._interval - delta)
            self._last = time.monotonic()


class EntrezClient:
    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        rate_limit: float = 3.0,
        api_key: str | None = None,
        email: str | None = None,
        timeout: float = 30.0,
        max_attempts: int = MAX_ATTEMPTS,
        backoff_base: float = 0.5,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.limiter = RateLimiter(rate_limit)
        self.api_key = api_key
        self.email = email
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.session = session or requests.Session()

    def _credentials(self) -> dict:
        creds = {}
        if self.api_key:
            creds["api_key"] = self.api_key
        if self.email:
            creds["email"] = self.email
        return creds

    def _request(self, endpoint: str, params, post: bool = False) -> bytes:
        url = f"{self.base_url}/{endpoint}"
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            self.limiter.wait()
            try:
                if post:
                    resp = self.session.post(url, data=params, timeout=self.timeout)
                else:
                    resp = self.session.get(url, params=params, timeout=self.timeout)
                if resp.status_code in RETRYABLE_STATUS:
                    raise requests.HTTPError(f"HTTP {resp.status_code}", response=resp)
                resp.raise_for_status()
                return resp.content
            except requests.HTTPError as exc:
                status = exc.response.status_code if exc.response is not None else None
                if status is not None and status not in RETRYABLE_STATUS:
                    raise TransportError(f"{endpoint} failed with HTTP {status}") from exc
                last_error = exc
            except requests.RequestException as exc:
                last_error = exc
            if attempt < self.max_attempts:
                wait = self.backoff_base * (2 ** (attempt - 1))
                logger.warning(
                    "%s attempt %d/%d failed (%s); retrying in %.2fs",
                    endpoint, attempt, self.max_attempts, last_error, wait,
                )
                time.sleep(wait)
        raise TransportError(
            f"{endpoint} failed after {self.max_attempts} attempts: {last_error}"
        ) from last_error

    # -- esearch ---------------------------------------------------------

    def esearch(self, term: str, retstart: int = 0, retmax: int = DEFAULT_PAGE_SIZE):
        """One search page: returns (total count, ids on this page)."""
        params = {
            "db": "pubmed",
            "term": term,
            "retstart": retstart,
            "retmax": retmax,
            "usehistory": "y",
            "retmode": "xml",
            **self._credentials(),
        }
        content = self._request("esearch.fcgi", params)
        try:
            root = ET.fromstring(content)
        except ET.ParseError as exc:
            raise EntrezParseError("eSearchResult", str(exc)) from exc
        count_el = root.find("Count")
        if count_el is None or count_el.text is None:
            raise EntrezParseError("Count")
        try:
            count = int(count_el.text)
        except ValueError as exc:
            raise EntrezParseError("Count", f"not an integer: {count_el.text!r}") from exc
        id_list = root.find("IdList")
        if id_list is None:
            raise EntrezParseError("IdList")
        ids = [el.text.strip() for el in id_list.findall("Id") if el.text and el.text.strip()]
        return count, ids

    def esearch_all(self, term: str, page_size: int = DEFAULT_PAGE_SIZE) -> list[str]:
        """Collect every id for a query, paging with retstart/retmax."""
        collected: list[str] = []
        seen: set[str] = set()
        retstart = 0
        while True:
            count, ids = self.esearch(term, retstart=retstart, retmax=page_size)
            for pmid in ids:
                if pmid not in seen:
                    seen.add(pmid)
                    collected.append(pmid)
            retstart += page_size
            if retstart >= count or not ids:
                break
        return collected

    # -- efetch / elink ----------------------------------------------------

    def efetch_pubmed(self, pmids: list[str]) -> bytes:
        params = {
            "db": "pubmed",
            "id": ",".join(pmids),
            "retmode": "xml",
            **self._credentials(),
        }
        return self._request("efetch.fcgi", params, post=True)

    def efetch_pmc(self, pmcid: str) -> bytes:
        params = {
            "db": "pmc",
            "id": pmcid.removeprefix("PMC"),
            "retmode": "xml",
            **self._credentials(),
        }
        return self._request("efetch.fcgi", params)

    def elink_pmc(self, pmids: list[str]) -> dict[str, str]:
        """PMID -> PMCID for the subset of articles that exist in PMC."""
        params = [
            ("dbfrom", "pubmed"),
            ("db", "pmc"),
            ("retmode", "xml"),
            *self._credentials().items(),
        ]
        params.extend(("id", pmid) for pmid in pmids)
        content = self._request("elink.fcgi", params, post=True)
        try:
            root = ET.fromstring(content)
        except ET.ParseError as exc:
            raise EntrezParseError("eLinkResult", str(exc)) from exc
        mapping: dict[str, str] = {}
        for linkset in root.findall("LinkSet"):
            src = linkset.find("IdList/Id")
            if src is None or not src.text:
                continue
            pmid = src.text.strip()
            for db in linkset.findall("LinkSetDb"):
                dbto = db.find("DbTo")
                if dbto is None or dbto.text != "pmc":
                    continue
                link = db.find("Link/Id")
                if link is not None and link.text:
                    mapping[pmid] = f"PMC{link.text.strip()}"
                    break
        return mapping
