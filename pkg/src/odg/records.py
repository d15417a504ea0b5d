"""Article records and their line-delimited JSON representation."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator

MESH_UI_RE = re.compile(r"^[DC]\d+$")


@dataclass
class ArticleRecord:
    """One literature document keyed by its PMID.

    ``mesh_headings`` holds MeSH descriptor UIs (``D…`` or ``C…``), not
    descriptor names. ``fulltext_body`` is only ever set for records that
    also carry a PMCID.
    """

    pmid: str
    title: str = ""
    abstract_text: str | None = None
    fulltext_body: str | None = None
    mesh_headings: list[str] = field(default_factory=list)
    pub_date: date | None = None
    pmcid: str | None = None

    def __post_init__(self):
        if not self.pmid:
            raise ValueError("article record requires a nonempty pmid")
        for ui in self.mesh_headings:
            if not MESH_UI_RE.match(ui):
                raise ValueError(f"malformed MeSH descriptor UI: {ui!r}")
        if self.fulltext_body is not None and self.pmcid is None:
            raise ValueError(f"record {self.pmid}: fulltext without a pmcid")

    def with_fulltext(self, body: str, pmcid: str | None = None) -> "ArticleRecord":
        return replace(self, fulltext_body=body, pmcid=pmcid or self.pmcid)

    def to_json(self) -> dict:
        return {
            "pmid": self.pmid,
            "title": self.title,
            "abstract": self.abstract_text,
            "fulltext": self.fulltext_body,
            "mesh_headings": list(self.mesh_headings),
            "pub_date": self.pub_date.isoformat() if self.pub_date else None,
            "pmcid": self.pmcid,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ArticleRecord":
        raw_date = obj.get("pub_date")
        return cls(
            pmid=obj["pmid"],
            title=obj.get("title") or "",
            abstract_text=obj.get("abstract"),
            fulltext_body=obj.get("fulltext"),
            mesh_headings=list(obj.get("mesh_headings") or []),
            pub_date=date.fromisoformat(raw_date) if raw_date else None,
            pmcid=obj.get("pmcid"),
        )


def write_article_records(path: str | Path, records: Iterable[ArticleRecord]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_article_records(path: str | Path) -> Iterator[ArticleRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield ArticleRecord.from_json(json.loads(line))
