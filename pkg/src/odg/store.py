"""The integrated property graph.

One node per concept (CUI) and per article (PMID); at most one edge per
(subject, predicate, object) triple. Every piece of evidence for an edge is
kept as a provenance entry: either a structured resource name or an article
plus sentence position, optionally with a negation flag. The aggregate count
of an edge is by definition the length of its provenance list.

Storage is an in-memory adjacency structure made durable as two sorted
line-delimited JSON files plus a manifest; no database server is involved.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .records import ArticleRecord
from .relations import IntegratedRelation
from .resources import predicate_label_map

logger = logging.getLogger(__name__)

CUI_NODE_RE = re.compile(r"^C\d{7}$")

MENTIONED_IN = "MENTIONED_IN"
HAS_MESH = "HAS_MESH"

NODES_FILE = "graph.nodes.jsonl"
EDGES_FILE = "graph.edges.jsonl"
MANIFEST_FILE = "graph.manifest.json"

NodeKey = tuple[str, str]  # ("concept", cui) | ("article", pmid)


class SnapshotCorruptionError(Exception):
    pass


@dataclass
class ConceptNode:
    cui: str
    preferred_name: str | None = None
    semantic_types: set[str] = field(default_factory=set)
    source_vocabularies: set[str] = field(default_factory=set)
    stub: bool = False

    @property
    def key(self) -> NodeKey:
        return ("concept", self.cui)


@dataclass
class ArticleNode:
    pmid: str
    title: str | None = None
    has_abstract: bool = False
    has_fulltext: bool = False
    pub_date: date | None = None
    stub: bool = False

    @property
    def key(self) -> NodeKey:
        return ("article", self.pmid)


@dataclass(frozen=True)
class ProvenanceEntry:
    """Where one assertion of an edge came from.

    Exactly one of ``resource`` (a structured source name) or ``pmid`` (a
    literature article) is set. Two entries are duplicates only when every
    field matches.
    """

    resource: str | None = None
    pmid: str | None = None
    sentence_index: int | None = None
    negated: bool | None = None
    harvest_timestamp: str | None = None

    def __post_init__(self):
        if (self.resource is None) == (self.pmid is None):
            raise ValueError("provenance needs exactly one of resource or pmid")

    def sort_key(self):
        return (
            self.resource or "",
            self.pmid or "",
            -1 if self.sentence_index is None else self.sentence_index,
            {None: -1, False: 0, True: 1}[self.negated],
            self.harvest_timestamp or "",
        )

    def to_json(self) -> dict:
        out: dict = {}
        if self.resource is not None:
            out["resource"] = self.resource
        if self.pmid is not None:
            out["pmid"] = self.pmid
        if self.sentence_index is not None:
            out["sentence_index"] = self.sentence_index
        if self.negated is not None:
            out["negated"] = self.negated
        if self.harvest_timestamp is not None:
            out["harvest_timestamp"] = self.harvest_timestamp
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ProvenanceEntry":
        return cls(
            resource=obj.get("resource"),
            pmid=obj.get("pmid"),
            sentence_index=obj.get("sentence_index"),
            negated=obj.get("negated"),
            harvest_timestamp=obj.get("harvest_timestamp"),
        )


@dataclass
class Edge:
    subject: NodeKey
    predicate: str
    object: NodeKey
    provenance: list[ProvenanceEntry] = field(default_factory=list)

    @property
    def aggregate_count(self) -> int:
        return len(self.provenance)

    @property
    def key(self):
        return (self.subject, self.predicate, self.object)


@dataclass
class MergeStats:
    nodes_added: int = 0
    edges_added: int = 0
    provenance_appended: int = 0
    duplicates_skipped: int = 0

    def __add__(self, other: "MergeStats") -> "MergeStats":
        return MergeStats(
            self.nodes_added + other.nodes_added,
            self.edges_added + other.edges_added,
            self.provenance_appended + other.provenance_appended,
            self.duplicates_skipped + other.duplicates_skipped,
        )


class KnowledgeGraph:
    def __init__(self):
        self.concepts: dict[str, ConceptNode] = {}
        self.articles: dict[str, ArticleNode] = {}
        self.edges: dict[tuple, Edge] = {}
        self._incident: dict[NodeKey, set[tuple]] = defaultdict(set)
        self._predicate_map = predicate_label_map()

    # -- nodes ---------------------------------------------------------

    def upsert_concept(self, node: ConceptNode) -> NodeKey:
        """Insert or merge a concept node; returns its key.

        On merge the semantic-type and source-vocabulary sets are unioned
        and the preferred name from the first insertion wins.
        """
        if not CUI_NODE_RE.match(node.cui):
            raise ValueError(f"malformed CUI {node.cui!r}: expected C followed by 7 digits")
        existing = self.concepts.get(node.cui)
        if existing is None:
            self.concepts[node.cui] = ConceptNode(
                cui=node.cui,
                preferred_name=node.preferred_name,
                semantic_types=set(node.semantic_types),
                source_vocabularies=set(node.source_vocabularies),
                stub=node.stub,
            )
        else:
            existing.semantic_types |= node.semantic_types
            existing.source_vocabularies |= node.source_vocabularies
            if existing.preferred_name is None:
                existing.preferred_name = node.preferred_name
            if not node.stub:
                existing.stub = False
        return ("concept", node.cui)

    def upsert_article(self, node: ArticleNode) -> NodeKey:
        if not node.pmid:
            raise ValueError("article node requires a nonempty pmid")
        existing = self.articles.get(node.pmid)
        if existing is None:
            self.articles[node.pmid] = ArticleNode(
                pmid=node.pmid,
                title=node.title,
                has_abstract=node.has_abstract,
                has_fulltext=node.has_fulltext,
                pub_date=node.pub_date,
                stub=node.stub,
            )
        else:
            if existing.title is None:
                existing.title = node.title
            existing.has_abstract = existing.has_abstract or node.has_abstract
            existing.has_fulltext = existing.has_fulltext or node.has_fulltext
            if existing.pub_date is None:
                existing.pub_date = node.pub_date
            if not node.stub:
                existing.stub = False
        return ("article", node.pmid)

    def _ensure_endpoint(self, endpoint) -> tuple[NodeKey, bool]:
        """Create (as needed) the node behind a resolved endpoint."""
        if endpoint.kind == "article":
            created = endpoint.id not in self.articles
            if created:
                self.articles[endpoint.id] = ArticleNode(
                    pmid=endpoint.id, title=endpoint.label, stub=True
                )
            return ("article", endpoint.id), created
        created = endpoint.id not in self.concepts
        stub = endpoint.label is None and not endpoint.semantic_types
        node = ConceptNode(
            cui=endpoint.id,
            preferred_name=endpoint.label,
            semantic_types=set(endpoint.semantic_types),
            source_vocabularies={endpoint.source_vocab} if endpoint.source_vocab else set(),
            stub=stub,
        )
        self.upsert_concept(node)
        return ("concept", endpoint.id), created

    # -- edges ---------------------------------------------------------

    def normalize_predicate(self, label: str) -> str:
        return self._predicate_map.get(label, label)

    def _provenance_for(self, relation: IntegratedRelation) -> list[ProvenanceEntry]:
        attrs = relation.attributes
        ts = attrs.get("harvest_timestamp")
        if "article_pmid" in attrs:
            return [
                ProvenanceEntry(
                    pmid=attrs["article_pmid"],
                    sentence_index=attrs.get("sentence_index"),
                    negated=attrs.get("negated"),
                    harvest_timestamp=ts,
                )
            ]
        predicate = self.normalize_predicate(relation.predicate)
        if predicate == MENTIONED_IN and relation.object.kind == "article":
            sentences = attrs.get("sentences") or [None]
            return [
                ProvenanceEntry(
                    pmid=relation.object.id,
                    sentence_index=s,
                    harvest_timestamp=ts,
                )
                for s in sentences
            ]
        return [
            ProvenanceEntry(
                resource=relation.source,
                negated=attrs.get("negated"),
                harvest_timestamp=ts,
            )
        ]

    def _apply_relation(self, relation: IntegratedRelation) -> tuple[bool, MergeStats]:
        stats = MergeStats()
        subject_key, s_created = self._ensure_endpoint(relation.subject)
        object_key, o_created = self._ensure_endpoint(relation.object)
        stats.nodes_added += int(s_created) + int(o_created)

        predicate = self.normalize_predicate(relation.predicate)
        edge_key = (subject_key, predicate, object_key)
        edge = self.edges.get(edge_key)
        created = edge is None
        if created:
            edge = Edge(subject=subject_key, predicate=predicate, object=object_key)
            self.edges[edge_key] = edge
            self._incident[subject_key].add(edge_key)
            self._incident[object_key].add(edge_key)
            stats.edges_added += 1
        for entry in self._provenance_for(relation):
            if entry in edge.provenance:
                stats.duplicates_skipped += 1
            else:
                edge.provenance.append(entry)
                if not created:
                    stats.provenance_appended += 1
        return created, stats

    def upsert_edge(self, relation: IntegratedRelation):
        """Insert or extend the edge for a relation; returns the edge key.

        Endpoint nodes are auto-created as stubs when missing. A provenance
        entry identical to one already present is skipped, which makes
        re-ingesting the same material a no-op.
        """
        _, _stats = self._apply_relation(relation)
        subject_key = (relation.subject.kind, relation.subject.id)
        object_key = (relation.object.kind, relation.object.id)
        return (subject_key, self.normalize_predicate(relation.predicate), object_key)

    def merge_increment(
        self,
        relations: Sequence[IntegratedRelation],
        articles: Sequence[ArticleRecord] = (),
    ) -> MergeStats:
        """Apply a batch of relations (plus article metadata) and tally it."""
        stats = MergeStats()
        for art in articles:
            created = art.pmid not in self.articles
            self.upsert_article(
                ArticleNode(
                    pmid=art.pmid,
                    title=art.title or None,
                    has_abstract=art.abstract_text is not None,
                    has_fulltext=art.fulltext_body is not None,
                    pub_date=art.pub_date,
                )
            )
            stats.nodes_added += int(created)
        for relation in relations:
            _, rel_stats = self._apply_relation(relation)
            stats = stats + rel_stats
        return stats

    # -- views ---------------------------------------------------------

    def node(self, key: NodeKey):
        kind, ident = key
        return self.concepts.get(ident) if kind == "concept" else self.articles.get(ident)

    def edges_of(self, key: NodeKey) -> list[Edge]:
        return [self.edges[k] for k in sorted(self._incident.get(key, ()))]

    @property
    def node_count(self) -> int:
        return len(self.concepts) + len(self.articles)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def provenance_count(self) -> int:
        return sum(e.aggregate_count for e in self.edges.values())

    # -- canonical serialization ----------------------------------------

    def _node_rows(self) -> list[dict]:
        rows = []
        for pmid in sorted(self.articles):
            a = self.articles[pmid]
            rows.append(
                {
                    "kind": "article",
                    "pmid": a.pmid,
                    "title": a.title,
                    "has_abstract": a.has_abstract,
                    "has_fulltext": a.has_fulltext,
                    "pub_date": a.pub_date.isoformat() if a.pub_date else None,
                    "stub": a.stub,
                }
            )
        for cui in sorted(self.concepts):
            c = self.concepts[cui]
            rows.append(
                {
                    "kind": "concept",
                    "cui": c.cui,
                    "preferred_name": c.preferred_name,
                    "semantic_types": sorted(c.semantic_types),
                    "source_vocabularies": sorted(c.source_vocabularies),
                    "stub": c.stub,
                }
            )
        return rows

    def _edge_rows(self) -> list[dict]:
        rows = []
        for key in sorted(self.edges):
            e = self.edges[key]
            rows.append(
                {
                    "subject": {"kind": e.subject[0], "id": e.subject[1]},
                    "predicate": e.predicate,
                    "object": {"kind": e.object[0], "id": e.object[1]},
                    "count": e.aggregate_count,
                    "provenance": [
                        p.to_json() for p in sorted(e.provenance, key=ProvenanceEntry.sort_key)
                    ],
                }
            )
        return rows

    def structural_digest(self) -> str:
        payload = json.dumps(
            {"nodes": self._node_rows(), "edges": self._edge_rows()},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def equals(self, other: "KnowledgeGraph") -> bool:
        return self.structural_digest() == other.structural_digest()


def _dump_jsonl(rows: list[dict]) -> bytes:
    return "".join(
        json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in rows
    ).encode("utf-8")


def snapshot(
    graph: KnowledgeGraph,
    path: str | Path,
    config_hash: str | None = None,
    source_hashes: dict | None = None,
) -> dict:
    """Persist the graph into ``path`` and return the written manifest.

    Files come out byte-identical for equal graphs: nodes, edges, and
    provenance entries are all written in canonical sorted order.
    """
    outdir = Path(path)
    outdir.mkdir(parents=True, exist_ok=True)
    nodes_bytes = _dump_jsonl(graph._node_rows())
    edges_bytes = _dump_jsonl(graph._edge_rows())
    (outdir / NODES_FILE).write_bytes(nodes_bytes)
    (outdir / EDGES_FILE).write_bytes(edges_bytes)
    manifest = {
        "created_at": datetime.now(timezone.utc).isoformat(),
        "counts": {
            "nodes": graph.node_count,
            "concepts": len(graph.concepts),
            "articles": len(graph.articles),
            "edges": graph.edge_count,
            "provenance": graph.provenance_count,
        },
        "content_hash": hashlib.sha256(nodes_bytes + edges_bytes).hexdigest(),
        "config_hash": config_hash,
        "source_hashes": source_hashes or {},
    }
    with open(outdir / MANIFEST_FILE, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load(path: str | Path) -> KnowledgeGraph:
    """Load a snapshot, verifying manifest counts and the content hash."""
    indir = Path(path)
    manifest_path = indir / MANIFEST_FILE
    if not manifest_path.exists():
        raise SnapshotCorruptionError(f"missing manifest in {indir}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    try:
        nodes_bytes = (indir / NODES_FILE).read_bytes()
        edges_bytes = (indir / EDGES_FILE).read_bytes()
    except FileNotFoundError as exc:
        raise SnapshotCorruptionError(f"snapshot file missing: {exc.filename}") from exc
    content_hash = hashlib.sha256(nodes_bytes + edges_bytes).hexdigest()
    if manifest.get("content_hash") and manifest["content_hash"] != content_hash:
        raise SnapshotCorruptionError("content hash mismatch: snapshot files were modified")

    graph = KnowledgeGraph()
    for line in nodes_bytes.decode("utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj["kind"] == "concept":
            graph.upsert_concept(
                ConceptNode(
                    cui=obj["cui"],
                    preferred_name=obj.get("preferred_name"),
                    semantic_types=set(obj.get("semantic_types") or []),
                    source_vocabularies=set(obj.get("source_vocabularies") or []),
                    stub=obj.get("stub", False),
                )
            )
        else:
            raw_date = obj.get("pub_date")
            graph.upsert_article(
                ArticleNode(
                    pmid=obj["pmid"],
                    title=obj.get("title"),
                    has_abstract=obj.get("has_abstract", False),
                    has_fulltext=obj.get("has_fulltext", False),
                    pub_date=date.fromisoformat(raw_date) if raw_date else None,
                    stub=obj.get("stub", False),
                )
            )
    for line in edges_bytes.decode("utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        subject = (obj["subject"]["kind"], obj["subject"]["id"])
        objkey = (obj["object"]["kind"], obj["object"]["id"])
        edge = Edge(
            subject=subject,
            predicate=obj["predicate"],
            object=objkey,
            provenance=[ProvenanceEntry.from_json(p) for p in obj["provenance"]],
        )
        if edge.aggregate_count != obj.get("count"):
            raise SnapshotCorruptionError(
                f"edge {subject} {obj['predicate']} {objkey}: count does not match provenance"
            )
        key = edge.key
        graph.edges[key] = edge
        graph._incident[subject].add(key)
        graph._incident[objkey].add(key)

    counts = manifest.get("counts", {})
    actual = {
        "nodes": graph.node_count,
        "concepts": len(graph.concepts),
        "articles": len(graph.articles),
        "edges": graph.edge_count,
        "provenance": graph.provenance_count,
    }
    for name, expected in counts.items():
        if actual.get(name) != expected:
            raise SnapshotCorruptionError(
                f"manifest count mismatch for {name}: manifest says {expected}, files hold {actual.get(name)}"
            )
    return graph


def build_graph(
    relations: Iterable[IntegratedRelation],
    articles: Sequence[ArticleRecord] = (),
) -> tuple[KnowledgeGraph, MergeStats]:
    graph = KnowledgeGraph()
    stats = graph.merge_increment(list(relations), articles)
    return graph, stats
