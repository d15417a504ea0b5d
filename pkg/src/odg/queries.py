"""Read-only analytical queries over the knowledge graph.

All traversals treat edges as undirected unless a query is explicitly about
hierarchy direction (the ``ISA`` descendant walk). Literature edges
(``MENTIONED_IN``, ``HAS_MESH``) participate in path finding by default and
can be excluded for concept-only paths.
"""

from __future__ import annotations

import statistics
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .store import HAS_MESH, MENTIONED_IN, KnowledgeGraph, NodeKey

LITERATURE_PREDICATES = frozenset({MENTIONED_IN, HAS_MESH})
ISA = "ISA"
INTERACTS_WITH = "INTERACTS_WITH"
ENZYME_TYPE = "Enzyme"
DEFAULT_DESCENDANT_DEPTH = 10


class NotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class RankRow:
    semantic_type: str
    concept_count: int
    rank: int


@dataclass
class SemanticTypeRanking:
    rows: list[RankRow]

    def as_mapping(self) -> dict[str, int]:
        return {r.semantic_type: r.rank for r in self.rows}


@dataclass(frozen=True)
class ComparisonRow:
    semantic_type: str
    ranks: tuple[int, ...]
    stdv: float


@dataclass
class RankComparison:
    rows: list[ComparisonRow]


@dataclass(frozen=True)
class ConceptProfile:
    cui: str
    mention_total: int
    article_count: int
    topic_article_count: int
    relation_edge_count: int
    relation_type_count: int
    neighbor_concept_count: int


@dataclass(frozen=True)
class EnrichmentResult:
    interacting_concepts: int
    source_filtered: int | None
    interacting_enzymes: int


@dataclass(frozen=True)
class PathResult:
    nodes: tuple[NodeKey, ...]
    edge_labels: tuple[tuple[str, ...], ...]

    @property
    def length(self) -> int:
        return len(self.edge_labels)


def _require_concept(graph: KnowledgeGraph, cui: str) -> NodeKey:
    if cui not in graph.concepts:
        raise NotFoundError(f"no concept node for {cui}")
    return ("concept", cui)


def rank_semantic_types(graph: KnowledgeGraph) -> SemanticTypeRanking:
    """Rank semantic types by how many distinct mentioned concepts carry them.

    Only concepts with at least one ``MENTIONED_IN`` edge count, and only
    types with at least one such concept are ranked. Ties in count are
    broken by type name so the ranking is a total order.
    """
    mentioned: set[str] = set()
    for edge in graph.edges.values():
        if edge.predicate == MENTIONED_IN and edge.subject[0] == "concept":
            mentioned.add(edge.subject[1])
    counts: dict[str, int] = defaultdict(int)
    for cui in mentioned:
        node = graph.concepts.get(cui)
        if node is None:
            continue
        for st in node.semantic_types:
            counts[st] += 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    rows = [
        RankRow(semantic_type=st, concept_count=n, rank=i)
        for i, (st, n) in enumerate(ordered, start=1)
    ]
    return SemanticTypeRanking(rows=rows)


def compare_rankings(
    rankings: Sequence[SemanticTypeRanking | Mapping[str, int]],
) -> RankComparison:
    """Cross-graph rank spread, sorted by decreasing sample standard deviation.

    Types missing from any input ranking are excluded. Requires at least two
    rankings; the standard deviation uses the K-1 divisor.
    """
    if len(rankings) < 2:
        raise ValueError("rank comparison requires at least two rankings")
    maps = [
        r.as_mapping() if isinstance(r, SemanticTypeRanking) else dict(r)
        for r in rankings
    ]
    common = set(maps[0])
    for m in maps[1:]:
        common &= set(m)
    rows = []
    for st in common:
        ranks = tuple(m[st] for m in maps)
        rows.append(ComparisonRow(semantic_type=st, ranks=ranks, stdv=statistics.stdev(ranks)))
    rows.sort(key=lambda r: (-r.stdv, r.semantic_type))
    return RankComparison(rows=rows)


def concept_profile(graph: KnowledgeGraph, cui: str) -> ConceptProfile:
    """Mention, topic, and relation tallies for one concept."""
    key = _require_concept(graph, cui)
    mention_total = 0
    article_count = 0
    topic_article_count = 0
    relation_edges = 0
    relation_types: set[str] = set()
    neighbors: set[str] = set()
    for edge in graph.edges_of(key):
        if edge.predicate == MENTIONED_IN:
            if edge.subject == key:
                mention_total += edge.aggregate_count
                article_count += 1
            continue
        if edge.predicate == HAS_MESH:
            if edge.object == key:
                topic_article_count += 1
            continue
        relation_edges += 1
        relation_types.add(edge.predicate)
        other = edge.object if edge.subject == key else edge.subject
        if other[0] == "concept" and other != key:
            neighbors.add(other[1])
    return ConceptProfile(
        cui=cui,
        mention_total=mention_total,
        article_count=article_count,
        topic_article_count=topic_article_count,
        relation_edge_count=relation_edges,
        relation_type_count=len(relation_types),
        neighbor_concept_count=len(neighbors),
    )


def _articles_mentioning(graph: KnowledgeGraph, key: NodeKey) -> set[str]:
    return {
        edge.object[1]
        for edge in graph.edges_of(key)
        if edge.predicate == MENTIONED_IN and edge.subject == key
    }


def _isa_descendants(graph: KnowledgeGraph, ancestor: NodeKey, max_depth: int) -> set[str]:
    children: dict[NodeKey, set[NodeKey]] = defaultdict(set)
    for edge in graph.edges.values():
        if edge.predicate == ISA:
            children[edge.object].add(edge.subject)
    seen: set[NodeKey] = set()
    frontier = {ancestor}
    for _ in range(max_depth):
        nxt = set()
        for node in frontier:
            for child in children.get(node, ()):
                if child not in seen and child != ancestor:
                    seen.add(child)
                    nxt.add(child)
        if not nxt:
            break
        frontier = nxt
    return {ident for kind, ident in seen if kind == "concept"}


def cooccurring_descendants(
    graph: KnowledgeGraph,
    anchor_cui: str,
    ancestor_cui: str,
    max_depth: int = DEFAULT_DESCENDANT_DEPTH,
) -> list[tuple[str, int]]:
    """Concepts below ``ancestor_cui`` that share articles with the anchor.

    Descent is transitive over ``ISA`` edges down to ``max_depth`` levels.
    Results are (cui, shared article count), most shared first.
    """
    anchor_key = _require_concept(graph, anchor_cui)
    ancestor_key = _require_concept(graph, ancestor_cui)
    anchor_articles = _articles_mentioning(graph, anchor_key)
    if not anchor_articles:
        return []
    out = []
    for cui in _isa_descendants(graph, ancestor_key, max_depth):
        if cui == anchor_cui:
            continue
        shared = _articles_mentioning(graph, ("concept", cui)) & anchor_articles
        if shared:
            out.append((cui, len(shared)))
    out.sort(key=lambda pair: (-pair[1], pair[0]))
    return out


def interaction_enrichment(
    graph: KnowledgeGraph,
    cui: str,
    filter_source: str | None = None,
) -> EnrichmentResult:
    """Distinct interaction partners of a concept, optionally source-filtered.

    The filtered count keeps only partners reachable through an edge with at
    least one provenance entry from ``filter_source``. The enzyme count is a
    view over all partners whose semantic types include the enzyme type.
    """
    key = _require_concept(graph, cui)
    partners: set[str] = set()
    filtered: set[str] = set()
    for edge in graph.edges_of(key):
        if edge.predicate != INTERACTS_WITH:
            continue
        other = edge.object if edge.subject == key else edge.subject
        if other[0] != "concept" or other == key:
            continue
        partners.add(other[1])
        if filter_source is not None and any(
            p.resource == filter_source for p in edge.provenance
        ):
            filtered.add(other[1])
    enzymes = sum(
        1
        for p in partners
        if p in graph.concepts and ENZYME_TYPE in graph.concepts[p].semantic_types
    )
    return EnrichmentResult(
        interacting_concepts=len(partners),
        source_filtered=len(filtered) if filter_source is not None else None,
        interacting_enzymes=enzymes,
    )


def _adjacency(graph: KnowledgeGraph, include_literature: bool):
    neighbors: dict[NodeKey, dict[NodeKey, set[str]]] = defaultdict(lambda: defaultdict(set))
    for edge in graph.edges.values():
        if not include_literature and edge.predicate in LITERATURE_PREDICATES:
            continue
        neighbors[edge.subject][edge.object].add(edge.predicate)
        neighbors[edge.object][edge.subject].add(edge.predicate)
    return neighbors


def _bfs_distances(start: NodeKey, neighbors, limit: int) -> dict[NodeKey, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        d = dist[node]
        if d >= limit:
            continue
        for nxt in neighbors.get(node, ()):
            if nxt not in dist:
                dist[nxt] = d + 1
                queue.append(nxt)
    return dist


def shortest_paths(
    graph: KnowledgeGraph,
    cui_a: str,
    cui_b: str,
    max_hops: int,
    include_literature: bool = True,
) -> list[PathResult]:
    """All minimal-length simple paths between two concepts, undirected.

    Each hop is annotated with every predicate label connecting the pair of
    nodes. Paths come back in lexicographic node-key order. An unreachable
    pair (within ``max_hops``) is an empty result, not an error.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be at least 1")
    key_a = _require_concept(graph, cui_a)
    key_b = _require_concept(graph, cui_b)
    if key_a == key_b:
        return [PathResult(nodes=(key_a,), edge_labels=())]

    neighbors = _adjacency(graph, include_literature)
    dist_a = _bfs_distances(key_a, neighbors, max_hops)
    if key_b not in dist_a:
        return []
    length = dist_a[key_b]
    dist_b = _bfs_distances(key_b, neighbors, length)

    paths: list[PathResult] = []

    def extend(node: NodeKey, trail: list[NodeKey]):
        depth = len(trail)
        if node == key_b:
            labels = tuple(
                tuple(sorted(neighbors[trail[i]][trail[i + 1]]))
                for i in range(len(trail) - 1)
            )
            paths.append(PathResult(nodes=tuple(trail), edge_labels=labels))
            return
        for nxt in sorted(neighbors.get(node, ())):
            if dist_a.get(nxt) == depth and dist_b.get(nxt) == length - depth:
                extend(nxt, trail + [nxt])

    extend(key_a, [key_a])
    paths.sort(key=lambda p: p.nodes)
    return paths
