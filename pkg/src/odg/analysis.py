"""Turn article text into relation records: mentions, predications, topics."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .records import ArticleRecord
from .relations import ARTICLE_VOCAB, UMLS_VOCAB, Endpoint, RelationRecord
from .semrep import Predication, ingest_semrep_output
from .tagger import ConceptMention, Lexicon, extract_mentions
from .text import preprocess_text

logger = logging.getLogger(__name__)

MENTIONED_IN = "MENTIONED_IN"
HAS_MESH = "HAS_MESH"
LITERATURE_SOURCE = "literature"
TOPIC_SOURCE = "PubMed"
MESH_VOCAB = "MSH"


def mentions_to_relations(
    mentions: Sequence[ConceptMention],
    predications: Sequence[Predication],
    articles: Sequence[ArticleRecord] = (),
) -> list[RelationRecord]:
    """Aggregate extraction results into the common relation format.

    Emits one ``MENTIONED_IN`` record per distinct (concept, article) pair
    carrying the mention count and the sorted sentence indices, one record
    per distinct predication keyed by (triple, article, sentence, negation),
    and one ``HAS_MESH`` record per curator-assigned topic heading. Output
    order is deterministic regardless of input order.
    """
    per_pair: dict[tuple[str, str], list[int]] = defaultdict(list)
    for m in mentions:
        per_pair[(m.cui, m.pmid)].append(m.sentence_index)

    out: list[RelationRecord] = []
    for (cui, pmid), sentence_indices in per_pair.items():
        out.append(
            RelationRecord(
                subject=Endpoint(UMLS_VOCAB, cui),
                predicate=MENTIONED_IN,
                object=Endpoint(ARTICLE_VOCAB, pmid),
                source=LITERATURE_SOURCE,
                attributes={
                    "count": len(sentence_indices),
                    "sentences": sorted(set(sentence_indices)),
                },
            )
        )

    seen_predications = set()
    for p in predications:
        key = (p.subject_cui, p.predicate, p.object_cui, p.pmid, p.sentence_index, p.negated)
        if key in seen_predications:
            continue
        seen_predications.add(key)
        out.append(
            RelationRecord(
                subject=Endpoint(UMLS_VOCAB, p.subject_cui, p.subject_name),
                predicate=p.predicate,
                object=Endpoint(UMLS_VOCAB, p.object_cui, p.object_name),
                source=LITERATURE_SOURCE,
                attributes={
                    "negated": p.negated,
                    "article_pmid": p.pmid,
                    "sentence_index": p.sentence_index,
                },
            )
        )

    for article in articles:
        for ui in article.mesh_headings:
            out.append(
                RelationRecord(
                    subject=Endpoint(ARTICLE_VOCAB, article.pmid),
                    predicate=HAS_MESH,
                    object=Endpoint(MESH_VOCAB, ui),
                    source=TOPIC_SOURCE,
                    attributes={},
                )
            )

    def sort_key(rel: RelationRecord):
        pmid = rel.attributes.get("article_pmid") or (
            rel.object.code if rel.object.vocab == ARTICLE_VOCAB else
            rel.subject.code if rel.subject.vocab == ARTICLE_VOCAB else ""
        )
        sentence = rel.attributes.get("sentence_index")
        if sentence is None:
            sentences = rel.attributes.get("sentences")
            sentence = sentences[0] if sentences else -1
        return (pmid, sentence, rel.predicate, rel.subject.code, rel.object.code)

    out.sort(key=sort_key)
    return out


@dataclass
class AnalysisResult:
    relations: list[RelationRecord] = field(default_factory=list)
    mention_count: int = 0
    predication_count: int = 0
    semrep_dropped: int = 0
    semrep_malformed: int = 0


def analyze_articles(
    articles: Sequence[ArticleRecord],
    lexicon: Lexicon | None = None,
    semrep_files: Iterable[str] = (),
    semrep_columns: dict | None = None,
) -> AnalysisResult:
    """Run the built-in tagger and/or ingest fielded extractor output.

    Both extraction paths may run; their mentions merge before aggregation
    and any residual duplication is resolved by the graph store.
    """
    mentions: list[ConceptMention] = []
    predications: list[Predication] = []
    result = AnalysisResult()

    if lexicon is not None and len(lexicon):
        for article in articles:
            clean = preprocess_text(article)
            mentions.extend(extract_mentions(clean, lexicon))

    allowlist = {a.pmid for a in articles}
    for path in semrep_files:
        with open(path, encoding="utf-8") as fh:
            ingest = ingest_semrep_output(fh, allowlist, semrep_columns)
        mentions.extend(ingest.mentions)
        predications.extend(ingest.predications)
        result.semrep_dropped += ingest.dropped_by_allowlist
        result.semrep_malformed += ingest.malformed

    result.relations = mentions_to_relations(mentions, predications, articles)
    result.mention_count = len(mentions)
    result.predication_count = len(predications)
    return result
