"""Render query results to delimited files and matplotlib figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .queries import (
    ConceptProfile,
    EnrichmentResult,
    PathResult,
    RankComparison,
    SemanticTypeRanking,
)


def _write_tsv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _barh(path: Path, labels: list[str], values: list[float], title: str, xlabel: str) -> None:
    height = max(2.0, 0.35 * len(labels) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    ypos = range(len(labels))
    ax.barh(ypos, values, color="#4878a8")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_ranking_report(ranking: SemanticTypeRanking, outdir: str | Path, top: int = 25) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv = outdir / "semantic_type_ranking.tsv"
    _write_tsv(
        tsv,
        ["rank", "semantic_type", "distinct_concepts"],
        [[r.rank, r.semantic_type, r.concept_count] for r in ranking.rows],
    )
    png = outdir / "semantic_type_ranking.png"
    head = ranking.rows[:top]
    _barh(
        png,
        [r.semantic_type for r in head],
        [r.concept_count for r in head],
        "Semantic types by distinct mentioned concepts",
        "distinct concepts",
    )
    return [tsv, png]


def write_comparison_report(comparison: RankComparison, outdir: str | Path, top: int = 25) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    k = len(comparison.rows[0].ranks) if comparison.rows else 0
    tsv = outdir / "rank_comparison.tsv"
    _write_tsv(
        tsv,
        ["semantic_type"] + [f"rank_{i + 1}" for i in range(k)] + ["stdv"],
        [[r.semantic_type, *r.ranks, f"{r.stdv:.2f}"] for r in comparison.rows],
    )
    png = outdir / "rank_comparison.png"
    head = comparison.rows[:top]
    _barh(
        png,
        [r.semantic_type for r in head],
        [r.stdv for r in head],
        "Rank spread across graphs",
        "standard deviation of rank",
    )
    return [tsv, png]


def write_profile_report(profile: ConceptProfile, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv = outdir / f"profile_{profile.cui}.tsv"
    fields = [
        ("mention_total", profile.mention_total),
        ("article_count", profile.article_count),
        ("topic_article_count", profile.topic_article_count),
        ("relation_edge_count", profile.relation_edge_count),
        ("relation_type_count", profile.relation_type_count),
        ("neighbor_concept_count", profile.neighbor_concept_count),
    ]
    _write_tsv(tsv, ["metric", "value"], [[k, v] for k, v in fields])
    return [tsv]


def write_enrichment_report(result: EnrichmentResult, cui: str, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv = outdir / f"enrichment_{cui}.tsv"
    rows = [
        ["interacting_concepts", result.interacting_concepts],
        ["source_filtered", "" if result.source_filtered is None else result.source_filtered],
        ["interacting_enzymes", result.interacting_enzymes],
    ]
    _write_tsv(tsv, ["metric", "value"], rows)
    return [tsv]


def write_paths_report(paths: list[PathResult], outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv = outdir / "paths.tsv"
    rows = []
    for i, p in enumerate(paths):
        node_text = " -> ".join(f"{kind}:{ident}" for kind, ident in p.nodes)
        label_text = " | ".join(",".join(labels) for labels in p.edge_labels)
        rows.append([i, p.length, node_text, label_text])
    _write_tsv(tsv, ["path", "length", "nodes", "edge_labels"], rows)
    return [tsv]


def write_descendants_report(pairs: list[tuple[str, int]], outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv = outdir / "cooccurring_descendants.tsv"
    _write_tsv(tsv, ["cui", "shared_articles"], [[c, n] for c, n in pairs])
    return [tsv]
