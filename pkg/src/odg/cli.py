"""The ``odg`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, store
from .analysis import analyze_articles
from .drugbank import parse_drugbank_interactions
from .integration import resolve_relations, write_unmapped_report
from .literature import harvest_articles
from .mapping import MappingTableError, load_lexicon_table, load_mapping_table
from .mesh import mesh_xml_to_obo
from .obo import OboParseError, obo_to_relations, parse_obo
from .pipeline import ConfigError, PipelineConfig, StageFailure, run_full, run_update
from .records import read_article_records, write_article_records
from .relations import read_any_relations, read_integrated_relations, write_relations
from .tagger import Lexicon
from . import queries as q

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_STAGE_FAILURE = 3

logger = logging.getLogger(__name__)


def _fail(message: str, code: int = EXIT_VALIDATION) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_harvest(args) -> int:
    config = PipelineConfig.from_file(args.config)
    records, report = harvest_articles(config.harvest_config())
    out = Path(args.out) if args.out else config.output_dir / "stages" / "articles.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    n = write_article_records(out, records)
    print(f"wrote {n} article records to {out}")
    print(json.dumps(report.to_json(), indent=2))
    return EXIT_OK


def cmd_harvest_structured(args) -> int:
    text = Path(args.infile).read_text(encoding="utf-8")
    if args.format == "obo":
        relations = obo_to_relations(parse_obo(text), args.source)
    elif args.format == "mesh-xml":
        relations = obo_to_relations(parse_obo(mesh_xml_to_obo(text)), args.source)
    else:
        relations = parse_drugbank_interactions(text, args.source)
    n = write_relations(args.out, relations)
    print(f"wrote {n} relations to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    articles = list(read_article_records(args.articles))
    lexicon = None
    if args.lexicon:
        lexicon = Lexicon(load_lexicon_table(args.lexicon).term_to_cui)
    result = analyze_articles(articles, lexicon=lexicon, semrep_files=args.semrep or [])
    n = write_relations(args.out, result.relations)
    print(
        f"wrote {n} relations to {args.out} "
        f"({result.mention_count} mentions, {result.predication_count} predications)"
    )
    if result.semrep_malformed or result.semrep_dropped:
        print(
            f"fielded input: {result.semrep_dropped} records outside the article set, "
            f"{result.semrep_malformed} malformed lines skipped"
        )
    return EXIT_OK


def cmd_integrate(args) -> int:
    table = load_mapping_table(args.conso, args.sty)
    records = [rel for path in args.relations for rel in read_any_relations(path)]
    integrated, unmapped = resolve_relations(records, table)
    write_relations(args.out, integrated)
    write_unmapped_report(args.unmapped_report, unmapped)
    print(
        f"{len(records)} relations in, {len(integrated)} integrated, "
        f"{len(unmapped)} diverted to {args.unmapped_report}"
    )
    return EXIT_OK


def cmd_build(args) -> int:
    relations = [rel for path in args.relations for rel in read_integrated_relations(path)]
    graph, stats = store.build_graph(relations)
    manifest = store.snapshot(graph, args.out)
    print(
        f"graph built at {args.out}: {manifest['counts']['nodes']} nodes, "
        f"{manifest['counts']['edges']} edges ({stats.nodes_added} nodes added)"
    )
    return EXIT_OK


def cmd_update(args) -> int:
    if args.config:
        config = PipelineConfig.from_file(args.config, _config_overrides(args))
        manifest = run_update(config)
        print(f"update complete; manifest at {config.output_dir / 'run-manifest.json'}")
        merge = manifest.stages[-1]["counts"]
        print(json.dumps(merge, indent=2))
        return EXIT_OK
    if not args.graph or not args.relations:
        return _fail("update needs either --config or both --graph and --relations")
    graph = store.load(args.graph)
    relations = [rel for path in args.relations for rel in read_integrated_relations(path)]
    stats = graph.merge_increment(relations)
    store.snapshot(graph, args.graph)
    print(
        f"merged {len(relations)} relations: +{stats.nodes_added} nodes, "
        f"+{stats.edges_added} edges, +{stats.provenance_appended} provenance, "
        f"{stats.duplicates_skipped} duplicates skipped"
    )
    return EXIT_OK


def _config_overrides(args) -> dict:
    return {
        "output_dir": getattr(args, "output_dir", None),
        "endpoints.entrez_base_url": getattr(args, "entrez_base_url", None),
        "limits.fulltext_cap": getattr(args, "fulltext_cap", None),
        "limits.rate_limit": getattr(args, "rate_limit", None),
    }


def cmd_run(args) -> int:
    config = PipelineConfig.from_file(args.config, _config_overrides(args))
    manifest = run_full(config)
    print(f"run complete; manifest at {config.output_dir / 'run-manifest.json'}")
    print(f"graph content hash: {manifest.graph_content_hash}")
    return EXIT_OK


def _print_table(header: list[str], rows: list[list]) -> None:
    rows = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*header))
    print(fmt.format(*("-" * w for w in widths)))
    for row in rows:
        print(fmt.format(*row))


def _node_text(key) -> str:
    return f"{key[0]}:{key[1]}"


def cmd_query(args) -> int:
    if args.target == "compare":
        if not args.graphs or len(args.graphs) < 2:
            return _fail("compare needs --graphs with at least two graph directories")
        rankings = [q.rank_semantic_types(store.load(d)) for d in args.graphs]
        comparison = q.compare_rankings(rankings)
        if args.report:
            from .report import write_comparison_report

            for path in write_comparison_report(comparison, args.report):
                print(f"report: {path}", file=sys.stderr)
        if args.json:
            print(json.dumps(
                [{"semantic_type": r.semantic_type, "ranks": list(r.ranks), "stdv": r.stdv}
                 for r in comparison.rows], indent=2))
        else:
            _print_table(
                ["semantic_type", "ranks", "stdv"],
                [[r.semantic_type, " ".join(map(str, r.ranks)), f"{r.stdv:.2f}"] for r in comparison.rows],
            )
        return EXIT_OK

    if not args.operation:
        return _fail("query needs an operation")
    graph = store.load(args.target)
    op = args.operation

    if op == "rank-types":
        ranking = q.rank_semantic_types(graph)
        if args.report:
            from .report import write_ranking_report

            for path in write_ranking_report(ranking, args.report):
                print(f"report: {path}", file=sys.stderr)
        if args.json:
            print(json.dumps(
                [{"semantic_type": r.semantic_type, "concepts": r.concept_count, "rank": r.rank}
                 for r in ranking.rows], indent=2))
        else:
            _print_table(
                ["rank", "semantic_type", "distinct_concepts"],
                [[r.rank, r.semantic_type, r.concept_count] for r in ranking.rows],
            )
        return EXIT_OK

    if op == "profile":
        if not args.cui:
            return _fail("profile needs --cui")
        profile = q.concept_profile(graph, args.cui)
        if args.report:
            from .report import write_profile_report

            for path in write_profile_report(profile, args.report):
                print(f"report: {path}", file=sys.stderr)
        payload = {
            "cui": profile.cui,
            "mention_total": profile.mention_total,
            "article_count": profile.article_count,
            "topic_article_count": profile.topic_article_count,
            "relation_edge_count": profile.relation_edge_count,
            "relation_type_count": profile.relation_type_count,
            "neighbor_concept_count": profile.neighbor_concept_count,
        }
        if args.json:
            print(json.dumps(payload, indent=2))
        else:
            _print_table(["metric", "value"], [[k, v] for k, v in payload.items()])
        return EXIT_OK

    if op == "descendants-cooccur":
        if not args.anchor or not args.ancestor:
            return _fail("descendants-cooccur needs --anchor and --ancestor")
        pairs = q.cooccurring_descendants(graph, args.anchor, args.ancestor, args.max_depth)
        if args.report:
            from .report import write_descendants_report

            for path in write_descendants_report(pairs, args.report):
                print(f"report: {path}", file=sys.stderr)
        if args.json:
            print(json.dumps([{"cui": c, "shared_articles": n} for c, n in pairs], indent=2))
        else:
            _print_table(["cui", "shared_articles"], [[c, n] for c, n in pairs])
        return EXIT_OK

    if op == "enrich":
        if not args.cui:
            return _fail("enrich needs --cui")
        result = q.interaction_enrichment(graph, args.cui, args.source)
        if args.report:
            from .report import write_enrichment_report

            for path in write_enrichment_report(result, args.cui, args.report):
                print(f"report: {path}", file=sys.stderr)
        payload = {
            "cui": args.cui,
            "interacting_concepts": result.interacting_concepts,
            "source_filtered": result.source_filtered,
            "interacting_enzymes": result.interacting_enzymes,
        }
        if args.json:
            print(json.dumps(payload, indent=2))
        else:
            _print_table(["metric", "value"], [[k, v] for k, v in payload.items()])
        return EXIT_OK

    if op == "paths":
        if not args.from_cui or not args.to_cui:
            return _fail("paths needs --from and --to")
        paths = q.shortest_paths(
            graph, args.from_cui, args.to_cui, args.max_hops,
            include_literature=not args.concepts_only,
        )
        if args.report:
            from .report import write_paths_report

            for path in write_paths_report(paths, args.report):
                print(f"report: {path}", file=sys.stderr)
        if args.json:
            print(json.dumps(
                [{"nodes": [_node_text(n) for n in p.nodes],
                  "edge_labels": [list(labels) for labels in p.edge_labels],
                  "length": p.length} for p in paths], indent=2))
        else:
            if not paths:
                print("no path found")
            for p in paths:
                hops = []
                for i, labels in enumerate(p.edge_labels):
                    hops.append(_node_text(p.nodes[i]))
                    hops.append(f"-[{','.join(labels)}]-")
                hops.append(_node_text(p.nodes[-1]))
                print(" ".join(hops))
        return EXIT_OK

    return _fail(f"unknown query operation {op!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"odg {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harvest", help="harvest disease literature into an article-records file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("harvest-structured", help="extract relations from a structured resource")
    p.add_argument("--format", required=True, choices=["obo", "mesh-xml", "drugbank"])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_harvest_structured)

    p = sub.add_parser("analyze", help="extract mentions and predications from articles")
    p.add_argument("--articles", required=True)
    p.add_argument("--semrep", action="append")
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("integrate", help="resolve relation endpoints to concept identifiers")
    p.add_argument("--relations", nargs="+", required=True)
    p.add_argument("--conso", required=True)
    p.add_argument("--sty", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--unmapped-report", required=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("build", help="build a graph snapshot from integrated relations")
    p.add_argument("--relations", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    def add_override_flags(parser):
        parser.add_argument("--output-dir", help="override the config's output_dir")
        parser.add_argument("--entrez-base-url", help="override endpoints.entrez_base_url")
        parser.add_argument("--fulltext-cap", type=int, help="override limits.fulltext_cap")
        parser.add_argument("--rate-limit", type=float, help="override limits.rate_limit")

    p = sub.add_parser("update", help="merge new knowledge into an existing graph")
    p.add_argument("--config")
    p.add_argument("--graph")
    p.add_argument("--relations", nargs="+")
    add_override_flags(p)
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    add_override_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("query", help="analytical queries over a graph snapshot")
    p.add_argument("target", help="graph directory, or 'compare'")
    p.add_argument("operation", nargs="?",
                   choices=["rank-types", "profile", "descendants-cooccur", "enrich", "paths"])
    p.add_argument("--graphs", nargs="+", help="graph directories for compare")
    p.add_argument("--cui")
    p.add_argument("--anchor")
    p.add_argument("--ancestor")
    p.add_argument("--source")
    p.add_argument("--from", dest="from_cui")
    p.add_argument("--to", dest="to_cui")
    p.add_argument("--max-hops", type=int, default=4)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--concepts-only", action="store_true",
                   help="exclude mention and topic edges from path finding")
    p.add_argument("--json", action="store_true")
    p.add_argument("--report", metavar="DIR",
                   help="also write delimited output and figures into DIR")
    p.set_defaults(func=cmd_query)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    except StageFailure as exc:
        return _fail(str(exc), EXIT_STAGE_FAILURE)
    except (MappingTableError, OboParseError, q.NotFoundError, ValueError) as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    except store.SnapshotCorruptionError as exc:
        return _fail(str(exc), EXIT_STAGE_FAILURE)


if __name__ == "__main__":
    sys.exit(main())
