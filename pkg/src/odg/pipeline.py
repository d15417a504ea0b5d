"""End-to-end pipeline: one declarative config, staged outputs, a manifest.

Every stage persists its output before the next starts, so each artifact is
independently reusable and a failed run leaves everything already produced
intact. The run manifest records timings, input hashes, and per-stage record
counts; its graph content hash is the determinism witness for a run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from . import __version__, store
from .analysis import analyze_articles
from .integration import resolve_relations, write_unmapped_report
from .literature import HarvestConfig, harvest_articles
from .mapping import load_mapping_table
from .mesh import mesh_xml_to_obo
from .obo import obo_to_relations, parse_obo
from .drugbank import parse_drugbank_interactions
from .records import read_article_records, write_article_records
from .relations import read_relations, write_relations
from .tagger import Lexicon

logger = logging.getLogger(__name__)

DATE_FORMAT = "%Y/%m/%d"
MANIFEST_NAME = "run-manifest.json"
GRAPH_DIR = "graph"
STAGE_DIR = "stages"


class ConfigError(Exception):
    pass


class StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _parse_config_date(raw: str | None, key: str) -> date | None:
    if not raw:
        return None
    try:
        return datetime.strptime(raw, DATE_FORMAT).date()
    except ValueError as exc:
        raise ConfigError(f"{key} must use YYYY/MM/DD, got {raw!r}") from exc


@dataclass
class ResourceRef:
    path: Path
    source: str

    @classmethod
    def parse(cls, raw, default_source: str | None = None) -> "ResourceRef":
        if isinstance(raw, str):
            path = Path(raw)
            return cls(path=path, source=default_source or path.stem)
        return cls(path=Path(raw["path"]), source=raw.get("source") or default_source or Path(raw["path"]).stem)


@dataclass
class PipelineConfig:
    mesh_descriptor: str
    mesh_ui: str
    output_dir: Path
    conso: Path
    sty: Path
    entrez_base_url: str | None = None
    fulltext_cap: int = 10_000
    rate_limit: float = 3.0
    api_key: str | None = None
    email: str | None = None
    obo_resources: list[ResourceRef] = field(default_factory=list)
    mesh_xml: ResourceRef | None = None
    drugbank_xml: ResourceRef | None = None
    semrep_files: list[Path] = field(default_factory=list)
    last_update_date: date | None = None
    as_of_date: date | None = None
    config_path: Path | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "PipelineConfig":
        """Load and validate a config file.

        ``overrides`` maps dotted keys (``output_dir``, ``limits.rate_limit``,
        ``endpoints.entrez_base_url``) onto replacement values, letting ad-hoc
        runs adjust a stored config from the command line. Overrides are
        merged before hashing so the manifest reflects the effective config.
        """
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

        for dotted, value in (overrides or {}).items():
            if value is None:
                continue
            target = raw
            *heads, leaf = dotted.split(".")
            for head in heads:
                target = target.setdefault(head, {})
            target[leaf] = value

        disease = raw.get("disease") or {}
        if not disease.get("mesh_descriptor"):
            raise ConfigError("config needs disease.mesh_descriptor")
        resources = raw.get("resources") or {}
        if not resources.get("conso") or not resources.get("sty"):
            raise ConfigError("config needs resources.conso and resources.sty")
        if not raw.get("output_dir"):
            raise ConfigError("config needs output_dir")
        limits = raw.get("limits") or {}
        credentials = raw.get("credentials") or {}
        endpoints = raw.get("endpoints") or {}

        base = path.parent

        def _resolve(p) -> Path:
            p = Path(p)
            return p if p.is_absolute() else (base / p)

        def _ref(raw_ref, default_source=None) -> ResourceRef:
            ref = ResourceRef.parse(raw_ref, default_source)
            return ResourceRef(path=_resolve(ref.path), source=ref.source)

        cfg = cls(
            mesh_descriptor=disease["mesh_descriptor"],
            mesh_ui=disease.get("mesh_ui", ""),
            output_dir=_resolve(raw["output_dir"]),
            conso=_resolve(resources["conso"]),
            sty=_resolve(resources["sty"]),
            entrez_base_url=endpoints.get("entrez_base_url"),
            fulltext_cap=int(limits.get("fulltext_cap", 10_000)),
            rate_limit=float(limits.get("rate_limit", 3.0)),
            api_key=credentials.get("api_key"),
            email=credentials.get("email"),
            obo_resources=[_ref(r) for r in resources.get("obo") or []],
            mesh_xml=_ref(resources["mesh_xml"], "MeSH") if resources.get("mesh_xml") else None,
            drugbank_xml=_ref(resources["drugbank_xml"], "DrugBank") if resources.get("drugbank_xml") else None,
            semrep_files=[_resolve(p) for p in resources.get("semrep") or []],
            last_update_date=_parse_config_date(raw.get("last_update_date"), "last_update_date"),
            as_of_date=_parse_config_date(raw.get("as_of_date"), "as_of_date"),
            config_path=path,
            raw=raw,
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.fulltext_cap < 0:
            raise ConfigError("limits.fulltext_cap must be >= 0")
        if self.rate_limit <= 0:
            raise ConfigError("limits.rate_limit must be positive")
        missing = [
            str(p)
            for p in self.resource_paths()
            if not Path(p).exists()
        ]
        if missing:
            raise ConfigError("missing resource paths: " + ", ".join(missing))

    def resource_paths(self) -> list[Path]:
        paths = [self.conso, self.sty]
        paths.extend(r.path for r in self.obo_resources)
        if self.mesh_xml:
            paths.append(self.mesh_xml.path)
        if self.drugbank_xml:
            paths.append(self.drugbank_xml.path)
        paths.extend(self.semrep_files)
        return paths

    def harvest_config(self, date_floor: date | None = None) -> HarvestConfig:
        return HarvestConfig(
            disease_mesh_descriptor=self.mesh_descriptor,
            disease_mesh_ui=self.mesh_ui,
            date_floor=date_floor,
            fulltext_cap=self.fulltext_cap,
            rate_limit=self.rate_limit,
            api_key=self.api_key,
            email=self.email,
            entrez_base_url=self.entrez_base_url,
        )

    def config_hash(self) -> str:
        payload = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def store_last_update_date(self, new_date: date):
        """Rewrite the config file with an updated last_update_date."""
        if self.config_path is None:
            return
        self.raw["last_update_date"] = new_date.strftime(DATE_FORMAT)
        self.config_path.write_text(
            json.dumps(self.raw, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        self.last_update_date = new_date


def _hash_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    started_at: str = ""
    finished_at: str = ""
    mode: str = "full"
    config_hash: str = ""
    tool_version: str = __version__
    input_hashes: dict = field(default_factory=dict)
    stages: list[dict] = field(default_factory=list)
    graph: dict = field(default_factory=dict)
    failed_stage: str | None = None

    @property
    def graph_content_hash(self) -> str | None:
        return self.graph.get("content_hash")

    def to_json(self) -> dict:
        return {
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "mode": self.mode,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "input_hashes": self.input_hashes,
            "stages": self.stages,
            "graph": self.graph,
            "failed_stage": self.failed_stage,
        }

    def write(self, outdir: Path):
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / MANIFEST_NAME, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


class _StageRunner:
    def __init__(self, manifest: RunManifest, outdir: Path):
        self.manifest = manifest
        self.outdir = outdir

    def run(self, name: str, fn):
        logger.info("stage %s starting", name)
        started = time.monotonic()
        try:
            counts = fn() or {}
        except Exception as exc:
            self.manifest.stages.append(
                {"name": name, "status": "failed", "seconds": round(time.monotonic() - started, 3),
                 "error": str(exc)}
            )
            self.manifest.failed_stage = name
            self.manifest.finished_at = datetime.now(timezone.utc).isoformat()
            self.manifest.write(self.outdir)
            raise StageFailure(name, exc) from exc
        self.manifest.stages.append(
            {"name": name, "status": "ok", "seconds": round(time.monotonic() - started, 3),
             "counts": counts}
        )
        logger.info("stage %s done: %s", name, counts)
        return counts


def _structured_harvest(config: PipelineConfig, stage_dir: Path) -> tuple[list[Path], dict]:
    """Write one relation file per configured structured resource."""
    outputs: list[Path] = []
    counts: dict = {}
    for ref in config.obo_resources:
        terms = parse_obo(ref.path.read_text(encoding="utf-8"))
        relations = obo_to_relations(terms, ref.source)
        out = stage_dir / f"{ref.source}.relations.jsonl"
        write_relations(out, relations)
        outputs.append(out)
        counts[ref.source] = len(relations)
    if config.mesh_xml:
        obo_doc = mesh_xml_to_obo(config.mesh_xml.path.read_text(encoding="utf-8"))
        relations = obo_to_relations(parse_obo(obo_doc), config.mesh_xml.source)
        out = stage_dir / f"{config.mesh_xml.source}.relations.jsonl"
        write_relations(out, relations)
        outputs.append(out)
        counts[config.mesh_xml.source] = len(relations)
    if config.drugbank_xml:
        relations = parse_drugbank_interactions(
            config.drugbank_xml.path.read_text(encoding="utf-8"), config.drugbank_xml.source
        )
        out = stage_dir / f"{config.drugbank_xml.source}.relations.jsonl"
        write_relations(out, relations)
        outputs.append(out)
        counts[config.drugbank_xml.source] = len(relations)
    return outputs, counts


def _run(config: PipelineConfig, mode: str, date_floor: date | None) -> RunManifest:
    outdir = config.output_dir
    stage_dir = outdir / STAGE_DIR
    stage_dir.mkdir(parents=True, exist_ok=True)
    graph_dir = outdir / GRAPH_DIR

    manifest = RunManifest(
        started_at=datetime.now(timezone.utc).isoformat(),
        mode=mode,
        config_hash=config.config_hash(),
        input_hashes={str(p): _hash_file(p) for p in sorted(config.resource_paths())},
    )
    runner = _StageRunner(manifest, outdir)

    articles_path = stage_dir / "articles.jsonl"
    relation_files: list[Path] = []

    def harvest_stage():
        records, report = harvest_articles(config.harvest_config(date_floor))
        write_article_records(articles_path, records)
        return {"articles": len(records), **report.to_json()}

    def structured_stage():
        outputs, counts = _structured_harvest(config, stage_dir)
        relation_files.extend(outputs)
        return {"relations_per_source": counts, "total": sum(counts.values())}

    def analyze_stage():
        articles = list(read_article_records(articles_path))
        lexicon = Lexicon(load_mapping_table(config.conso, config.sty).term_to_cui)
        result = analyze_articles(
            articles,
            lexicon=lexicon,
            semrep_files=[str(p) for p in config.semrep_files],
        )
        out = stage_dir / "literature.relations.jsonl"
        write_relations(out, result.relations)
        relation_files.append(out)
        return {
            "relations": len(result.relations),
            "mentions": result.mention_count,
            "predications": result.predication_count,
            "semrep_dropped": result.semrep_dropped,
            "semrep_malformed": result.semrep_malformed,
        }

    def integrate_stage():
        table = load_mapping_table(config.conso, config.sty)
        records = [rel for path in relation_files for rel in read_relations(path)]
        integrated, unmapped = resolve_relations(records, table)
        write_relations(stage_dir / "integrated.relations.jsonl", integrated)
        write_unmapped_report(stage_dir / "unmapped-report.jsonl", unmapped)
        return {"input": len(records), "integrated": len(integrated), "unmapped": len(unmapped)}

    def build_stage():
        from .relations import read_integrated_relations

        relations = list(read_integrated_relations(stage_dir / "integrated.relations.jsonl"))
        articles = list(read_article_records(articles_path))
        if mode == "update":
            graph = store.load(graph_dir)
            stats = graph.merge_increment(relations, articles)
        else:
            graph, stats = store.build_graph(relations, articles)
        graph_manifest = store.snapshot(
            graph, graph_dir,
            config_hash=config.config_hash(),
            source_hashes=manifest.input_hashes,
        )
        manifest.graph = {
            "path": str(graph_dir),
            "content_hash": graph_manifest["content_hash"],
            **graph_manifest["counts"],
        }
        return {
            "nodes_added": stats.nodes_added,
            "edges_added": stats.edges_added,
            "provenance_appended": stats.provenance_appended,
            "duplicates_skipped": stats.duplicates_skipped,
        }

    runner.run("harvest-literature", harvest_stage)
    runner.run("harvest-structured", structured_stage)
    runner.run("analyze", analyze_stage)
    runner.run("integrate", integrate_stage)
    runner.run("merge" if mode == "update" else "build", build_stage)

    manifest.finished_at = datetime.now(timezone.utc).isoformat()
    manifest.write(outdir)
    return manifest


def run_full(config: PipelineConfig) -> RunManifest:
    """Execute every stage from harvest to graph build."""
    return _run(config, mode="full", date_floor=None)


def run_update(config: PipelineConfig) -> RunManifest:
    """Harvest only documents entered since the last update and merge them.

    Structured resources are re-harvested and re-merged; merging is
    idempotent so unchanged resources contribute nothing. On success the
    stored config's last_update_date advances to the run date.
    """
    graph_dir = config.output_dir / GRAPH_DIR
    if not (graph_dir / store.MANIFEST_FILE).exists():
        raise ConfigError(
            f"no graph found under {graph_dir}; run the full pipeline before updating"
        )
    if config.last_update_date is None:
        raise ConfigError("config has no last_update_date; run the full pipeline first")
    manifest = _run(config, mode="update", date_floor=config.last_update_date)
    config.store_last_update_date(config.as_of_date or date.today())
    return manifest
