"""End-to-end corpus pipeline: raw dumps in, database and benchmarks out.

The pipeline is a fixed chain of seven stages, each reading files written
by the previous one and writing its own outputs plus a ``manifest.json``.
A stage manifest records the hash of everything the stage depended on, so
a rerun can prove a stage is already up to date and skip it. Nothing in
any output carries a timestamp; two runs over the same corpus with the
same settings are byte-identical.

Expected corpus layout::

    corpus_dir/
      registry/<SOURCE>.json   JSON array of raw rows, filename = source tag
      ctgov/<nctid>.json       one registry document per trial
      pubmed/articles.json     JSON array of {pmid, title, abstract, ...}
      reviews/index.json       JSON array of review metadata dicts
      reviews/<pmid>.xml       full-text reference sections (JATS-style)
      protocols/pairs.json     JSON array of protocol/registry pairs
      replay/                  default replay store (override with replay_dir)

Every subdirectory is optional; missing ones simply contribute nothing.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Optional

from . import store
from .benchgen import (
    DESIGN_FIELDS,
    gen_completion_items,
    gen_design_mcq,
    gen_evidence_mcq,
    gen_sample_size_items,
    gen_screening_items,
    gen_search_items,
    numeric_id_key,
    split_by_numeric_id,
    split_search_items,
    write_benchmark_files,
)
from .clients import (
    MODES,
    ReplayStore,
    ServiceClient,
    annotator_callable,
    llm_callable,
    rxnorm_callable,
)
from .config import ForgeConfig
from .dedupe import dedupe_corpus
from .errors import ForgeError, MissingResultsSection
from .evidence import (
    AdverseEventRow,
    DispositionRow,
    OutcomeLabel,
    TrialResultRow,
    build_disposition,
    classify_completed_outcome,
    disposition_tables_from_ctgov,
    extract_pubmed_pico,
    label_terminated_study,
    parse_adverse_events,
    parse_ctgov_results,
    pico_disposition_rows,
    primary_pvalues,
)
from .ingest import extract_pubmed_study, parse_ctgov_study, parse_registry_record
from .ontology.biomarkers import load_biomarker_index, match_biomarker
from .ontology.conditions import annotate_conditions
from .ontology.drugs import link_drug, load_drug_resources
from .ontology.endpoints import classify_endpoint
from .ontology.meddra import load_meddra
from .relations import (
    assemble_graph,
    extract_nct_links,
    extract_review_references,
    write_relation_counts_tsv,
    write_relations_tsv,
)
from .schema import (
    CanonicalStudy,
    RelationTriple,
    Source,
    StudyStatus,
    read_studies_jsonl,
    write_studies_jsonl,
)

logger = logging.getLogger(__name__)

STAGES = ("ingest", "dedupe", "link", "extract", "graph", "database", "benchmarks")

STAGE_DIRS = {
    "ingest": "01_ingest",
    "dedupe": "02_dedupe",
    "link": "03_link",
    "extract": "04_extract",
    "graph": "05_graph",
    "database": "06_database",
    "benchmarks": "07_benchmarks",
}

# Longest biomarker name in the vocabulary is five tokens; six gives headroom.
_BIOMARKER_MAX_TOKENS = 6


@dataclass(frozen=True)
class PipelineSettings:
    """Everything a run depends on besides the corpus bytes themselves.

    ``workers`` bounds parallelism in the pure parsing loops and is
    deliberately left out of the fingerprint: it must never change what
    gets written, only how fast. Client-facing loops always run
    sequentially so the replay store sees one writer.
    """

    corpus_dir: Path
    out_dir: Path
    seed: int = 7
    dedupe_threshold: float = 0.95
    mode: str = "replay"
    replay_dir: Optional[Path] = None
    awaiting: str = "emit"
    allow_small_split: bool = False
    split_test_size: int = 1000
    split_validation_size: int = 500
    search_test_size: int = 100
    workers: int = 1
    vocab_dir: Optional[Path] = None
    mapping_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def from_config(cls, config: ForgeConfig) -> "PipelineSettings":
        corpus_dir = config.get_path("corpus_dir")
        out_dir = config.get_path("out_dir")
        if corpus_dir is None or out_dir is None:
            raise ValueError("config needs corpus_dir and out_dir")
        return cls(
            corpus_dir=corpus_dir,
            out_dir=out_dir,
            seed=config.get_int("seed", 7),
            dedupe_threshold=config.get_float("dedupe_threshold", 0.95),
            mode=config.get("mode", "replay"),
            replay_dir=config.get_path("replay_dir"),
            awaiting=config.get("awaiting", "emit"),
            allow_small_split=config.get_bool("allow_small_split", False),
            split_test_size=config.get_int("split_test_size", 1000),
            split_validation_size=config.get_int("split_validation_size", 500),
            search_test_size=config.get_int("search_test_size", 100),
            workers=config.get_int("workers", 1),
            vocab_dir=config.get_path("vocab_dir"),
            mapping_dir=config.get_path("mapping_dir"),
        )

    def fingerprint(self) -> dict:
        return {
            "seed": self.seed,
            "dedupe_threshold": self.dedupe_threshold,
            "mode": self.mode,
            "awaiting": self.awaiting,
            "allow_small_split": self.allow_small_split,
            "split_test_size": self.split_test_size,
            "split_validation_size": self.split_validation_size,
            "search_test_size": self.search_test_size,
        }

    @property
    def replay_root(self) -> Path:
        return self.replay_dir if self.replay_dir is not None else self.corpus_dir / "replay"


@dataclass
class _Clients:
    llm: Callable[[str], str]
    annotator: Callable[[dict], dict]
    rxnorm: Callable[[dict], dict]
    raw: dict = field(default_factory=dict)

    def live_calls(self) -> dict:
        return {name: client.live_calls for name, client in self.raw.items()}


def build_clients(settings: PipelineSettings, transports: Optional[dict] = None) -> _Clients:
    """One replay-backed client per external service.

    ``transports`` maps service names to live callables and only matters
    in record mode; replay and offline runs never touch them.
    """
    transports = transports or {}
    root = settings.replay_root
    clients = {
        name: ServiceClient(settings.mode, ReplayStore(root), transport=transports.get(name))
        for name in ("llm", "annotator", "rxnorm")
    }
    return _Clients(
        llm=llm_callable(clients["llm"]),
        annotator=annotator_callable(clients["annotator"]),
        rxnorm=rxnorm_callable(clients["rxnorm"]),
        raw=clients,
    )


# ---------------------------------------------------------------------------
# hashing and manifests


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def hash_corpus(corpus_dir: Path) -> str:
    """Order-independent digest of every file under the corpus root."""
    digest = hashlib.sha256()
    for path in sorted(corpus_dir.rglob("*")):
        if not path.is_file():
            continue
        rel = path.relative_to(corpus_dir).as_posix()
        digest.update(rel.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(_sha256_file(path).encode("ascii"))
        digest.update(b"\x00")
    return digest.hexdigest()


def _hash_outputs(stage_dir: Path) -> dict:
    outputs = {}
    for path in sorted(stage_dir.rglob("*")):
        if not path.is_file() or path.name == "manifest.json":
            continue
        outputs[path.relative_to(stage_dir).as_posix()] = _sha256_file(path)
    return outputs


def _load_manifest(path: Path) -> Optional[dict]:
    if not path.is_file():
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError):
        return None


def _outputs_intact(stage_dir: Path, manifest: dict) -> bool:
    recorded = manifest.get("outputs")
    if not isinstance(recorded, dict):
        return False
    for rel, expected in recorded.items():
        path = stage_dir / rel
        if not path.is_file() or _sha256_file(path) != expected:
            return False
    return True


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _write_rows_jsonl(path: Path, rows: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
            count += 1
    return count


def _read_rows_jsonl(path: Path) -> list[dict]:
    if not path.is_file():
        return []
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _map_ordered(fn: Callable, items: list, workers: int) -> list:
    """Apply ``fn`` preserving input order; threads only when asked for."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# corpus readers


def _corpus_registry_batches(corpus_dir: Path) -> list[tuple[str, list[dict]]]:
    registry_dir = corpus_dir / "registry"
    if not registry_dir.is_dir():
        return []
    batches = []
    for path in sorted(registry_dir.glob("*.json")):
        rows = json.loads(path.read_text(encoding="utf-8"))
        batches.append((path.stem, rows))
    return batches


def _corpus_ctgov_docs(corpus_dir: Path) -> dict[str, dict]:
    ctgov_dir = corpus_dir / "ctgov"
    docs = {}
    if not ctgov_dir.is_dir():
        return docs
    for path in sorted(ctgov_dir.glob("*.json")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        nct_id = str(doc.get("nctId", "")).strip()
        if nct_id:
            docs[nct_id] = doc
    return docs


def _corpus_pubmed_articles(corpus_dir: Path) -> list[dict]:
    path = corpus_dir / "pubmed" / "articles.json"
    if not path.is_file():
        return []
    articles = json.loads(path.read_text(encoding="utf-8"))
    return sorted(articles, key=lambda a: str(a.get("pmid", "")))


def _corpus_reviews(corpus_dir: Path) -> list[dict]:
    path = corpus_dir / "reviews" / "index.json"
    if not path.is_file():
        return []
    reviews = json.loads(path.read_text(encoding="utf-8"))
    return sorted(reviews, key=lambda r: str(r.get("pmid", "")))


def _corpus_review_xmls(corpus_dir: Path) -> list[tuple[str, str]]:
    reviews_dir = corpus_dir / "reviews"
    if not reviews_dir.is_dir():
        return []
    return [
        (path.stem, path.read_text(encoding="utf-8"))
        for path in sorted(reviews_dir.glob("*.xml"))
    ]


def _corpus_protocol_pairs(corpus_dir: Path) -> list[dict]:
    path = corpus_dir / "protocols" / "pairs.json"
    if not path.is_file():
        return []
    pairs = json.loads(path.read_text(encoding="utf-8"))
    return sorted(pairs, key=lambda p: str(p.get("nct_id", "")))


# ---------------------------------------------------------------------------
# stages


def _stage_ingest(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    studies: list[CanonicalStudy] = []
    counts = {"registry": 0, "ctgov": 0, "pubmed": 0}

    for source_tag, rows in _corpus_registry_batches(settings.corpus_dir):
        mapping_dir = settings.mapping_dir
        for raw in rows:
            studies.append(parse_registry_record(raw, source_tag, mapping_dir=mapping_dir))
            counts["registry"] += 1

    docs = _corpus_ctgov_docs(settings.corpus_dir)
    for nct_id in sorted(docs):
        studies.append(parse_ctgov_study(docs[nct_id]))
        counts["ctgov"] += 1

    for record in _corpus_pubmed_articles(settings.corpus_dir):
        studies.append(extract_pubmed_study(record))
        counts["pubmed"] += 1

    studies.sort(key=lambda s: (s.source.value, s.study_id))
    write_studies_jsonl(studies, out / "studies.jsonl")
    counts["total"] = len(studies)
    counts["flagged"] = sum(1 for s in studies if s.flagged)
    return counts


def _stage_dedupe(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    records = read_studies_jsonl(settings.out_dir / STAGE_DIRS["ingest"] / "studies.jsonl")
    merged, decisions, triples = dedupe_corpus(records, threshold=settings.dedupe_threshold)
    write_studies_jsonl(merged, out / "studies.jsonl")

    with open(out / "decisions.tsv", "w", encoding="utf-8") as fh:
        fh.write("survivor_source\tsurvivor_id\tabsorbed\tevidence\tscore\n")
        for decision in decisions:
            fh.write("\t".join(decision.to_row()) + "\n")

    _write_rows_jsonl(out / "dup_links.jsonl", [store.relation_row(t) for t in triples])
    return {
        "input": len(records),
        "output": len(merged),
        "absorbed": len(records) - len(merged),
        "links": len(triples),
    }


def _merged_studies(settings: PipelineSettings) -> list[CanonicalStudy]:
    return read_studies_jsonl(settings.out_dir / STAGE_DIRS["dedupe"] / "studies.jsonl")


def _alias_map(settings: PipelineSettings) -> dict[str, str]:
    """Absorbed study id to surviving study id, from the dedupe audit."""
    path = settings.out_dir / STAGE_DIRS["dedupe"] / "decisions.tsv"
    aliases: dict[str, str] = {}
    if not path.is_file():
        return aliases
    with open(path, encoding="utf-8") as fh:
        next(fh, None)
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            if len(cells) < 4 or not cells[2]:
                continue
            survivor_id = cells[1]
            for chunk in cells[2].split(";"):
                _, _, absorbed_id = chunk.partition(":")
                if absorbed_id and absorbed_id != survivor_id:
                    aliases[absorbed_id] = survivor_id
    return aliases


class _DocIndex:
    """Corpus registry documents, reachable through surviving study ids.

    A merged study can absorb the record that carried the document id
    (the surviving id is lexicographic, not source-ranked), so lookups
    follow the dedupe aliases in both directions.
    """

    def __init__(self, docs: dict[str, dict], aliases: dict[str, str]) -> None:
        self.docs = docs
        self.by_survivor: dict[str, str] = {}
        for doc_id in sorted(docs):
            survivor = aliases.get(doc_id, doc_id)
            self.by_survivor.setdefault(survivor, doc_id)
        self.absorbed: dict[str, list[str]] = {}
        for absorbed_id, survivor in aliases.items():
            self.absorbed.setdefault(survivor, []).append(absorbed_id)

    def doc_for(self, study_id: str) -> Optional[dict]:
        doc_id = self.by_survivor.get(study_id)
        return self.docs.get(doc_id) if doc_id else None

    def all_ids(self, study_id: str) -> list[str]:
        return [study_id] + sorted(self.absorbed.get(study_id, []))


def _candidate_spans(text: str) -> list[str]:
    tokens = text.split()
    spans = []
    for width in range(1, _BIOMARKER_MAX_TOKENS + 1):
        for start in range(len(tokens) - width + 1):
            spans.append(" ".join(tokens[start : start + width]))
    return spans


def _stage_link(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    studies = _merged_studies(settings)
    index = _DocIndex(_corpus_ctgov_docs(settings.corpus_dir), _alias_map(settings))

    resources = load_drug_resources(settings.vocab_dir)
    drug_rows: list[dict] = []
    seen_drugs: set[tuple[str, str]] = set()
    linked: dict[str, object] = {}
    for study in sorted(studies, key=lambda s: s.study_id):
        doc = index.doc_for(study.study_id)
        if doc is None:
            continue
        module = (doc.get("protocolSection") or {}).get("armsInterventionsModule") or {}
        for intervention in module.get("interventions") or []:
            if str(intervention.get("type", "")).upper() != "DRUG":
                continue
            name = str(intervention.get("name") or "").strip()
            if not name or (study.study_id, name) in seen_drugs:
                continue
            seen_drugs.add((study.study_id, name))
            if name not in linked:
                linked[name] = link_drug(name, resources, remote_client=clients.rxnorm)
            drug_rows.append(store.drug_row(study.study_id, linked[name]))

    condition_rows: list[dict] = []
    for study in studies:
        for annotation in annotate_conditions(study, clients.annotator):
            condition_rows.append(store.condition_row(annotation))

    endpoint_rows: list[dict] = []
    classified: dict[str, list] = {}
    for study in studies:
        for text in (*study.primary_outcomes, *study.secondary_outcomes):
            text = text.strip()
            if not text:
                continue
            if text not in classified:
                classified[text] = classify_endpoint(text, clients.llm)
            for classification in classified[text]:
                endpoint_rows.append(store.endpoint_row(study.study_id, classification))

    bio_index = load_biomarker_index(settings.vocab_dir)
    biomarker_rows: list[dict] = []
    seen_marks: set[tuple[str, str, str]] = set()
    for study in studies:
        for text in (*study.primary_outcomes, *study.secondary_outcomes):
            for span in _candidate_spans(text):
                match = match_biomarker(span, bio_index)
                if match is None:
                    continue
                key = (study.study_id, match.span, match.biomarker_name)
                if key in seen_marks:
                    continue
                seen_marks.add(key)
                biomarker_rows.append(store.biomarker_row(study.study_id, match))

    counts = {}
    for name, rows in (
        ("conditions", condition_rows),
        ("drugs", drug_rows),
        ("endpoints", endpoint_rows),
        ("biomarkers", biomarker_rows),
    ):
        rows.sort(key=lambda row: json.dumps(row, sort_keys=True))
        counts[name] = _write_rows_jsonl(out / f"{name}.jsonl", rows)
    return counts


def _stage_extract(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    studies = _merged_studies(settings)
    surviving = {s.study_id for s in studies}
    aliases = _alias_map(settings)
    index = _DocIndex(_corpus_ctgov_docs(settings.corpus_dir), aliases)
    articles = _corpus_pubmed_articles(settings.corpus_dir)
    hierarchy = load_meddra(settings.vocab_dir)

    # (surviving id, document) pairs; rows parsed out of a document get
    # re-keyed when the document id was absorbed during dedupe.
    live_docs = []
    for study_id in sorted(surviving):
        doc = index.doc_for(study_id)
        if doc is not None:
            live_docs.append((study_id, doc))

    def rekey(study_id: str, rows: list) -> list:
        return [
            row if row.study_id == study_id else replace(row, study_id=study_id)
            for row in rows
        ]

    result_rows: list[TrialResultRow] = []
    skipped_no_results = 0
    for study_id, doc in live_docs:
        try:
            result_rows.extend(rekey(study_id, parse_ctgov_results(doc)))
        except MissingResultsSection:
            skipped_no_results += 1

    ae_batches = _map_ordered(
        lambda pair: rekey(pair[0], parse_adverse_events(pair[1], hierarchy)),
        live_docs,
        settings.workers,
    )
    ae_rows: list[AdverseEventRow] = [row for batch in ae_batches for row in batch]

    disposition_rows: list[DispositionRow] = []
    for study_id, doc in live_docs:
        groups, interventions, links = disposition_tables_from_ctgov(doc)
        disposition_rows.extend(rekey(study_id, build_disposition(groups, interventions, links)))

    # PICO results for linked abstracts, re-keyed to the surviving study id.
    pico_count = 0
    for article in articles:
        pmid = str(article.get("pmid", "")).strip()
        title = str(article.get("title") or "").strip()
        abstract = str(article.get("abstract") or "").strip()
        if not pmid or not title or not abstract:
            continue
        study_id = aliases.get(pmid, pmid)
        if study_id not in surviving:
            logger.info("skip PICO for %s: no surviving study", pmid)
            continue
        pico_rows = extract_pubmed_pico(study_id, title, abstract, clients.llm)
        result_rows.extend(pico_rows)
        disposition_rows.extend(pico_disposition_rows(study_id, pico_rows))
        pico_count += len(pico_rows)

    # Outcome labels for every completed or terminated study.
    nct_abstracts: dict[str, list[dict]] = {}
    for article in articles:
        for triple in extract_nct_links(article):
            if triple.tail_source is Source.CTGOV:
                nct_abstracts.setdefault(triple.tail_id, []).append(article)

    labels: list[OutcomeLabel] = []
    for study in sorted(studies, key=lambda s: s.study_id):
        doc = index.doc_for(study.study_id)
        if study.status is StudyStatus.COMPLETED:
            pvalues: list[float] = []
            if doc is not None:
                try:
                    pvalues = primary_pvalues(doc)
                except MissingResultsSection:
                    pvalues = []
            linked = []
            seen_pmids: set[str] = set()
            for alias in index.all_ids(study.study_id):
                for article in nct_abstracts.get(alias, []):
                    pmid = str(article.get("pmid", ""))
                    if pmid not in seen_pmids:
                        seen_pmids.add(pmid)
                        linked.append(article)
            labels.append(classify_completed_outcome(study, linked, clients.llm, pvalues))
        elif study.status is StudyStatus.TERMINATED:
            status_module = {}
            if doc is not None:
                status_module = (doc.get("protocolSection") or {}).get("statusModule") or {}
            stop_reason = str(status_module.get("whyStopped") or "")
            labels.append(label_terminated_study(study, stop_reason))

    tables = {
        "trial_results": [store.trial_result_row(r) for r in result_rows],
        "adverse_events": [store.adverse_event_row(r) for r in ae_rows],
        "disposition": [store.disposition_row(r) for r in disposition_rows],
        "trial_outcomes": [store.trial_outcome_row(label) for label in labels],
    }
    counts = {"skipped_no_results": skipped_no_results, "pico_rows": pico_count}
    for name, rows in tables.items():
        rows.sort(key=lambda row: json.dumps(row, sort_keys=True))
        counts[name] = _write_rows_jsonl(out / f"{name}.jsonl", rows)
    return counts


def _stage_graph(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    triples: list[RelationTriple] = []
    review_ids: set[str] = set()

    for pmid, xml_text in _corpus_review_xmls(settings.corpus_dir):
        review_ids.add(pmid)
        triples.extend(extract_review_references(pmid, xml_text, awaiting=settings.awaiting))
    for review in _corpus_reviews(settings.corpus_dir):
        review_ids.add(str(review.get("pmid", "")))

    for article in _corpus_pubmed_articles(settings.corpus_dir):
        triples.extend(extract_nct_links(article))

    for row in _read_rows_jsonl(settings.out_dir / STAGE_DIRS["dedupe"] / "dup_links.jsonl"):
        triples.append(
            RelationTriple(
                head_id=row["head_id"],
                relation_type=row["relation_type"],
                tail_id=row["tail_id"],
                head_source=Source(row["head_source"]),
                tail_source=Source(row["tail_source"]),
            )
        )

    graph = assemble_graph(triples, review_ids=review_ids)
    for head in graph.dangling_heads:
        logger.warning("relation head %s is not a known review", head)

    _write_rows_jsonl(out / "relations.jsonl", [store.relation_row(t) for t in graph.triples])
    write_relations_tsv(graph, out / "relations.tsv")
    write_relation_counts_tsv(graph, out / "relation_counts.tsv")
    return {
        "triples": len(graph),
        "dangling_heads": len(graph.dangling_heads),
        "types": {k: v for k, v in sorted(graph.type_counts.items())},
    }


def _stage_database(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    studies = _merged_studies(settings)
    link_dir = settings.out_dir / STAGE_DIRS["link"]
    extract_dir = settings.out_dir / STAGE_DIRS["extract"]
    graph_dir = settings.out_dir / STAGE_DIRS["graph"]

    tables = {
        "studies": [store.study_row(s) for s in studies],
        "conditions": _read_rows_jsonl(link_dir / "conditions.jsonl"),
        "drugs": _read_rows_jsonl(link_dir / "drugs.jsonl"),
        "disposition": _read_rows_jsonl(extract_dir / "disposition.jsonl"),
        "adverse_events": _read_rows_jsonl(extract_dir / "adverse_events.jsonl"),
        "trial_results": _read_rows_jsonl(extract_dir / "trial_results.jsonl"),
        "trial_outcomes": _read_rows_jsonl(extract_dir / "trial_outcomes.jsonl"),
        "endpoints": _read_rows_jsonl(link_dir / "endpoints.jsonl"),
        "biomarkers": _read_rows_jsonl(link_dir / "biomarkers.jsonl"),
        "relations": _read_rows_jsonl(graph_dir / "relations.jsonl"),
    }
    bundle = store.write_database(tables, out / "db")
    return {name: len(rows) for name, rows in tables.items()} | {
        "bundle_hash": bundle.bundle_hash
    }


def _stage_benchmarks(settings: PipelineSettings, clients: _Clients, out: Path) -> dict:
    studies = _merged_studies(settings)
    docs = _corpus_ctgov_docs(settings.corpus_dir)
    index = _DocIndex(docs, _alias_map(settings))
    reviews = _corpus_reviews(settings.corpus_dir)
    articles = _corpus_pubmed_articles(settings.corpus_dir)
    relation_rows = _read_rows_jsonl(settings.out_dir / STAGE_DIRS["graph"] / "relations.jsonl")
    triples = [
        RelationTriple(
            head_id=row["head_id"],
            relation_type=row["relation_type"],
            tail_id=row["tail_id"],
            head_source=Source(row["head_source"]),
            tail_source=Source(row["tail_source"]),
        )
        for row in relation_rows
    ]

    review_pmids = {str(r.get("pmid", "")) for r in reviews}
    review_groups: dict[str, list[str]] = {}
    for triple in triples:
        if triple.head_id in review_pmids and triple.tail_source is Source.CTGOV:
            group = review_groups.setdefault(triple.head_id, [])
            if triple.tail_id not in group:
                group.append(triple.tail_id)

    items = []
    for field_name in DESIGN_FIELDS:
        items.extend(gen_design_mcq(review_groups, docs, field_name, settings.seed))

    items.extend(gen_sample_size_items(_corpus_protocol_pairs(settings.corpus_dir), clients.llm))

    outcome_rows = _read_rows_jsonl(settings.out_dir / STAGE_DIRS["extract"] / "trial_outcomes.jsonl")
    outcomes = {
        row["study_id"]: OutcomeLabel(row["study_id"], row["outcome_type"], row["evidence"])
        for row in outcome_rows
    }
    completion_trials = []
    for study in sorted(studies, key=lambda s: s.study_id):
        doc = index.doc_for(study.study_id)
        if doc is not None:
            completion_trials.append((study, doc))
    items.extend(gen_completion_items(completion_trials, outcomes))

    search_items = gen_search_items(reviews, triples)
    items.extend(search_items)

    titles = {
        str(a.get("pmid", "")): str(a.get("title") or "") for a in articles
    }
    items.extend(gen_screening_items(reviews, triples, titles, settings.seed))

    include_map: dict[str, list[str]] = {}
    for triple in triples:
        if triple.relation_type == "include" and triple.tail_source is Source.PUBMED:
            include_map.setdefault(triple.head_id, []).append(triple.tail_id)
    evidence_reviews = [
        {
            "pmid": str(review["pmid"]),
            "review_text": str(review.get("review_text") or ""),
            "included_pmids": sorted(include_map.get(str(review["pmid"]), [])),
        }
        for review in reviews
        if str(review.get("review_text") or "").strip()
    ]
    items.extend(gen_evidence_mcq(evidence_reviews, clients.llm))

    assignments: dict[str, str] = {}
    recency_keys = {
        "arm_design": lambda item: item.provenance["trial_id"],
        "eligibility_design": lambda item: item.provenance["trial_id"],
        "endpoint_design": lambda item: item.provenance["trial_id"],
        "sample_size": lambda item: item.provenance["nct_id"],
        "completion": lambda item: item.provenance["study_id"],
        "study_screening": lambda item: item.provenance["review_pmid"],
        "evidence_summary": lambda item: item.provenance["review_pmid"],
    }
    by_task: dict[str, list] = {}
    for item in items:
        by_task.setdefault(item.task, []).append(item)
    for task, task_items in sorted(by_task.items()):
        if task == "study_search":
            for assignment in split_search_items(task_items, settings.search_test_size):
                assignments[assignment.item_id] = assignment.split
            continue
        extractor = recency_keys[task]
        keyed = sorted(task_items, key=lambda item: item.item_id)
        for assignment, item in zip(
            split_by_numeric_id(
                keyed,
                id_extractor=extractor,
                test_size=settings.split_test_size,
                validation_size=settings.split_validation_size,
                allow_small=settings.allow_small_split,
            ),
            keyed,
        ):
            assignments[item.item_id] = assignment.split

    corpus_hash = hash_corpus(settings.corpus_dir)
    write_benchmark_files(items, assignments, out, corpus_hash, settings.seed)

    counts = {task: len(task_items) for task, task_items in sorted(by_task.items())}
    counts["total"] = len(items)
    return counts


_STAGE_FUNCS = {
    "ingest": _stage_ingest,
    "dedupe": _stage_dedupe,
    "link": _stage_link,
    "extract": _stage_extract,
    "graph": _stage_graph,
    "database": _stage_database,
    "benchmarks": _stage_benchmarks,
}


def run_pipeline(
    settings: PipelineSettings | ForgeConfig,
    transports: Optional[dict] = None,
    stages: Optional[Iterable[str]] = None,
) -> dict:
    """Run the stage chain, skipping stages whose manifests still match.

    ``stages`` restricts the run to a prefix-closed subset (unknown names
    are an error); dependencies must already be materialized or the run
    fails when a stage reads missing inputs. Returns a summary dict with
    per-stage counts and the chained pipeline hash, also written to
    ``out_dir/pipeline_manifest.json``.
    """
    if isinstance(settings, ForgeConfig):
        settings = PipelineSettings.from_config(settings)
    wanted = tuple(stages) if stages is not None else STAGES
    unknown = [name for name in wanted if name not in STAGES]
    if unknown:
        raise ValueError(f"unknown stages {unknown}")

    settings.out_dir.mkdir(parents=True, exist_ok=True)
    corpus_hash = hash_corpus(settings.corpus_dir)
    config_hash = _sha256_text(json.dumps(settings.fingerprint(), sort_keys=True))
    clients = build_clients(settings, transports)

    upstream = ""
    summary: dict = {"corpus_hash": corpus_hash, "config_hash": config_hash, "stages": {}}
    for name in STAGES:
        stage_dir = settings.out_dir / STAGE_DIRS[name]
        manifest_path = stage_dir / "manifest.json"
        input_hash = _sha256_text(f"{corpus_hash}:{config_hash}:{upstream}")

        if name not in wanted:
            existing = _load_manifest(manifest_path)
            if existing is not None:
                upstream = _sha256_file(manifest_path)
            continue

        existing = _load_manifest(manifest_path)
        if (
            existing is not None
            and existing.get("input_hash") == input_hash
            and _outputs_intact(stage_dir, existing)
        ):
            logger.info("stage %s: up to date", name)
            record = existing
            record["skipped"] = True
        else:
            if stage_dir.exists():
                shutil.rmtree(stage_dir)
            stage_dir.mkdir(parents=True)
            logger.info("stage %s: running", name)
            try:
                counts = _STAGE_FUNCS[name](settings, clients, stage_dir)
            except ForgeError as exc:
                exc.args = (f"stage {name}: {exc}",)
                raise
            record = {
                "stage": name,
                "input_hash": input_hash,
                "counts": counts,
                "outputs": _hash_outputs(stage_dir),
            }
            _write_json(manifest_path, record)
            record = dict(record)
            record["skipped"] = False
        summary["stages"][name] = {
            "counts": record.get("counts", {}),
            "skipped": record["skipped"],
        }
        upstream = _sha256_file(manifest_path)

    summary["pipeline_hash"] = upstream
    summary["live_calls"] = clients.live_calls()
    if wanted == STAGES:
        _write_json(settings.out_dir / "pipeline_manifest.json", {
            "corpus_hash": corpus_hash,
            "config_hash": config_hash,
            "pipeline_hash": upstream,
        })
    return summary
