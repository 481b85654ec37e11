"""Ten-table TSV database with a manifest.

Tables are written with a header row, cells escaped so tabs and
newlines survive the round trip, and rows sorted by primary key, which
makes two runs over the same input byte-identical. The manifest
(row counts plus a sha256 per file and for the bundle) is written last
so a torn run never leaves a manifest pointing at missing files.

The store deals in string-valued dicts only; the ``*_row`` builders
below turn domain objects into table rows.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ForeignKeyViolation
from .evidence import AdverseEventRow, DispositionRow, OutcomeLabel, TrialResultRow
from .ontology.biomarkers import BiomarkerMatch
from .ontology.conditions import ConditionAnnotation
from .ontology.drugs import DrugEntry
from .ontology.endpoints import EndpointClassification
from .schema import CanonicalStudy, RelationTriple

TABLE_COLUMNS = {
    "studies": (
        "study_id",
        "source",
        "title",
        "brief_summary",
        "study_type",
        "sponsor",
        "start_year",
        "phases",
        "gender",
        "min_age",
        "max_age",
        "healthy_volunteers",
        "status",
        "target_accrual",
        "actual_accrual",
        "results_text",
        "flagged",
    ),
    "conditions": ("study_id", "mesh_id", "mesh_term", "mesh_type"),
    "drugs": (
        "study_id",
        "raw_name",
        "cleaned_name",
        "rxcui",
        "rxnorm_method",
        "drugbank_id",
        "drugbank_method",
        "approved_fda",
        "approved_ema",
        "approved_pmda",
    ),
    "disposition": (
        "study_id",
        "design_group_id",
        "group_type",
        "intervention_id",
        "intervention_type",
        "treatment_name",
        "description",
    ),
    "adverse_events": (
        "study_id",
        "arm_description",
        "term",
        "organ_system",
        "num_affected",
        "num_at_risk",
        "is_serious",
        "description",
        "meddra_code",
    ),
    "trial_results": (
        "study_id",
        "population_text",
        "population_n",
        "arm_label",
        "is_control",
        "outcome_text",
    ),
    "trial_outcomes": ("study_id", "outcome_type", "evidence"),
    "endpoints": ("study_id", "outcome_text", "domain", "subdomain"),
    "biomarkers": (
        "study_id",
        "span",
        "biomarker_name",
        "biomarker_class",
        "biomarker_type",
        "biomarker_genes",
        "match_type",
    ),
    "relations": ("head_id", "relation_type", "tail_id", "head_source", "tail_source"),
}

TABLE_ORDER = tuple(TABLE_COLUMNS)

#: Sort / uniqueness key per table.
TABLE_KEYS = {
    "studies": ("study_id",),
    "conditions": ("study_id", "mesh_id", "mesh_type"),
    "drugs": ("study_id", "raw_name"),
    "disposition": ("study_id", "design_group_id", "intervention_id"),
    "adverse_events": ("study_id", "arm_description", "term", "is_serious"),
    "trial_results": ("study_id", "arm_label", "outcome_text"),
    "trial_outcomes": ("study_id",),
    "endpoints": ("study_id", "outcome_text", "domain", "subdomain"),
    "biomarkers": ("study_id", "span", "biomarker_name"),
    "relations": ("head_id", "relation_type", "tail_id"),
}

#: Child tables whose study_id must exist in the studies table.
FK_TABLES = (
    "conditions",
    "drugs",
    "disposition",
    "adverse_events",
    "trial_results",
    "trial_outcomes",
    "endpoints",
    "biomarkers",
)

MANIFEST_NAME = "manifest.tsv"

_UNESCAPE_RE = re.compile(r"\\[\\tnr]")
_UNESCAPE_MAP = {"\\\\": "\\", "\\t": "\t", "\\n": "\n", "\\r": "\r"}


def escape_cell(value: str) -> str:
    return (
        value.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def unescape_cell(value: str) -> str:
    return _UNESCAPE_RE.sub(lambda match: _UNESCAPE_MAP[match.group(0)], value)


def _bool_cell(value: bool) -> str:
    return "true" if value else "false"


def _opt_cell(value) -> str:
    return "" if value is None else str(value)


@dataclass(frozen=True)
class DatabaseBundle:
    out_dir: Path
    counts: dict[str, int]
    file_hashes: dict[str, str]
    bundle_hash: str


def _validate_tables(tables: dict) -> dict[str, list[dict]]:
    for name in tables:
        if name not in TABLE_COLUMNS:
            raise ValueError(f"unknown table {name!r}; expected one of {TABLE_ORDER}")
    full = {name: list(tables.get(name, [])) for name in TABLE_ORDER}
    for name, rows in full.items():
        columns = TABLE_COLUMNS[name]
        for row in rows:
            if set(row) != set(columns):
                missing = set(columns) - set(row)
                extra = set(row) - set(columns)
                raise ValueError(
                    f"table {name}: bad row shape (missing {sorted(missing)}, extra {sorted(extra)})"
                )
            for column, cell in row.items():
                if not isinstance(cell, str):
                    raise TypeError(
                        f"table {name}: cell {column} must be str, got {type(cell).__name__}"
                    )
    return full


def _check_foreign_keys(full: dict[str, list[dict]]) -> None:
    study_ids = {row["study_id"] for row in full["studies"]}
    broken: list[str] = []
    for name in FK_TABLES:
        for row in full[name]:
            if row["study_id"] not in study_ids:
                broken.append(f"{name}:{row['study_id']}")
    if broken:
        shown = ", ".join(broken[:10])
        more = f" (+{len(broken) - 10} more)" if len(broken) > 10 else ""
        raise ForeignKeyViolation(f"unresolved study ids: {shown}{more}")


def _check_unique_keys(full: dict[str, list[dict]]) -> None:
    for name, rows in full.items():
        key_columns = TABLE_KEYS[name]
        seen = set()
        for row in rows:
            key = tuple(row[column] for column in key_columns)
            if key in seen:
                raise ValueError(f"table {name}: duplicate key {key}")
            seen.add(key)


def write_database(tables: dict, out_dir: str | Path) -> DatabaseBundle:
    """Validate, then write all ten tables plus the manifest.

    Validation (column shapes, string cells, unique keys, foreign keys)
    happens before the first byte is written, so a failure leaves the
    output directory untouched.
    """
    full = _validate_tables(tables)
    _check_unique_keys(full)
    _check_foreign_keys(full)

    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)

    counts: dict[str, int] = {}
    file_hashes: dict[str, str] = {}
    for name in TABLE_ORDER:
        columns = TABLE_COLUMNS[name]
        key_columns = TABLE_KEYS[name]
        rows = sorted(full[name], key=lambda row: tuple(row[c] for c in key_columns))
        lines = ["\t".join(columns)]
        for row in rows:
            lines.append("\t".join(escape_cell(row[column]) for column in columns))
        payload = ("\n".join(lines) + "\n").encode("utf-8")
        (out_path / f"{name}.tsv").write_bytes(payload)
        counts[name] = len(rows)
        file_hashes[name] = hashlib.sha256(payload).hexdigest()

    bundle_hash = hashlib.sha256(
        "".join(f"{name}:{file_hashes[name]}" for name in TABLE_ORDER).encode("ascii")
    ).hexdigest()

    manifest_lines = ["table\trows\tsha256"]
    for name in TABLE_ORDER:
        manifest_lines.append(f"{name}\t{counts[name]}\t{file_hashes[name]}")
    manifest_lines.append(f"bundle\t{sum(counts.values())}\t{bundle_hash}")
    (out_path / MANIFEST_NAME).write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")

    return DatabaseBundle(out_path, counts, file_hashes, bundle_hash)


def read_table(path: str | Path, name: str) -> list[dict]:
    columns = TABLE_COLUMNS[name]
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or tuple(lines[0].split("\t")) != columns:
        raise ValueError(f"table {name}: header mismatch")
    rows = []
    for line in lines[1:]:
        cells = line.split("\t")
        if len(cells) != len(columns):
            raise ValueError(f"table {name}: row has {len(cells)} cells, expected {len(columns)}")
        rows.append({column: unescape_cell(cell) for column, cell in zip(columns, cells)})
    return rows


def read_database(out_dir: str | Path) -> dict[str, list[dict]]:
    out_path = Path(out_dir)
    return {name: read_table(out_path / f"{name}.tsv", name) for name in TABLE_ORDER}


def verify_manifest(out_dir: str | Path) -> list[str]:
    """Re-derive counts and hashes; return a list of mismatches (empty = clean)."""
    out_path = Path(out_dir)
    manifest_path = out_path / MANIFEST_NAME
    if not manifest_path.is_file():
        return ["manifest missing"]
    recorded = {}
    for line in manifest_path.read_text(encoding="utf-8").splitlines()[1:]:
        name, count, digest = line.split("\t")
        recorded[name] = (int(count), digest)

    problems = []
    derived_hashes = {}
    total = 0
    for name in TABLE_ORDER:
        path = out_path / f"{name}.tsv"
        if not path.is_file():
            problems.append(f"{name}: file missing")
            continue
        payload = path.read_bytes()
        digest = hashlib.sha256(payload).hexdigest()
        derived_hashes[name] = digest
        rows = len(payload.decode("utf-8").rstrip("\n").split("\n")) - 1
        total += rows
        if name not in recorded:
            problems.append(f"{name}: not in manifest")
            continue
        want_count, want_digest = recorded[name]
        if want_count != rows:
            problems.append(f"{name}: manifest says {want_count} rows, file has {rows}")
        if want_digest != digest:
            problems.append(f"{name}: content hash mismatch")
    if "bundle" in recorded and len(derived_hashes) == len(TABLE_ORDER):
        bundle_hash = hashlib.sha256(
            "".join(f"{name}:{derived_hashes[name]}" for name in TABLE_ORDER).encode("ascii")
        ).hexdigest()
        want_count, want_digest = recorded["bundle"]
        if want_digest != bundle_hash:
            problems.append("bundle: content hash mismatch")
        if want_count != total:
            problems.append(f"bundle: manifest says {want_count} rows, files have {total}")
    return problems


# --- domain object -> row adapters ---------------------------------------------


def study_row(study: CanonicalStudy) -> dict:
    return {
        "study_id": study.study_id,
        "source": study.source.value,
        "title": study.title or "",
        "brief_summary": study.brief_summary or "",
        "study_type": _opt_cell(study.study_type.value if study.study_type else None),
        "sponsor": study.sponsor or "",
        "start_year": _opt_cell(study.start_year),
        "phases": "|".join(phase.value for phase in study.phases),
        "gender": _opt_cell(study.gender.value if study.gender else None),
        "min_age": study.min_age or "",
        "max_age": study.max_age or "",
        "healthy_volunteers": "" if study.healthy_volunteers is None else _bool_cell(study.healthy_volunteers),
        "status": _opt_cell(study.status.value if study.status else None),
        "target_accrual": _opt_cell(study.target_accrual),
        "actual_accrual": _opt_cell(study.actual_accrual),
        "results_text": study.results_text or "",
        "flagged": _bool_cell(study.flagged),
    }


def condition_row(annotation: ConditionAnnotation) -> dict:
    return {
        "study_id": annotation.study_id,
        "mesh_id": annotation.mesh_id,
        "mesh_term": annotation.mesh_term,
        "mesh_type": annotation.mesh_type,
    }


def drug_row(study_id: str, entry: DrugEntry) -> dict:
    return {
        "study_id": study_id,
        "raw_name": entry.raw_name,
        "cleaned_name": entry.cleaned_name,
        "rxcui": _opt_cell(entry.rxcui),
        "rxnorm_method": entry.rxnorm_method,
        "drugbank_id": _opt_cell(entry.drugbank_id),
        "drugbank_method": entry.drugbank_method,
        "approved_fda": _bool_cell(entry.approved_fda),
        "approved_ema": _bool_cell(entry.approved_ema),
        "approved_pmda": _bool_cell(entry.approved_pmda),
    }


def disposition_row(row: DispositionRow) -> dict:
    return {
        "study_id": row.study_id,
        "design_group_id": row.design_group_id,
        "group_type": row.group_type,
        "intervention_id": row.intervention_id,
        "intervention_type": row.intervention_type,
        "treatment_name": row.treatment_name,
        "description": row.description,
    }


def adverse_event_row(row: AdverseEventRow) -> dict:
    return {
        "study_id": row.study_id,
        "arm_description": row.arm_description,
        "term": row.term,
        "organ_system": row.organ_system,
        "num_affected": str(row.num_affected),
        "num_at_risk": str(row.num_at_risk),
        "is_serious": _bool_cell(row.is_serious),
        "description": row.description,
        "meddra_code": _opt_cell(row.meddra_code),
    }


def trial_result_row(row: TrialResultRow) -> dict:
    return {
        "study_id": row.study_id,
        "population_text": row.population_text or "",
        "population_n": _opt_cell(row.population_n),
        "arm_label": row.arm_label,
        "is_control": _bool_cell(row.is_control),
        "outcome_text": row.outcome_text,
    }


def trial_outcome_row(label: OutcomeLabel) -> dict:
    return {
        "study_id": label.study_id,
        "outcome_type": label.outcome_type,
        "evidence": label.evidence,
    }


def endpoint_row(study_id: str, classification: EndpointClassification) -> dict:
    return {
        "study_id": study_id,
        "outcome_text": classification.outcome,
        "domain": classification.domain,
        "subdomain": _opt_cell(classification.subdomain),
    }


def biomarker_row(study_id: str, match: BiomarkerMatch) -> dict:
    return {
        "study_id": study_id,
        "span": match.span,
        "biomarker_name": match.biomarker_name,
        "biomarker_class": match.biomarker_class,
        "biomarker_type": match.biomarker_type,
        "biomarker_genes": "|".join(match.biomarker_genes),
        "match_type": match.match_type,
    }


def relation_row(triple: RelationTriple) -> dict:
    return {
        "head_id": triple.head_id,
        "relation_type": triple.relation_type,
        "tail_id": triple.tail_id,
        "head_source": triple.head_source.value,
        "tail_source": triple.tail_source.value,
    }
