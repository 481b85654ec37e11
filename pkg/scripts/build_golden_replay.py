"""Populate a replay store for the golden corpus with scripted transports.

The transports are deterministic rules, not live services: running the
full pipeline once in record mode against them captures every request
the pipeline makes, so subsequent replay-mode runs need no code here.

Usage: python3 scripts/build_golden_replay.py CORPUS_DIR REPLAY_DIR [OUT_DIR]
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from trialforge.pipeline import PipelineSettings, run_pipeline  # noqa: E402

# Pinned so the arm-design item for NCT00000150 shuffles its correct
# option to letter C; see tests/test_acceptance.py.
GOLDEN_SEED = 1

_ENDPOINT_RULES = (
    ("diabetes", "Metabolic and nutritional outcomes"),
    ("response rate", "Neoplasms and related outcomes"),
    ("expulsion", "Pregnancy and childbirth outcomes"),
    ("visual acuity", "General outcomes"),
)

_MARINA_PICO = {
    "population": "Patients with minimally classic or occult subfoveal neovascular age-related macular degeneration",
    "population_n": 716,
    "outcomes": [
        {
            "intervention": "Ranibizumab 0.3 mg monthly",
            "is_control": False,
            "outcome": "94.5 percent lost fewer than 15 letters of visual acuity at 12 months",
        },
        {
            "intervention": "Ranibizumab 0.5 mg monthly",
            "is_control": False,
            "outcome": "94.6 percent lost fewer than 15 letters of visual acuity at 12 months",
        },
        {
            "intervention": "Sham injection",
            "is_control": True,
            "outcome": "62.2 percent lost fewer than 15 letters of visual acuity at 12 months",
        },
    ],
}

_AFLIBERCEPT_PICO = {
    "population": "Eyes with persistent diabetic macular edema",
    "population_n": 120,
    "outcomes": [
        {
            "intervention": "Intravitreal aflibercept 2 mg",
            "is_control": False,
            "outcome": "Mean visual acuity improved by 9.1 letters at 12 months",
        },
        {
            "intervention": "Macular laser",
            "is_control": True,
            "outcome": "Mean visual acuity improved by 1.3 letters at 12 months",
        },
    ],
}

_BEDREST_MCQ = {
    "question": (
        "After procedures such as lumbar puncture, spinal anaesthesia, or "
        "myelography, how do outcomes with prescribed bed rest compare with "
        "early ambulation?"
    ),
    "options": [
        "Bed rest reduces the incidence of post-procedure headache",
        "Bed rest shortens recovery relative to early ambulation",
        "No significant differences in outcomes favor bed rest over early ambulation",
        "Bed rest helps only after myelography",
    ],
    "answer": "C",
}

_MARINA_ASSUMPTIONS = (
    "Randomized 2:1 across two ranibizumab dose groups and sham, powered at "
    "90% with two-sided alpha 0.05 to detect a 20 percentage point difference "
    "in the proportion of subjects losing fewer than 15 letters."
)


def _classify_endpoint_text(prompt: str) -> list[dict]:
    outcome_text = prompt.rsplit("Input text:\n", 1)[-1].strip()
    lowered = outcome_text.lower()
    subdomain = "General outcomes"
    for needle, label in _ENDPOINT_RULES:
        if needle in lowered:
            subdomain = label
            break
    return [{"outcome": outcome_text, "domain": "Physiological/clinical", "subdomain": subdomain}]


def llm_transport(service: str, request: dict) -> dict:
    prompt = request["prompt"]
    if "Input text:" in prompt and "COMET taxonomy" in prompt:
        return {"text": json.dumps(_classify_endpoint_text(prompt))}
    if "Patient or problem (P)" in prompt:
        if "aflibercept" in prompt.lower():
            return {"text": json.dumps(_AFLIBERCEPT_PICO)}
        if "ranibizumab" in prompt.lower():
            return {"text": json.dumps(_MARINA_PICO)}
        return {"text": json.dumps({"population": "", "population_n": None, "outcomes": []})}
    if "official title:" in prompt:
        return {"text": "positive" if "NCT00056836" in prompt else "unknown"}
    if prompt.startswith("Write one multiple-choice question"):
        return {"text": json.dumps(_BEDREST_MCQ)}
    if prompt.startswith("Summarize the statistical assumptions"):
        return {"text": _MARINA_ASSUMPTIONS}
    raise ValueError(f"no scripted answer for prompt: {prompt[:80]!r}")


def annotator_transport(service: str, request: dict) -> dict:
    if "diabetes" in request["text"].lower():
        return {
            "annotations": [
                {
                    "semantic_type": "T047",
                    "mesh_id": "D003924",
                    "mesh_term": "Diabetes Mellitus, Type 2",
                    "ancestors": [{"mesh_id": "D003920", "mesh_term": "Diabetes Mellitus"}],
                }
            ]
        }
    return {"annotations": []}


def rxnorm_transport(service: str, request: dict) -> dict:
    if request.get("op") == "rxcui":
        return {"rxcui": "1232150" if request.get("name") == "aflibercept" else None}
    return {"suggestions": []}


TRANSPORTS = {
    "llm": llm_transport,
    "annotator": annotator_transport,
    "rxnorm": rxnorm_transport,
}


def build_replay(corpus_dir: Path, replay_dir: Path, out_dir: Path | None = None, seed: int = GOLDEN_SEED) -> dict:
    """Record-mode pipeline run that fills ``replay_dir``; returns the summary."""
    if out_dir is None:
        with tempfile.TemporaryDirectory(prefix="golden-record-") as tmp:
            return build_replay(corpus_dir, replay_dir, Path(tmp), seed)
    settings = PipelineSettings(
        corpus_dir=Path(corpus_dir),
        out_dir=Path(out_dir),
        seed=seed,
        mode="record",
        replay_dir=Path(replay_dir),
        allow_small_split=True,
    )
    return run_pipeline(settings, transports=TRANSPORTS)


def main(argv: list[str]) -> int:
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    out_dir = Path(argv[3]) if len(argv) > 3 else None
    summary = build_replay(Path(argv[1]), Path(argv[2]), out_dir)
    print(json.dumps(summary["live_calls"], sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
