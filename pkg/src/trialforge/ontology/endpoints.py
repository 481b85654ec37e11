"""Primary-endpoint classification against the COMET outcome taxonomy.

The taxonomy is embedded as a constant: five domains, each with a fixed
subdomain list. Two special cases: Mortality/survival has no subdomains
(so only a null subdomain validates) and Adverse events/effects accepts
any subdomain string.

Classification is delegated to a language model through an injected
callable ``(prompt: str) -> str`` (live endpoint or replay wrapper,
temperature pinned to 0 by the client layer). The model's JSON answer is
parsed and every (domain, subdomain) pair is validated against the
taxonomy before anything is returned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from trialforge.errors import ClientError, ClientUnavailable, MalformedResponse, TaxonomyViolation

LlmClient = Callable[[str], str]

# Domain -> allowed subdomains. An empty tuple means no subdomain exists
# (only null validates); None means any subdomain string is accepted.
COMET_TAXONOMY: Mapping[str, Optional[tuple[str, ...]]] = {
    "Mortality/survival": (),
    "Physiological/clinical": (
        "Blood and lymphatic system outcomes",
        "Cardiovascular outcomes",
        "Endocrine outcomes",
        "Gastrointestinal outcomes",
        "General outcomes",
        "Immune system outcomes",
        "Infections and infestations outcomes",
        "Metabolic and nutritional outcomes",
        "Musculoskeletal and connective tissue outcomes",
        "Neoplasms and related outcomes",
        "Nervous system outcomes",
        "Pregnancy and childbirth outcomes",
        "Renal and urinary outcomes",
        "Reproductive system and breast outcomes",
        "Respiratory outcomes",
        "Skin and subcutaneous tissue outcomes",
        "Surgical and medical procedures outcomes",
        "Vascular outcomes",
    ),
    "Life impact": (
        "Delivery of care",
        "Global quality of life",
        "Perceived health status",
        "Personal circumstances",
        "Physical functioning",
        "Role functioning",
        "Social functioning",
        "Emotional functioning/wellbeing",
        "Cognitive functioning",
        "Sleep",
        "Fatigue",
    ),
    "Resource use": (
        "Hospital",
        "Need for further intervention",
        "Societal/carer burden",
        "Other resource use",
    ),
    "Adverse events/effects": None,
}

ENDPOINT_PROMPT_TEMPLATE = """You are a clinical research expert. Given a clinical trial abstract or description, extract the PRIMARY OUTCOME MEASUREMENT (usually only one or at most three), and classify them using the COMET taxonomy.

Follow these steps:
1. Extract the PRIMARY OUTCOME MEASUREMENT from the input text.
2. Classify the PRIMARY OUTCOME MEASUREMENT using the COMET taxonomy below.

COMET Taxonomy:

1. Mortality/survival
   - No subdomains

2. Physiological/clinical
   - Blood and lymphatic system outcomes
   - Cardiovascular outcomes
   - Endocrine outcomes
   - Gastrointestinal outcomes
   - General outcomes
   - Immune system outcomes
   - Infections and infestations outcomes
   - Metabolic and nutritional outcomes
   - Musculoskeletal and connective tissue outcomes
   - Neoplasms and related outcomes
   - Nervous system outcomes
   - Pregnancy and childbirth outcomes
   - Renal and urinary outcomes
   - Reproductive system and breast outcomes
   - Respiratory outcomes
   - Skin and subcutaneous tissue outcomes
   - Surgical and medical procedures outcomes
   - Vascular outcomes

3. Life impact
   - Delivery of care
   - Global quality of life
   - Perceived health status
   - Personal circumstances
   - Physical functioning
   - Role functioning
   - Social functioning
   - Emotional functioning/wellbeing
   - Cognitive functioning
   - Sleep
   - Fatigue

4. Resource use
   - Hospital
   - Need for further intervention
   - Societal/carer burden
   - Other resource use

5. Adverse events/effects
   - Any subdomain

Return your output as a list of JSON objects, one per outcome, in the following format:

[
  {{
    "outcome": "<brief name of the primary outcome measurement>",
    "domain": "<COMET domain>",
    "subdomain": "<COMET subdomain or null>"
  }},
  ...
]

Input text:
{outcome_text}
"""


@dataclass(frozen=True)
class EndpointClassification:
    outcome: str
    domain: str
    subdomain: Optional[str]


def build_endpoint_prompt(outcome_text: str) -> str:
    return ENDPOINT_PROMPT_TEMPLATE.format(outcome_text=outcome_text)


def validate_endpoint_label(domain: str, subdomain: Optional[str]) -> None:
    """Raise ``TaxonomyViolation`` unless (domain, subdomain) is valid."""
    if domain not in COMET_TAXONOMY:
        raise TaxonomyViolation(f"unknown domain {domain!r}")
    if subdomain is None:
        return
    allowed = COMET_TAXONOMY[domain]
    if allowed is None:
        return
    if subdomain not in allowed:
        raise TaxonomyViolation(f"subdomain {subdomain!r} not valid under domain {domain!r}")


def _strip_code_fence(text: str) -> str:
    stripped = text.strip()
    if not stripped.startswith("```"):
        return stripped
    lines = stripped.splitlines()
    if lines and lines[0].startswith("```"):
        lines = lines[1:]
    if lines and lines[-1].strip() == "```":
        lines = lines[:-1]
    return "\n".join(lines).strip()


def classify_endpoint(outcome_text: str, llm_client: LlmClient) -> list[EndpointClassification]:
    """Classify the primary outcome(s) described by ``outcome_text``.

    Returns one to a few classifications in the model's order. Raises
    ``MalformedResponse`` when the answer is not the expected JSON list
    and ``TaxonomyViolation`` when any pair falls outside the taxonomy.
    """
    prompt = build_endpoint_prompt(outcome_text)
    try:
        raw = llm_client(prompt)
    except ClientError:
        raise
    except OSError as exc:
        raise ClientUnavailable(f"endpoint classification call failed: {exc}") from exc

    payload = _strip_code_fence(raw)
    try:
        parsed = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"endpoint answer is not JSON: {payload[:120]!r}") from exc
    if not isinstance(parsed, list) or not parsed:
        raise MalformedResponse("endpoint answer must be a non-empty JSON list")

    out: list[EndpointClassification] = []
    for item in parsed:
        if not isinstance(item, dict) or "outcome" not in item or "domain" not in item:
            raise MalformedResponse(f"endpoint answer entry malformed: {item!r}")
        subdomain = item.get("subdomain")
        if subdomain in ("", "null"):
            subdomain = None
        if subdomain is not None and not isinstance(subdomain, str):
            raise MalformedResponse(f"endpoint subdomain must be string or null: {item!r}")
        domain = item["domain"]
        validate_endpoint_label(domain, subdomain)
        out.append(EndpointClassification(outcome=str(item["outcome"]), domain=domain, subdomain=subdomain))
    return out
