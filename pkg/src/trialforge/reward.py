"""Verifiable reward scoring and group-relative policy math.

The reward contract: a response must carry its final answer inside
<answer>...</answer> tags. No well-formed pair means the response is
unusable and scores a flat -2. Otherwise the answer earns a small
formatting bonus of 0.1 on top of its task performance, but only when
the performance itself is positive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Collection, Sequence

from .errors import EmptyTruth
from .metrics import recall_at_k

ANSWER_TAG_RE = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)
_INT_RE = re.compile(r"-?\d[\d,]*")

FORMAT_BONUS = 0.1
MALFORMED_TOTAL = -2.0

#: Tasks with a verifiable reward definition.
REWARD_TASKS = ("sample_size", "study_search")


def extract_answer(raw_output: str) -> str | None:
    """Pull the answer from the LAST well-formed <answer> pair, or None."""
    matches = ANSWER_TAG_RE.findall(raw_output)
    if not matches:
        return None
    return matches[-1].strip()


@dataclass
class RewardOutcome:
    total: float
    performance: float
    format_ok: bool
    parsed_answer: str | None
    reason: str  # "ok", "missing_answer_tag", "unparseable_answer", ...


def score_reward(
    raw_output: str,
    truth: object,
    task: str,
    retrieval_fn: Callable[[str], Sequence[str]] | None = None,
    k: int = 100,
) -> RewardOutcome:
    """Score one model response for a verifiable task.

    sample_size: truth is the target integer; performance is 1.0 when the
    predicted count lands inside [0.8 * truth, 1.2 * truth] (inclusive),
    else 0.0.

    study_search: truth is the relevant PMID collection; the answer is a
    query handed to retrieval_fn, and performance is recall@k over the
    ranked ids it returns.
    """
    if task not in REWARD_TASKS:
        raise ValueError(f"no reward defined for task {task!r}")
    answer = extract_answer(raw_output)
    if answer is None:
        return RewardOutcome(
            total=MALFORMED_TOTAL,
            performance=0.0,
            format_ok=False,
            parsed_answer=None,
            reason="missing_answer_tag",
        )

    if task == "sample_size":
        perf, reason = _score_sample_size(answer, truth)
    else:
        perf, reason = _score_study_search(answer, truth, retrieval_fn, k)

    total = perf + FORMAT_BONUS if perf > 0 else perf
    return RewardOutcome(
        total=total,
        performance=perf,
        format_ok=True,
        parsed_answer=answer,
        reason=reason,
    )


def _score_sample_size(answer: str, truth: object) -> tuple[float, str]:
    if not isinstance(truth, int) or truth <= 0:
        raise ValueError(f"sample_size truth must be a positive int, got {truth!r}")
    m = _INT_RE.search(answer)
    if m is None:
        return 0.0, "unparseable_answer"
    pred = int(m.group().replace(",", ""))
    ok = 0.8 * truth <= pred <= 1.2 * truth
    return (1.0 if ok else 0.0), "ok"


def _score_study_search(
    answer: str,
    truth: object,
    retrieval_fn: Callable[[str], Sequence[str]] | None,
    k: int,
) -> tuple[float, str]:
    if retrieval_fn is None:
        raise ValueError("study_search reward needs a retrieval_fn")
    if not isinstance(truth, Collection) or isinstance(truth, (str, bytes)):
        raise ValueError(f"study_search truth must be a PMID collection, got {truth!r}")
    retrieved = list(retrieval_fn(answer))
    return recall_at_k(retrieved, list(truth), k=k), "ok"


# --- group-relative advantage and clipped surrogate --------------------------

#: Below this, a group's reward spread counts as zero variance.
STD_FLOOR = 1e-8


@dataclass
class ClipConfig:
    epsilon: float = 0.2


def grpo_advantages(rewards: Sequence[float]) -> list[float]:
    """Standardize rewards within one rollout group.

    Uses the population standard deviation (divide by G, not G-1). A
    group with no spread, including G=1, gets all-zero advantages
    instead of a division blowup.
    """
    g = len(rewards)
    if g == 0:
        raise ValueError("empty rollout group")
    mean = sum(rewards) / g
    var = sum((r - mean) ** 2 for r in rewards) / g
    std = math.sqrt(var)
    if std < STD_FLOOR:
        return [0.0] * g
    return [(r - mean) / std for r in rewards]


def grpo_clipped_term(ratio: float, advantage: float, cfg: ClipConfig | None = None) -> float:
    """Pessimistic clipped policy term: min(r*A, clip(r, 1-eps, 1+eps)*A)."""
    eps = (cfg or ClipConfig()).epsilon
    clipped = min(max(ratio, 1.0 - eps), 1.0 + eps)
    return min(ratio * advantage, clipped * advantage)
