"""Adverse-event term mapping against a MedDRA hierarchy subset.

Four levels are loaded (LLT, PT, HLT, HLGT) from tab-separated files:

- ``meddra_llt.tsv``: LLT code, LLT name, parent PT code
- ``meddra_pt.tsv``: PT code, PT name, parent HLT code
- ``meddra_hlt.tsv``: HLT code, HLT name, parent HLGT code
- ``meddra_hlgt.tsv``: HLGT code, HLGT name

Matching is case-insensitive and exact, LLT names first and PT names
second. Either way the result is a PT code: LLT rows resolve through
their linked PT, which is what downstream tables key on ("Fever" lands on
the PT for Pyrexia).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from trialforge.ontology._vocabio import default_vocab_dir, iter_tsv


@dataclass(frozen=True)
class MeddraHierarchy:
    """Loaded subset; mappings are read-only after load."""

    llt_to_pt: Mapping[str, str]
    pt_by_name: Mapping[str, str]
    pt_names: Mapping[str, str]
    pt_to_hlt: Mapping[str, str]
    hlt_names: Mapping[str, str]
    hlt_to_hlgt: Mapping[str, str]
    hlgt_names: Mapping[str, str]


def load_meddra(vocab_dir: Optional[Path] = None) -> MeddraHierarchy:
    base = vocab_dir if vocab_dir is not None else default_vocab_dir()

    llt_to_pt = {name.lower(): pt_code for _llt_code, name, pt_code in iter_tsv(base / "meddra_llt.tsv", 3)}

    pt_by_name: dict[str, str] = {}
    pt_names: dict[str, str] = {}
    pt_to_hlt: dict[str, str] = {}
    for pt_code, name, hlt_code in iter_tsv(base / "meddra_pt.tsv", 3):
        pt_by_name[name.lower()] = pt_code
        pt_names[pt_code] = name
        if hlt_code:
            pt_to_hlt[pt_code] = hlt_code

    hlt_names: dict[str, str] = {}
    hlt_to_hlgt: dict[str, str] = {}
    for hlt_code, name, hlgt_code in iter_tsv(base / "meddra_hlt.tsv", 3):
        hlt_names[hlt_code] = name
        if hlgt_code:
            hlt_to_hlgt[hlt_code] = hlgt_code

    hlgt_names = {code: name for code, name in iter_tsv(base / "meddra_hlgt.tsv", 2)}

    return MeddraHierarchy(
        llt_to_pt=llt_to_pt,
        pt_by_name=pt_by_name,
        pt_names=pt_names,
        pt_to_hlt=pt_to_hlt,
        hlt_names=hlt_names,
        hlt_to_hlgt=hlt_to_hlgt,
        hlgt_names=hlgt_names,
    )


def map_meddra(term: str, hierarchy: MeddraHierarchy) -> Optional[str]:
    """Map an adverse-event term to its MedDRA PT code, or None.

    LLT names take precedence over PT names; both routes return the PT
    code so every mapped term lands on the same level.
    """
    key = term.strip().lower()
    if not key:
        return None
    pt_code = hierarchy.llt_to_pt.get(key)
    if pt_code is not None:
        return pt_code
    return hierarchy.pt_by_name.get(key)
