"""Plain TSV readers for the vocabulary subset files.

These files are hand-curated and never contain embedded tabs or newlines,
so no escaping layer is needed (unlike the database writer in
``trialforge.store``).
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterator


def iter_tsv(path: Path, columns: int) -> Iterator[list[str]]:
    """Yield rows from a TSV file, skipping blanks and ``#`` comments.

    Rows shorter than ``columns`` are padded with empty strings so loaders
    can rely on a fixed width; longer rows raise to surface editing slips
    in the curated files.
    """
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) > columns:
                raise ValueError(f"{path.name}:{lineno}: expected at most {columns} columns, got {len(row)}")
            yield row + [""] * (columns - len(row))


def default_vocab_dir() -> Path:
    from importlib import resources

    return Path(str(resources.files("trialforge").joinpath("data/vocab")))
