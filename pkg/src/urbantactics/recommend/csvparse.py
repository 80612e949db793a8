"""Tolerant parsing of model-produced candidate CSV.

Models wrap output in code fences, prepend chatty sentences, repeat the
header, or emit ragged rows. The parser accepts exactly the rows it can
trust and reports everything else with a row locus.
"""

from __future__ import annotations

import csv
import io
from typing import List, Tuple

from ..errors import MalformedResponse

CSV_HEADER = ("Object", "Description")


def _strip_code_fences(text: str) -> str:
    lines = text.split("\n")
    kept = [line for line in lines if not line.lstrip().startswith("```")]
    return "\n".join(kept)


def _parse_rows(text: str) -> Tuple[List[Tuple[str, str]], List[str]]:
    """Return (accepted rows, reject loci descriptions)."""
    cleaned = _strip_code_fences(text)
    reader = csv.reader(io.StringIO(cleaned, newline=""))
    accepted: List[Tuple[str, str]] = []
    rejects: List[str] = []
    saw_header = False
    for row in reader:
        locus = f"row {reader.line_num}"
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            rejects.append(f"{locus}: expected 2 fields, got {len(row)}")
            continue
        name = row[0].strip()
        description = row[1].strip()
        if not saw_header and not accepted:
            if name.lower() == "object" and description.lower() == "description":
                saw_header = True
                continue
        if not name:
            rejects.append(f"{locus}: empty object name")
            continue
        accepted.append((name, description))
    return accepted, rejects


def parse_candidate_csv(text: str) -> List[Tuple[str, str]]:
    """Extract (object, description) rows from a raw model response.

    Code-fence lines are dropped, a single leading header row is skipped,
    fields keep their content apart from surrounding whitespace, and any
    row without exactly two fields is rejected. Raises MalformedResponse
    when no row survives, carrying the loci of what was rejected.
    """
    try:
        accepted, rejects = _parse_rows(text)
    except csv.Error as exc:
        raise MalformedResponse(f"unreadable CSV: {exc}") from exc
    if not accepted:
        detail = "; ".join(rejects) if rejects else "no data rows found"
        raise MalformedResponse(f"no usable candidate rows ({detail})")
    return accepted


def serialize_candidates(rows: List[Tuple[str, str]]) -> str:
    """Write rows back out as canonical two-column CSV with a header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for name, description in rows:
        writer.writerow([name, description])
    return buf.getvalue()
