"""Serialise scan results (CSV with a metadata preamble, JSON, YAML) and read them back."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from typing import Dict, List

import yaml

from .errors import InputFormatError
from .models import ScanResult, WidthDataset

WIDTH_HEADER = ["rho_AA", "width_eV"]


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    # repr round-trips floats exactly
    return repr(float(value))


def _parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        raise InputFormatError(f"Unexpected cell value '{text}'")


def emit_csv(result: ScanResult) -> str:
    """CSV with one `# key=value` line per metadata entry, then header and rows."""
    lines = [f"# {key}={value}" for key, value in result.metadata.items()]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def read_scan_csv(text: str) -> ScanResult:
    """Parse what emit_csv wrote."""
    metadata: Dict[str, str] = {}
    columns: List[str] = []
    rows: List[tuple] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise InputFormatError(f"Line {lineno}: metadata line without '='")
            metadata[key] = value
        elif not columns:
            columns = line.split(",")
        else:
            cells = line.split(",")
            if len(cells) != len(columns):
                raise InputFormatError(
                    f"Line {lineno}: {len(cells)} cells for {len(columns)} columns")
            rows.append(tuple(_parse_cell(c) for c in cells))
    if not columns:
        raise InputFormatError("No header row found")
    return ScanResult(columns=columns, rows=rows, metadata=metadata)


def _to_plain_dict(result: ScanResult) -> dict:
    """Scan as plain containers; NaN becomes None for JSON and YAML."""
    def plain(v):
        if isinstance(v, bool):
            return v
        v = float(v)
        return None if math.isnan(v) else v

    return {
        "metadata": dict(result.metadata),
        "columns": list(result.columns),
        "rows": [[plain(v) for v in row] for row in result.rows],
    }


def emit_json(result: ScanResult) -> str:
    return json.dumps(_to_plain_dict(result), indent=2, ensure_ascii=False)


def emit_yaml(result: ScanResult) -> str:
    return yaml.dump(_to_plain_dict(result), default_flow_style=False,
                     sort_keys=False, allow_unicode=True)


EMITTERS = {
    "csv": emit_csv,
    "json": emit_json,
    "yaml": emit_yaml,
}


def write_atomic(path: str, content: str) -> None:
    """Write content to path through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=".icd_photon_", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def read_width_dataset(path: str) -> WidthDataset:
    """Read a two-column CSV with header `rho_AA,width_eV` (Å, eV)."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(row for row in f if row.strip() and not row.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != WIDTH_HEADER:
            raise InputFormatError(
                f"{path}: expected header '{','.join(WIDTH_HEADER)}', got {header}")
        rho, width = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise InputFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                rho.append(float(row[0]))
                width.append(float(row[1]))
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: non-numeric value in {row}")
            if not (math.isfinite(rho[-1]) and math.isfinite(width[-1])):
                raise InputFormatError(f"{path}:{lineno}: non-finite value in {row}")
    return WidthDataset(rho=rho, width=width, source=os.path.basename(path))


def emit_width_dataset(data: WidthDataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(WIDTH_HEADER)
    for rho, width in zip(data.rho, data.width):
        writer.writerow([repr(float(rho)), repr(float(width))])
    return buf.getvalue()
