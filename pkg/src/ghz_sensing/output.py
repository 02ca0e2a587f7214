"""Deterministic CSV/JSON table emission with a provenance header.

Every file starts with (CSV) or embeds (JSON) the tool version and a hash of
the effective run configuration, and floats are written with 17 significant
digits so values round-trip losslessly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import __version__

TOOL_NAME = "ghz-sensing"


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config_data) -> str:
    return hashlib.sha256(canonical_json(config_data).encode("utf-8")).hexdigest()


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def provenance_line(cfg_hash: str) -> str:
    return f"# {TOOL_NAME} {__version__} config_sha256={cfg_hash}"


def write_table(path: Path, columns: list[str], rows: list[list], fmt: str, cfg_hash: str) -> None:
    if fmt == "csv":
        lines = [provenance_line(cfg_hash), ",".join(columns)]
        lines.extend(",".join(format_value(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        payload = {
            "meta": {"tool": TOOL_NAME, "version": __version__, "config_sha256": cfg_hash},
            "columns": columns,
            "rows": rows,
        }
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def write_json_document(path: Path, document: dict, cfg_hash: str) -> None:
    payload = {"meta": {"tool": TOOL_NAME, "version": __version__, "config_sha256": cfg_hash}}
    payload.update(document)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
