"""Deterministic CSV/JSON emission with a metadata header.

CSV files start with ``#`` comment lines (tool version, config hash, seed,
arguments); JSON documents carry the same block under a leading ``"meta"``
key. Nothing time- or host-dependent is written, so reruns with the same
inputs are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from importlib import metadata
from pathlib import Path

try:
    TOOL_VERSION = metadata.version("artifact")
except metadata.PackageNotFoundError:  # running from a source tree
    TOOL_VERSION = "0.1.0"

TOOL_NAME = "donorqc"


def config_hash(raw: bytes | None) -> str:
    return hashlib.sha256(raw or b"").hexdigest()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return obj


def meta_block(command: str, seed: int, cfg_hash: str, args: dict) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "config_sha256": cfg_hash,
        "seed": int(seed),
        "args": _jsonable(args),
    }


def csv_text(header, rows, meta: dict) -> str:
    buf = io.StringIO()
    for key in ("tool", "version", "command", "config_sha256", "seed"):
        buf.write(f"# {key}: {meta[key]}\n")
    buf.write(f"# args: {json.dumps(meta['args'], sort_keys=True)}\n")
    for key, val in meta.items():
        if key not in ("tool", "version", "command", "config_sha256", "seed", "args"):
            buf.write(f"# {key}: {json.dumps(_jsonable(val), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def json_text(payload, meta: dict) -> str:
    return json.dumps({"meta": meta, "data": _jsonable(payload)}, indent=2, sort_keys=True) + "\n"


def data_section(text: str) -> str:
    """Everything after the metadata block; used by reproducibility checks."""
    if text.lstrip().startswith("{"):
        return json.dumps(json.loads(text)["data"], sort_keys=True)
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def emit(text: str, out_dir: str | None, filename: str, stream) -> Path | None:
    if out_dir is None:
        stream.write(text)
        return None
    path = Path(out_dir) / filename
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
