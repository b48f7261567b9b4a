"""Instance, branch, report and model files.

Instances and branches are comma-separated text with an optional header
row. Reports and models are JSON. Integer inputs round-trip as integers and
reals are written at full precision.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .grnn import GrnnModel
from .model import Branch, LoadSet, balance_report, ideal_current, validate_assignment

MODEL_FORMAT = "phasebal-grnn"
MODEL_VERSION = 1

_INT_RE = re.compile(r"^[+-]?\d+$")


class InputError(ValueError):
    """A file that could not be read or parsed; message names the row."""


def parse_number(text: str):
    text = text.strip()
    if _INT_RE.match(text):
        return int(text)
    value = float(text)  # ValueError propagates to the caller
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r}")
    return value


def _is_number(text: str) -> bool:
    try:
        parse_number(text)
    except ValueError:
        return False
    return True


def _read_rows(path) -> list[tuple[int, list[str]]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        rows.append((lineno, cells))
    # header only if no cell of the first row is numeric; a partly numeric
    # first row is data and gets reported as malformed
    if rows and not any(_is_number(c) for c in rows[0][1]):
        rows = rows[1:]
    return rows


def parse_instances(text_rows) -> list[LoadSet]:
    instances = []
    width = None
    for lineno, cells in text_rows:
        try:
            values = [parse_number(c) for c in cells]
        except ValueError:
            raise InputError(f"row {lineno}: malformed value in {','.join(cells)!r}") from None
        if width is None:
            width = len(values)
        if len(values) != width:
            raise InputError(f"row {lineno}: {len(values)} columns, expected {width}")
        if len(values) < 3 or len(values) % 3:
            raise InputError(f"row {lineno}: {len(values)} loads is not a positive multiple of 3")
        try:
            instances.append(LoadSet(tuple(values)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"row {lineno}: {exc}") from None
    if not instances:
        raise InputError("no instances")
    return instances


def read_instances(path) -> list[LoadSet]:
    return parse_instances(_read_rows(path))


def format_instances(instances) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for loads in instances:
        writer.writerow([repr(v) if isinstance(v, float) else str(v) for v in loads])
    return buf.getvalue()


def read_branches(path) -> list[Branch]:
    branches = []
    for lineno, cells in _read_rows(path):
        if len(cells) != 4:
            raise InputError(f"row {lineno}: expected 4 columns (r_ohm, p_watt, q_var, v_mag), got {len(cells)}")
        try:
            r, p, q, v = (float(parse_number(c)) for c in cells)
        except ValueError:
            raise InputError(f"row {lineno}: malformed value in {','.join(cells)!r}") from None
        if v == 0:
            raise InputError(f"row {lineno}: zero voltage magnitude")
        try:
            branches.append(Branch(r, p, q, v))
        except ValueError as exc:
            raise InputError(f"row {lineno}: {exc}") from None
    if not branches:
        raise InputError("no branches")
    return branches


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_text(path, text: str) -> None:
    """Write atomically: the target appears only once fully written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_json(path, payload, indent: int | None = 1) -> None:
    write_text(path, json.dumps(_plain(payload), indent=indent) + "\n")


def method_entry(loads, labels) -> dict:
    """Report block for one method's assignment on one instance."""
    verdict = validate_assignment(labels, len(loads))
    rep = balance_report(loads, labels)
    entry = {
        "labels": list(labels),
        "valid": bool(verdict),
        "phase_sums": list(rep.phase_sums),
        "pairwise_diffs": list(rep.pairwise_diffs),
        "max_diff": rep.max_diff,
        "total_abs_deviation": rep.total_abs_deviation,
    }
    if not verdict:
        entry["raw_invalid"] = verdict.kind.value
    return entry


def instance_entry(row: int, loads) -> dict:
    return {"row": row, "loads": list(loads), "ideal_current": ideal_current(loads), "methods": {}}


def model_to_dict(model: GrnnModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "spread": model.spread,
        "n_loads": model.n_loads,
        "n_samples": model.n_samples,
        "inputs": model.training_inputs,
        "targets": model.training_targets.astype(int),
    }


def model_from_dict(d: dict) -> GrnnModel:
    if d.get("format") != MODEL_FORMAT:
        raise InputError(f"not a {MODEL_FORMAT} model file")
    if d.get("version") != MODEL_VERSION:
        raise InputError(f"unsupported model version {d.get('version')!r}")
    try:
        return GrnnModel(np.array(d["inputs"], dtype=float), np.array(d["targets"], dtype=float), float(d["spread"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad model file: {exc}") from None


def save_model(model: GrnnModel, path) -> None:
    write_json(path, model_to_dict(model), indent=None)


def load_model(path) -> GrnnModel:
    try:
        d = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(d)
