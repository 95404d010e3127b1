"""CSV / JSON emission and snapshot round-tripping."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .lattice import COMPONENTS

SNAPSHOT_COLUMNS = tuple(f"{part}_{c}" for c in COMPONENTS for part in ("re", "im"))


def format_float(v) -> str:
    """17 significant digits: enough for an exact binary64 round trip."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(path: Path, columns, rows) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([format_float(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def snapshot_rows(psi: np.ndarray):
    for site in np.asarray(psi):
        row = []
        for amp in site:
            row.extend((amp.real, amp.imag))
        yield row


def write_snapshot(path: Path, psi: np.ndarray) -> Path:
    return write_csv(path, SNAPSHOT_COLUMNS, snapshot_rows(psi))


def read_snapshot(path: Path) -> np.ndarray:
    header, rows = read_csv(path)
    if tuple(header) != SNAPSHOT_COLUMNS:
        raise ValueError(f"{path}: unexpected snapshot header {header}")
    vals = np.array([[float(x) for x in row] for row in rows], dtype=float).reshape(-1, 4, 2)
    # assign parts directly: re + 1j * im would turn -0.0 into +0.0
    psi = np.empty(vals.shape[:2], dtype=complex)
    psi.real = vals[..., 0]
    psi.imag = vals[..., 1]
    return psi


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    return obj


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(obj), fh, indent=2, allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def emit(report, out_dir, fmt: str = "csv") -> list[Path]:
    """Write a run report into ``out_dir``.

    The main table goes to ``<table_name>.csv`` (or is embedded in
    ``report.json`` when ``fmt == "json"``), the final field to
    ``snapshot.csv``, and the summary, checks and metadata to ``report.json``.
    """
    out_dir = Path(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    written = []
    doc = report.to_dict()
    if report.table_name:
        if fmt == "csv":
            written.append(write_csv(out_dir / f"{report.table_name}.csv", report.columns, report.rows))
        else:
            doc["table"] = {"name": report.table_name, "columns": list(report.columns), "rows": [list(r) for r in report.rows]}
    if report.snapshot is not None:
        written.append(write_snapshot(out_dir / "snapshot.csv", report.snapshot))
    written.append(write_json(out_dir / "report.json", doc))
    return written
