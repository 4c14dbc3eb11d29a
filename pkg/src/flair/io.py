"""Corpus ingestion from long CSV or JSON lines, and JSONL output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .series import Freq, IngestionError

CSV_REQUIRED = ("series_id", "value")
CSV_ORDER_COLUMNS = ("timestamp", "index")


@dataclass
class Corpus:
    entries: list
    source: str = ""
    rejected: dict = field(default_factory=dict)   # series_id -> reason

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def require_test(self) -> None:
        for e in self.entries:
            if len(e["test"]) < 1:
                raise IngestionError(f"series {e['series_id']!r} has no test values")


def _float(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise IngestionError(f"{where}: cannot parse value {text!r}") from None


def _finish(raw: dict, source: str) -> Corpus:
    """Drop series with non-finite values (reported) and freeze arrays."""
    entries, rejected = [], {}
    for sid, e in raw.items():
        train = np.asarray(e["train"], dtype=np.float64)
        test = np.asarray(e["test"], dtype=np.float64)
        if train.size == 0:
            rejected[sid] = "empty training window"
            continue
        bad = int(np.sum(~np.isfinite(train)) + np.sum(~np.isfinite(test)))
        if bad:
            rejected[sid] = f"{bad} non-finite value(s)"
            continue
        freq = e.get("freq")
        Freq.parse(freq)  # raises on an unrecognised code
        entries.append({
            "series_id": sid,
            "family": e.get("family") or sid,
            "freq": freq if freq not in (None, "") else None,
            "train": train,
            "test": test,
        })
    return Corpus(entries, source, rejected)


def read_csv(path) -> Corpus:
    """Long CSV: series_id, timestamp or index, value, optional family/freq/split.

    Rows are grouped by series_id in file order; an index column (if present)
    is used to sort. ``split`` marks rows as ``train`` (default) or ``test``.
    """
    raw: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = [c for c in CSV_REQUIRED if c not in cols]
        if missing:
            raise IngestionError(f"{path}: line 1: missing column(s) {', '.join(missing)}")
        order_col = "index" if "index" in cols else None
        for row in reader:
            line = reader.line_num
            if None in row or any(row.get(c) is None for c in cols):
                raise IngestionError(f"{path}: line {line}: wrong number of fields")
            sid = row["series_id"].strip()
            if not sid:
                raise IngestionError(f"{path}: line {line}: empty series_id")
            value = _float(row["value"], f"{path}: line {line}")
            split = (row.get("split") or "train").strip().lower()
            if split not in ("train", "test"):
                raise IngestionError(f"{path}: line {line}: split must be train or test")
            e = raw.setdefault(sid, {"train": [], "test": [], "family": None, "freq": None,
                                     "_order": []})
            if split == "train" and e["test"]:
                raise IngestionError(f"{path}: line {line}: train row after test rows for {sid!r}")
            for key in ("family", "freq"):
                v = (row.get(key) or "").strip()
                if v:
                    if e[key] not in (None, v):
                        raise IngestionError(f"{path}: line {line}: conflicting {key} for {sid!r}")
                    e[key] = v
            if order_col:
                e["_order"].append((_float(row[order_col], f"{path}: line {line}"), split))
            e[split].append(value)
    if order_col:
        for sid, e in raw.items():
            idx = [o for o, _ in e.pop("_order")]
            if np.any(np.diff(idx) <= 0):
                raise IngestionError(f"{path}: series {sid!r}: index is not strictly increasing")
    else:
        for e in raw.values():
            e.pop("_order")
    return _finish(raw, str(path))


def read_jsonl(path) -> Corpus:
    """One object per line: id (or series_id), freq, train, test, family."""
    raw: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestionError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise IngestionError(f"{path}: line {line_no}: expected an object")
            sid = obj.get("series_id", obj.get("id"))
            if sid is None or "train" not in obj:
                raise IngestionError(f"{path}: line {line_no}: needs id and train")
            sid = str(sid)
            if sid in raw:
                raise IngestionError(f"{path}: line {line_no}: duplicated series_id {sid!r}")
            try:
                train = [math.nan if v is None else float(v) for v in obj["train"]]
                test = [math.nan if v is None else float(v) for v in obj.get("test") or []]
            except (TypeError, ValueError):
                raise IngestionError(f"{path}: line {line_no}: non-numeric values") from None
            raw[sid] = {"train": train, "test": test, "family": obj.get("family"),
                        "freq": obj.get("freq")}
    return _finish(raw, str(path))


def ingest(path, fmt: str | None = None) -> Corpus:
    """Read a corpus; ``fmt`` is csv or jsonl (inferred from the suffix if omitted)."""
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"{path}: no such file")
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    fmt = fmt.lower()
    if fmt == "csv":
        return read_csv(path)
    if fmt in ("jsonl", "json"):
        return read_jsonl(path)
    raise ValueError(f"unknown format {fmt!r}")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "value") and not isinstance(x, (str, bytes)):
        return x.value
    return x


def dumps(obj) -> str:
    """Deterministic compact JSON (non-finite floats become null)."""
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_jsonl(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")
