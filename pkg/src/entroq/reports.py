"""NDJSON and CSV report files."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .harness import ExperimentReport

NDJSON_NAME = "report.ndjson"
CSV_NAME = "summary.csv"


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return _clean(v.item())
    return v


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "nan"
    return str(v)


def csv_text(records: Sequence[ExperimentReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ExperimentReport.CSV_FIELDS)
    for r in records:
        w.writerow([_fmt(getattr(r, f)) for f in ExperimentReport.CSV_FIELDS])
    if records:
        passed = sum(r.passed for r in records)
        buf.write(f"# pass_rate,{passed}/{len(records)},{passed / len(records)!r}\n")
    return buf.getvalue()


def ndjson_text(records: Iterable[ExperimentReport]) -> str:
    return "".join(json.dumps(_clean(r.to_dict()), sort_keys=True) + "\n" for r in records)


def emit_report(records: Sequence[ExperimentReport], path) -> tuple[Path, Path]:
    """Write ``report.ndjson`` and ``summary.csv`` into directory ``path``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    nd, cs = out / NDJSON_NAME, out / CSV_NAME
    nd.write_text(ndjson_text(records), encoding="utf-8")
    cs.write_text(csv_text(records), encoding="utf-8")
    return nd, cs


def _parse(field: str, raw: str):
    if field in ("trial", "seed"):
        return int(raw)
    if field == "passed":
        return raw == "true"
    if field in ("scenario", "status"):
        return raw
    return float(raw)


def read_csv(path) -> list[dict]:
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(lines))
    return [{k: _parse(k, v) for k, v in row.items()} for row in rows]


def read_ndjson(path) -> list[ExperimentReport]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        for k in ("t", "epsilon_target", "delta_measured", "bound_value"):
            if d[k] is None:
                d[k] = math.nan
        out.append(ExperimentReport(**d))
    return out


def write_table(rows: Sequence[dict], path, columns: Sequence[str]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if row[c] is None else _fmt(row[c]) for c in columns])
    p.write_text(buf.getvalue(), encoding="utf-8")
    return p
