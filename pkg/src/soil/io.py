"""CSV ingestion and JSON/CSV report emission."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import MissingColumn, NonBinaryResponse, ParseError
from .fitting import Dataset

SCHEMA_VERSION = 1
MISSING_TOKENS = {"", "na", "nan", "null", "none", "?"}


def _parse_float(text, row, col):
    if text.strip().lower() in MISSING_TOKENS:
        raise ParseError(row, col, f"missing value {text!r}")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(row, col, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(row, col, f"non-finite value {text!r}")
    return value


def load_dataset(path, response_column, task="regression"):
    """Read a header-row CSV; every non-response column becomes a predictor.

    Row numbers in errors count data rows from 1 (the header is row 0).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(0, None, "empty file") from None
        if response_column not in header:
            raise MissingColumn(f"response column {response_column!r} not in header")
        rows = []
        for i, raw in enumerate(reader, start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise ParseError(i, None, f"expected {len(header)} fields, found {len(raw)}")
            rows.append([_parse_float(c, i, header[j]) for j, c in enumerate(raw)])
    table = np.array(rows, dtype=float).reshape(len(rows), len(header))
    yi = header.index(response_column)
    y = table[:, yi]
    if task == "classification":
        bad = np.flatnonzero((y != 0) & (y != 1))
        if bad.size:
            raise NonBinaryResponse(f"row {bad[0] + 1}: response {y[bad[0]]:g} is not 0/1")
    keep = [j for j in range(len(header)) if j != yi]
    return Dataset(table[:, keep], y, task, tuple(header[j] for j in keep))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def importance_report(names, importances, config, seed, selection=(), se=None, extra=None):
    """Report dict: ``{schema_version, meta, importance, selection}``.

    ``importances`` maps method -> p-vector; ``se`` optionally likewise.
    """
    rows = []
    for method, values in importances.items():
        for j, name in enumerate(names):
            row = {"name": name, "method": method, "value": float(values[j])}
            if se is not None:
                row["se"] = float(se[method][j])
            rows.append(row)
    report = {
        "schema_version": SCHEMA_VERSION,
        "meta": {"seed": seed, "config": config},
        "importance": rows,
        "selection": list(selection),
    }
    if extra:
        report.update(extra)
    return _clean(report)


def study_report(result, config, seed):
    selection = []
    for method in result.methods:
        for c, stats in result.selection_stats.get(method, {}).items():
            selection.append({"method": method, "threshold": c, **stats})
    extra = {
        "summary": {
            "replications": result.replications,
            "true_support": [result.names[j] for j in result.true_support] if result.true_support is not None else None,
            "truth_in_candidates": float(np.mean(result.truth_in_candidates)),
            "true_model_top_weight": {m: float(np.mean(v)) for m, v in result.top_is_truth.items()},
            "weighted_symdiff": {m: float(np.mean(v)) for m, v in result.weighted_symdiff.items()},
        }
    }
    return importance_report(result.names, result.mean_importance, config, seed, selection,
                             se=result.se_importance, extra=extra)


def format_number(x):
    return "%.17g" % x


def report_to_csv(report):
    buf = io.StringIO()
    rows = report["importance"]
    has_se = any("se" in r for r in rows)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "name", "value"] + (["se"] if has_se else []))
    for r in rows:
        line = [r["method"], r["name"], format_number(r["value"])]
        if has_se:
            line.append(format_number(r["se"]))
        writer.writerow(line)
    return buf.getvalue()


def report_to_json(report):
    # repr-based float encoding round-trips exactly
    return json.dumps(report, indent=2) + "\n"


def write_report(report, path, fmt="json"):
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def read_report(path):
    with open(path) as fh:
        return json.load(fh)
