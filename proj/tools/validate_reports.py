#!/usr/bin/env python3
"""Validate benchmark reports (trace.csv, summary.json, metadata.json) against schemas/."""

import argparse
import csv
import json
import pathlib
import sys

import jsonschema

TRACE_COLUMNS = ["rule", "epsilon", "t", "lambda", "checkpoint_pass", "n_active", "p", "gap",
                 "radius", "elapsed_ms"]
INT_COLUMNS = {"t", "checkpoint_pass", "n_active", "p"}


def load_schema(schemas, name):
    return json.loads((schemas / name).read_text(encoding="utf-8"))


def typed_row(row):
    out = {}
    for key, value in row.items():
        if key == "rule":
            out[key] = value
        elif key in INT_COLUMNS:
            out[key] = int(value)
        else:
            out[key] = float(value)
    return out


def check_trace(path, schema):
    raw = path.read_bytes()
    if b"\r" in raw:
        raise ValueError(f"{path}: CRLF line endings")
    raw.decode("utf-8")
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != TRACE_COLUMNS:
            raise ValueError(f"{path}: header {reader.fieldnames} != {TRACE_COLUMNS}")
        rows = [typed_row(r) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no rows")
    validator = jsonschema.Draft202012Validator(schema)
    last = {}
    for i, row in enumerate(rows, start=2):
        validator.validate(row)
        if row["n_active"] > row["p"]:
            raise ValueError(f"{path}:{i}: n_active > p")
        key = (row["rule"], row["epsilon"], row["t"])
        if key in last and row["n_active"] > last[key]:
            raise ValueError(f"{path}:{i}: n_active increased within a solve")
        last[key] = row["n_active"]
    return len(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report_dir", type=pathlib.Path)
    ap.add_argument("--schemas", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent / "schemas")
    args = ap.parse_args()

    n_rows = check_trace(args.report_dir / "trace.csv",
                         load_schema(args.schemas, "trace_row.schema.json"))
    for name in ("summary", "metadata"):
        path = args.report_dir / f"{name}.json"
        if b"\r" in path.read_bytes():
            raise ValueError(f"{path}: CRLF line endings")
        doc = json.loads(path.read_text(encoding="utf-8"))
        jsonschema.Draft202012Validator(load_schema(args.schemas, f"{name}.schema.json")).validate(doc)
    print(f"reports valid ({n_rows} trace rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
