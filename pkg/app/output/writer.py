# app/output/writer.py

import json
import sys
from fractions import Fraction
from typing import TextIO

import pandas as pd

from app.arith.ntheory import format_rat
from app.core.errors import UsageError
from app.output.schema import RunManifest

FORMATS = ("json", "jsonl", "csv")


def _default(obj):
    if isinstance(obj, Fraction):
        return format_rat(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    return json.dumps(obj, default=_default, indent=indent, separators=None if indent else (",", ":"))


class OutputWriter:
    """
    json: manifest line, then each record indented.
    jsonl: manifest line, then one compact record per line.
    csv: '# {manifest}' comment line, then a pandas table of the records.
    """

    def __init__(self, fmt: str = "jsonl", stream: TextIO | None = None):
        if fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}, got {fmt!r}")
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self.rows: list[dict] = []
        self.count = 0

    def manifest(self, m: RunManifest):
        line = dumps(m.to_json())
        self.stream.write(f"# {line}\n" if self.fmt == "csv" else f"{line}\n")

    def record(self, rec: dict):
        self.count += 1
        if self.fmt == "csv":
            self.rows.append(rec)
        elif self.fmt == "json":
            self.stream.write(dumps(rec, indent=2) + "\n")
        else:
            self.stream.write(dumps(rec) + "\n")
            self.stream.flush()

    def close(self):
        if self.fmt != "csv" or not self.rows:
            return
        # nested cells are written as compact JSON
        flat = [
            {k: dumps(v) if isinstance(v, (dict, list, tuple)) else v for k, v in r.items()}
            for r in self.rows
        ]
        pd.DataFrame(flat).to_csv(self.stream, index=False, lineterminator="\n")
        self.rows = []
