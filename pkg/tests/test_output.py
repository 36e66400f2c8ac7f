import io
import json
from fractions import Fraction

import pytest

from app.core.errors import UsageError
from app.output.schema import make_manifest
from app.output.writer import OutputWriter


def test_manifest_pinned_timestamp_and_seed():
    m = make_manifest("descent", {"roots": "0,5,-5"}, timestamp="T0", seed=3)
    js = m.to_json()
    assert js["schema"] == "ntkit/1"
    assert js["timestamp"] == "T0"
    assert js["seed"] == 3
    assert list(js) == ["schema", "command", "params", "version", "timestamp", "seed"]


def test_jsonl_writer_serializes_fractions():
    buf = io.StringIO()
    w = OutputWriter("jsonl", buf)
    w.manifest(make_manifest("curve", {}, timestamp="T0"))
    w.record({"x": Fraction(3, 8), "pair": (1, -1)})
    w.close()
    lines = buf.getvalue().splitlines()
    assert json.loads(lines[1]) == {"x": "3/8", "pair": [1, -1]}
    assert w.count == 1


def test_csv_writer_flattens_nested_cells():
    buf = io.StringIO()
    w = OutputWriter("csv", buf)
    w.manifest(make_manifest("family", {}, timestamp="T0"))
    w.record({"m": 7, "e": [0, 840, 1680]})
    w.close()
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "m,e"
    assert lines[2] == '7,"[0,840,1680]"'


def test_unknown_format():
    with pytest.raises(UsageError):
        OutputWriter("xml")
