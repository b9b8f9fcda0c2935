"""Tests for the CSV, JSON, gnuplot and table writers."""

import csv
import json

import numpy as np
import pytest

from ringbif.tools.export import (
    format_number,
    format_table,
    records_to_rows,
    to_json,
    write_csv,
    write_gnuplot,
    write_json,
)


class TestJson:
    def test_numpy_values(self):
        data = {"a": np.int64(3), "b": np.array([1.5, 2.0]), "c": np.bool_(True), "d": 1 + 2j}
        parsed = json.loads(to_json(data))
        assert parsed == {"a": 3, "b": [1.5, 2.0], "c": True, "d": {"re": 1.0, "im": 2.0}}

    def test_floats_round_trip(self):
        value = 0.1 + 0.2
        assert json.loads(to_json({"v": value}))["v"] == value

    def test_write_creates_parent(self, tmp_path):
        path = write_json(tmp_path / "out" / "report.json", {"ok": True})
        assert json.loads(path.read_text()) == {"ok": True}


class TestCsv:
    def test_cells(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", ["k", "nu", "eta"], [[1, 1 / 3, None]])
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["k", "nu", "eta"]
        assert rows[1] == ["1", repr(1 / 3), ""]
        assert float(rows[1][1]) == 1 / 3

    def test_records_to_rows(self):
        records = [{"k": 1, "nu": 2.0}, {"k": 2}]
        assert records_to_rows(records, ["k", "nu"]) == [[1, 2.0], [2, None]]


class TestGnuplot:
    def test_script(self, tmp_path):
        script = write_gnuplot(
            tmp_path / "plot.gp", tmp_path / "data.csv", "nu", ["det"], ["k", "nu", "det"], title="det m_2"
        )
        text = script.read_text()
        assert "'data.csv' using 2:3 with linespoints" in text
        assert "set title 'det m_2'" in text
        assert "set datafile separator ','" in text

    def test_png_output(self, tmp_path):
        script = write_gnuplot(tmp_path / "p.gp", "d.csv", "t", ["x0", "y0"], ["t", "x0", "y0"], output="p.png")
        text = script.read_text()
        assert "set output 'p.png'" in text
        assert "using 1:3" in text

    def test_missing_column(self, tmp_path):
        with pytest.raises(ValueError, match="columns not in the CSV: eta"):
            write_gnuplot(tmp_path / "p.gp", "d.csv", "nu", ["eta"], ["k", "nu"])


class TestFormatting:
    def test_numbers(self):
        assert format_number(None) == "-"
        assert format_number(True) == "true"
        assert format_number(np.int32(7)) == "7"
        assert format_number(1.0 / 3.0) == "0.33333333"
        assert format_number(float("-inf")) == "-inf"
        assert format_number(1.5 - 2j) == "1.5-2i"
        assert format_number("Z5(2)") == "Z5(2)"

    def test_table_alignment(self):
        table = format_table(["k", "nu"], [[1, 1.5], [10, 2.0]])
        lines = table.splitlines()
        assert len(lines) == 4
        assert len({len(line) for line in lines}) == 1
        assert lines[0].split() == ["k", "nu"]
        assert lines[3].split() == ["10", "2"]
