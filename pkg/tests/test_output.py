"""Testing CSV / JSON emission"""
import csv
import io

import numpy as np
import orjson
import pytest

from growthlab.output import (
    PLOT_HEADER,
    emit_plotdata,
    fmt,
    plotdata_csv,
    table,
    to_json,
    trajectory_csv,
)

TIMES = np.linspace(0.0, 10.0, 11)


def test_seventeen_significant_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1.0 / 3.0)) == 1.0 / 3.0
    assert fmt(np.int64(7)) == "7"
    assert fmt(True) == "True"


def test_trajectory_csv_header_and_rows(bgp):
    text = trajectory_csv(bgp.trajectory(TIMES))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "c", "k", "h", "u", "z", "lambda", "mu"]
    assert len(rows) == 12
    first = [float(v) for v in rows[1]]
    pin = bgp.pinned
    assert first[:5] == [0.0, pin.c0, pin.k0, pin.h0, pin.u0]


def test_trajectory_csv_provenance_column(two):
    text = trajectory_csv(two.trajectory([0.0, 1.0]), provenance=True)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][-1] == "provenance"
    assert rows[1][-1] == "two-integral"


def test_plotdata_cardinality(bgp):
    rows = emit_plotdata([bgp.trajectory(TIMES)], variables=("c", "k", "h"))
    assert len(rows) == 33
    assert {row[0] for row in rows} == {"bgp"}


def test_plotdata_distinguishes_series(bgp, two):
    rows = emit_plotdata({"bgp": bgp.trajectory(TIMES), "two": two.trajectory(TIMES)}, variables=("u",))
    assert {row[0] for row in rows} == {"bgp", "two"}
    assert len(rows) == 22


def test_plotdata_growth_rates(bgp, two, steady):
    rows = emit_plotdata([bgp.trajectory(TIMES)], variables=(), growth=("c",))
    values = [value for _, _, name, value in rows if name == "growth_c"]
    np.testing.assert_allclose(values, steady.g_star, rtol=1e-9)

    far = np.linspace(0.0, 1000.0, 101)
    rows = emit_plotdata([two.trajectory(far)], variables=(), growth=("u",))
    tail = [value for _, t, _, value in rows if t >= 900.0]
    assert max(abs(v) for v in tail) < 1e-4


def test_plotdata_needs_a_trajectory():
    with pytest.raises(ValueError):
        emit_plotdata([])


def test_plotdata_csv_header(bgp):
    text = plotdata_csv(emit_plotdata([bgp.trajectory([0.0, 1.0])], variables=("c",)))
    assert text.splitlines()[0] == ",".join(PLOT_HEADER)


def test_json_is_sorted_and_indented():
    data = to_json({"b": 1.5, "a": np.array([1.0, 2.0])})
    assert data.endswith(b"\n")
    assert data.index(b'"a"') < data.index(b'"b"')
    assert orjson.loads(data) == {"a": [1.0, 2.0], "b": 1.5}


def test_text_table():
    text = table([["z_star", 0.30827]], ["quantity", "value"])
    assert "quantity" in text and "z_star" in text
