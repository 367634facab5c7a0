import math

import numpy as np
import pytest

from ftrfade.tables import CurveTable


def make_table():
    rows = [[0.1, 1 / 3, "closed"], [math.pi, 2.0**-1074, "quadrature"], [1e300, math.nan, "closed"]]
    return CurveTable(["x", "y", "path"], rows, {"m": "2.5", "seed": "7"})


def test_arity_check():
    with pytest.raises(ValueError):
        CurveTable(["a", "b"], [[1.0]])


def test_csv_round_trip_is_bit_exact():
    t = make_table()
    back = CurveTable.from_csv(t.to_csv())
    assert back.columns == t.columns
    assert back.metadata == t.metadata
    for r0, r1 in zip(t.rows, back.rows):
        for a, b in zip(r0, r1):
            if isinstance(a, str):
                assert a == b
            else:
                assert np.float64(a).tobytes() == np.float64(b).tobytes()


def test_csv_layout():
    text = make_table().to_csv()
    lines = text.splitlines()
    assert lines[0] == "# m=2.5" and lines[1] == "# seed=7"
    assert lines[2] == "x,y,path"
    assert lines[3].startswith("0.10000000000000001,")


def test_json_round_trip():
    t = CurveTable(["x", "y"], [[0.1, 1 / 3], [2.0, 1e-300]], {"k": 4})
    back = CurveTable.from_json(t.to_json())
    assert back.rows == t.rows
    assert back.metadata == {"k": "4"}


def test_column_accessor():
    t = make_table()
    np.testing.assert_array_equal(t.column("x"), [0.1, math.pi, 1e300])
    assert t.column("path")[1] == "quadrature"


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        make_table().render("xml")
