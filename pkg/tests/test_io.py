import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdiv import channels as ch
from qdiv import io
from qdiv.states import DivergenceResult, PositiveFunctional

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12)


@given(finite)
def test_format_float_keeps_twelve_digits(x):
    y = io.format_float(x)
    assert y == pytest.approx(x, rel=1e-11, abs=1e-300)
    assert y == float(f"{x:.12g}")


def test_format_float_specials():
    assert io.format_float(np.inf) == "inf"
    assert io.format_float(-np.inf) == "-inf"
    assert io.format_float(np.nan) == "nan"
    assert str(io.format_float(-0.0)) == "0.0"


def test_matrix_round_trip():
    m = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    back = io.matrix_from_json(json.loads(json.dumps(io.matrix_to_json(m))))
    assert np.allclose(back, m)


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 2, "data": [[1, 0]]},
    {"rows": 1, "cols": 1},
    {"rows": 1, "cols": 1, "data": [["x", 0]]},
    [1, 2, 3],
])
def test_matrix_format_errors(bad):
    with pytest.raises(io.FormatError):
        io.matrix_from_json(bad)


def test_functional_round_trip_and_shorthand():
    phi = PositiveFunctional([np.diag([0.2, 0.3]), np.array([[0.5]])])
    back = io.functional_from_json(io.functional_to_json(phi))
    assert back.block_dims == [2, 1]
    single = io.functional_from_json(io.matrix_to_json(np.eye(2) / 2))
    assert single.block_dims == [2]


def test_channel_round_trip():
    s = ch.random_channel(1, 2, 3)
    back = io.channel_from_json(json.loads(json.dumps(io.channel_to_json(s))))
    assert np.allclose(back.choi(), s.choi(), atol=1e-11)
    with pytest.raises(io.FormatError):
        io.channel_from_json({"dim": 3, "kraus": io.channel_to_json(s)["kraus"]})
    with pytest.raises(io.FormatError):
        io.channel_from_json({"kraus": []})


def test_result_serialisation_is_sorted_and_stable():
    res = DivergenceResult(np.inf, "infinite", [(1e-2, 1.5)], "regularized", {"slope": 0.5, "flag": np.bool_(True)})
    d = io.result_to_dict(res)
    assert d["value"] == "inf" and d["slope"] == 0.5 and d["flag"] is True
    assert io.dumps(d) == io.dumps(io.result_to_dict(res))
    assert list(json.loads(io.dumps(d))) == sorted(d)


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(io.FormatError):
        io.load_json(p)
    with pytest.raises(io.FormatError):
        io.load_json(tmp_path / "missing.json")
