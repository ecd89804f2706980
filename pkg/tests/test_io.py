import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rzchart.errors import ConfigError, DataError
from rzchart.io import (format_number, load_config, parse_subgroups_csv, read_echo, read_series_csv,
                        render_subgroups, render_table)

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite)
def test_number_round_trip(x):
    s = format_number(x)
    assert float(s) == x


@pytest.mark.parametrize("x,expected", [(0.9723581990603313, "0.9723581990603313"), (0.25, "0.2500000"),
                                        (200.0, "200.0000"), (7, "7"), (float("inf"), "inf")])
def test_number_format(x, expected):
    assert format_number(x) == expected


def test_seven_significant_digits_minimum():
    digits = format_number(1.5).replace(".", "")
    assert len(digits) >= 7


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=3), st.integers(1, 4))
def test_subgroup_csv_round_trip(pairs, m):
    data = np.array([pairs] * m)
    samples, back = parse_subgroups_csv(render_subgroups(range(1, m + 1), data, {"seed": 1}))
    assert samples == list(range(1, m + 1))
    np.testing.assert_array_equal(back, data)


@pytest.mark.parametrize("text,match", [
    ("a,b,c,d\n1,1,1,1\n", "header"),
    ("sample,obs_index,x,y\n", "no data"),
    ("sample,obs_index,x,y\n1,1,1,1\n1,2,1,1\n2,1,1,1\n", "not constant"),
    ("sample,obs_index,x,y\n1,2,1,1\n", "obs_index"),
    ("sample,obs_index,x,y\n1,1,abc,1\n", "not a number"),
    ("sample,obs_index,x,y\n1,1,nan,1\n", "non-finite"),
    ("sample,obs_index,x,y\n1,1,1,1\n2,1,1,1\n1,2,1,1\n", "contiguous"),
    ("sample,obs_index,x,y\n1,1,1\n", "expected 4"),
])
def test_subgroup_csv_errors(text, match):
    with pytest.raises(DataError, match=match):
        parse_subgroups_csv(text)


def test_comments_and_echo():
    text = render_table(["a", "b"], [[1, 0.5]], {"alpha": 0.005, "phi": [0.1, 0.2], "note": None})
    assert read_echo(text) == {"alpha": "0.005000000", "phi": "0.1000000 0.2000000", "note": "none"}
    samples, data = parse_subgroups_csv("# comment\nsample,obs_index,x,y\n# mid\n3,1,1.5,2\n")
    assert samples == [3] and data.shape == (1, 1, 2)


def test_series_csv(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("# phase I\nt,x,y\n1,1.0,2.0\n2,1.5,2.5\n3,0.5,1.5\n")
    series = read_series_csv(path)
    assert series.T == 3
    path.write_text("x,y\n1,2\n")
    with pytest.raises(DataError):
        read_series_csv(path)


def test_config_sections(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[defaults]\nalpha = 0.01\nn = 5\n\n[design]\nn = 7\ngamma-x = 0.1\n")
    assert load_config(path, "design") == {"alpha": "0.01", "n": "7", "gamma_x": "0.1"}
    assert load_config(path, "arl") == {"alpha": "0.01", "n": "5"}
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini", "design")
    bad = tmp_path / "bad.ini"
    bad.write_text("no section\n")
    with pytest.raises(ConfigError):
        load_config(bad, "design")
