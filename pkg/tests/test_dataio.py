import numpy as np
import pytest

from radiilab.dataio import (
    csv_body,
    format_value,
    parse_grid,
    parse_kv,
    parse_number,
    read_csv,
    read_measure,
    write_csv,
    write_measure,
)
from radiilab.errors import InputError
from radiilab.measures import build_cantor, middle_thirds


def test_float_formatting_round_trips():
    rng = np.random.default_rng(2)
    for value in rng.uniform(-1e6, 1e6, size=200):
        assert float(format_value(float(value))) == value
    for value in (1 / 3, 2.0**-52, 1e-300, np.pi):
        assert float(format_value(value)) == value


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    rows = [(0.1, 3, "monte-carlo"), (2.0**-12, -1, "exhaustive")]
    write_csv(path, ["a", "b", "mode"], rows, {"seed": 7})
    header, columns, got = read_csv(path)
    assert header["seed"] == "7"
    assert columns == ["a", "b", "mode"]
    assert float(got[0][0]) == 0.1 and got[1][2] == "exhaustive"
    assert float(got[1][0]) == 2.0**-12


def test_csv_body_strips_header(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["x"], [(1,)], {"created": "now"})
    assert csv_body(path) == "x\n1\n"


def test_measure_file_round_trip(tmp_path):
    m = build_cantor(middle_thirds(), 6)
    path = tmp_path / "m.csv"
    write_measure(path, m)
    back = read_measure(path)
    assert back.dimension == 1
    assert back.resolution == m.resolution
    np.testing.assert_array_equal(back.atoms, m.atoms)
    np.testing.assert_array_equal(back.masses, m.masses)


def test_parse_kv():
    text = "a = 1\n# comment\nspec.type = cantor\n\nb=x = y\n"
    kv = parse_kv(text)
    assert kv == {"a": "1", "spec.type": "cantor", "b": "x = y"}
    with pytest.raises(InputError):
        parse_kv("novalue\n")
    with pytest.raises(InputError):
        parse_kv("a = 1\na = 2\n")


def test_parse_number_conveniences():
    assert parse_number("2^-12") == 2.0**-12
    assert parse_number("1/8") == 0.125
    assert parse_number("-3.5e2") == -350.0
    with pytest.raises(InputError):
        parse_number("abc")


def test_parse_grid_geometric_and_list():
    grid = parse_grid("0.0625:0.0009765625:0.5")
    np.testing.assert_allclose(grid, [2.0**-k for k in range(4, 11)])
    assert parse_grid("1,2,3") == [1.0, 2.0, 3.0]
    assert parse_grid("2^-4, 2^-5") == [2.0**-4, 2.0**-5]
    with pytest.raises(InputError):
        parse_grid("1:2:0.5")  # never reaches its stop
