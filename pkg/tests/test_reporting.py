import json
import math
from fractions import Fraction

import numpy as np
import pytest

from cesaro.reporting import (
    SequenceFormatError,
    format_float,
    parse_sequence,
    rows_to_csv,
    sequence_to_json_value,
    to_json,
)
from cesaro.sequence import Mode, Sequence


def test_float_format_roundtrips():
    for v in (0.1, 1 / 3, -2.5e-300, 1e22, math.pi):
        assert float(format_float(v)) == v
    assert format_float(math.inf) == "inf"
    assert format_float(float("nan")) == "nan"


def test_json_values():
    doc = {"a": Fraction(1, 3), "b": 1 + 2j, "c": math.inf, "d": [True, None], "e": np.float64(0.5)}
    text = to_json(doc)
    assert text == '{"a": "1/3", "b": [1, 2], "c": "inf", "d": [true, null], "e": 0.5}\n'
    assert json.loads(text)["a"] == "1/3"


def test_json_is_byte_stable():
    x = Sequence(np.random.default_rng(0).uniform(-1, 1, 50))
    assert to_json({"x": x}) == to_json({"x": Sequence(x.coords.copy())})


def test_sequence_json_values():
    assert sequence_to_json_value(Sequence.of([1, 2])) == [1.0, 2.0]
    assert sequence_to_json_value(Sequence.of([1j])) == [1j]
    assert sequence_to_json_value(Sequence.of([Fraction(1, 2)], Mode.EXACT)) == ["1/2"]


def test_csv_rows():
    assert rows_to_csv(["n", "v"], [(0, Fraction(1, 2)), (1, 0.25)]) == "n,v\n0,1/2\n1,0.25\n"


def test_parse_sequence_forms():
    assert np.array_equal(parse_sequence("[1, 2.5, -3]").coords, [1, 2.5, -3])
    assert np.array_equal(parse_sequence("[[1, 2], [0, -1]]").coords, [1 + 2j, -1j])
    assert np.allclose(parse_sequence('["1/3", 1]').coords, [1 / 3, 1])
    ex = parse_sequence('["1/3", 0.2, 4]', Mode.EXACT)
    assert ex.coords == (Fraction(1, 3), Fraction(1, 5), 4)


@pytest.mark.parametrize("text", ["", "{}", "[]", "[1, [1]]", '["x"]', "[true]", "[1, 2"])
def test_parse_sequence_errors(text):
    with pytest.raises(SequenceFormatError):
        parse_sequence(text)


def test_exact_mode_rejects_complex_entries():
    with pytest.raises(SequenceFormatError):
        parse_sequence("[[1, 2]]", Mode.EXACT)
    assert parse_sequence("[[1, 0]]", Mode.EXACT).coords == (1,)
