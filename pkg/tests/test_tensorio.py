import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewrank.errors import InvariantError
from skewrank.tensorio import ParseError, digest, dump_tensor, format_rational, parse_rational, parse_tensor

from strategies import multivectors


@given(st.data())
def test_round_trip(data):
    n = data.draw(st.integers(2, 7))
    t = data.draw(multivectors(n=n, grade=data.draw(st.integers(1, n))))
    if not t:
        return
    assert parse_tensor(dump_tensor(t)) == t


@given(st.fractions(max_denominator=1000))
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_rational_forms():
    assert parse_rational("-2/4") == Fraction(-1, 2)
    assert parse_rational(" 7 ") == 7
    assert format_rational(Fraction(6, 3)) == "2"
    for bad in ("1.5", "1/0", "x", 1.5, True, None):
        with pytest.raises(ParseError):
            parse_rational(bad)


def doc(**over):
    base = {"n": 5, "k": 2, "terms": [{"coeff": "1", "indices": [1, 2]}]}
    base.update(over)
    return json.dumps(base)


@pytest.mark.parametrize(
    "text",
    ["not json", "[1, 2]", doc(n="5"), doc(terms={}), doc(terms=[{"coeff": "1"}]), doc(terms=[{"coeff": "1", "indices": "12"}])],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_tensor(text)


@pytest.mark.parametrize(
    "terms",
    [
        [{"coeff": "1", "indices": [2, 1]}],
        [{"coeff": "1", "indices": [1, 2]}, {"coeff": "3", "indices": [1, 2]}],
        [{"coeff": "1", "indices": [1, 6]}],
        [{"coeff": "1", "indices": [1, 2, 3]}],
        [{"coeff": "0", "indices": [1, 2]}],
        [],
    ],
)
def test_invariant_errors(terms):
    with pytest.raises(InvariantError):
        parse_tensor(doc(terms=terms))


def test_digest_is_canonical():
    a = parse_tensor(doc(terms=[{"coeff": "1", "indices": [1, 2]}, {"coeff": "2/4", "indices": [3, 4]}]))
    b = parse_tensor(doc(terms=[{"coeff": "1/2", "indices": [3, 4]}, {"coeff": "1", "indices": [1, 2]}]))
    assert digest(a) == digest(b)
    assert digest(a) != digest(a.scale(2))
