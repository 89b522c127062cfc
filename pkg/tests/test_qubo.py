import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iqls.encoding import SearchBox, decode, make_encoding
from iqls.exceptions import InvalidArgumentError, QuboFormatError
from iqls.linalg import Dataset, gram, sse
from iqls.qubo import Qubo, build_qubo, energy, export_qubo, import_qubo


def _build(X, y, lo, hi, m):
    ds = Dataset(X, y)
    enc = make_encoding(SearchBox.from_bounds(lo, hi), m)
    return ds, enc, build_qubo(gram(ds), enc)


def test_single_weight_example():
    # (2 - 3b)^2 = 4 - 12b + 9b^2 -> 4 - 3b
    _, _, q = _build([[1]], [2], [0], [3], 1)
    assert q.offset == 4
    np.testing.assert_array_equal(q.linear, [-3])
    assert q.quadratic_terms() == {}


def test_two_weight_example():
    # (b1 + b2)^2 = b1 + b2 + 2 b1 b2
    _, _, q = _build([[1, 1]], [0], [0, 0], [1, 1], 1)
    assert q.offset == 0
    np.testing.assert_array_equal(q.linear, [1, 1])
    assert q.quadratic_terms() == {(0, 1): 2.0}


def test_duplicate_rows_double_coefficient():
    _, _, q = _build([[1], [1]], [0, 0], [0], [1], 1)
    assert q.offset == 0
    np.testing.assert_array_equal(q.linear, [2])
    assert q.quadratic_terms() == {}


def test_energy_examples():
    q = Qubo.from_terms(1, 4.0, [-3.0], {})
    assert energy(q, [1]) == 1
    assert energy(q, [0]) == 4
    q = Qubo.from_terms(2, 0.0, [1.0, 1.0], {(0, 1): 2.0})
    assert energy(q, [1, 1]) == 4
    assert energy(q, [0, 0]) == q.offset


def test_energy_rejects_wrong_length():
    q = Qubo.from_terms(2, 0.0, [1.0, 1.0], {})
    with pytest.raises(InvalidArgumentError):
        energy(q, [1])
    with pytest.raises(InvalidArgumentError):
        energy(q, [1, 3])


def test_dimension_mismatch():
    gc = gram(Dataset([[1, 2]], [1]))
    enc = make_encoding(SearchBox.uniform(0, 1, 3), 2)
    with pytest.raises(InvalidArgumentError):
        build_qubo(gc, enc)


def test_rejects_lower_triangle():
    with pytest.raises(InvalidArgumentError):
        Qubo(0.0, [0.0, 0.0], [[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(InvalidArgumentError):
        Qubo(0.0, [0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(InvalidArgumentError):
        Qubo.from_terms(2, 0.0, [0, 0], {(1, 0): 1.0})


def _random_instance(rng):
    n = int(rng.integers(1, 11))
    d = int(rng.integers(1, 4))
    m = int(rng.integers(1, 4))
    X = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
    y = rng.normal(size=n) * rng.uniform(0.1, 10)
    lo = rng.uniform(-10, 10, d)
    hi = lo + rng.uniform(0.01, 20, d)
    return _build(X, y, lo, hi, m)


def test_identity_on_every_assignment(rng):
    for _ in range(60):
        ds, enc, q = _random_instance(rng)
        for bits in itertools.product([0, 1], repeat=enc.num_vars):
            direct = sse(ds, decode(enc, bits))
            assert abs(energy(q, bits) - direct) <= 1e-9 * (1 + direct)


def test_energy_argmin_equals_sse_argmin(rng):
    for _ in range(40):
        ds, enc, q = _random_instance(rng)
        assignments = list(itertools.product([0, 1], repeat=enc.num_vars))
        e = np.array([energy(q, b) for b in assignments])
        s = np.array([sse(ds, decode(enc, b)) for b in assignments])
        tol = 1e-9 * (1 + s.min())
        e_set = set(np.flatnonzero(e <= e.min() + 2 * tol))
        s_set = set(np.flatnonzero(s <= s.min() + 2 * tol))
        assert int(np.argmin(e)) in s_set
        assert int(np.argmin(s)) in e_set


def test_build_uses_no_sample_rows():
    ds, enc, q = _build(np.ones((5, 2)), np.arange(5.0), [0, 0], [1, 1], 2)
    gc = gram(ds)
    assert build_qubo(gc, enc) == q


def _random_qubo(rng, n):
    quad = np.triu(rng.normal(size=(n, n)), k=1)
    quad[rng.random((n, n)) < 0.3] = 0.0
    lin = rng.normal(size=n)
    lin[rng.random(n) < 0.2] = 0.0
    return Qubo(float(rng.normal() * 1e3), lin * 10 ** rng.uniform(-8, 8, n), quad)


def test_export_example():
    doc = json.loads(export_qubo(Qubo.from_terms(1, 4.0, [-3.0], {})))
    assert doc["num_vars"] == 1
    assert doc["offset"] == 4
    assert doc["linear"] == [[0, -3.0]]
    assert doc["quadratic"] == []
    assert doc["version"] == 1


def test_export_roundtrip_random(rng):
    for n in range(1, 25):
        q = _random_qubo(rng, n)
        assert import_qubo(export_qubo(q)) == q


@given(st.integers(1, 6), st.data())
def test_export_roundtrip_any_floats(n, data):
    floats = st.floats(allow_nan=False, allow_infinity=False)
    lin = data.draw(st.lists(floats, min_size=n, max_size=n))
    quad = np.zeros((n, n))
    for r, s in itertools.combinations(range(n), 2):
        quad[r, s] = data.draw(floats)
    q = Qubo(data.draw(floats), lin, quad)
    back = import_qubo(export_qubo(q))
    assert back == q


def _doc(**overrides):
    doc = {"format": "iqls-qubo", "version": 1, "num_vars": 2, "offset": 0.0,
           "linear": [[0, 1.0]], "quadratic": [[0, 1, 2.0]]}
    doc.update(overrides)
    return json.dumps(doc)


@pytest.mark.parametrize(
    "overrides, field, message",
    [
        ({"quadratic": [[1, 0, 1.0]]}, "quadratic[0]", "unordered pair"),
        ({"quadratic": [[1, 1, 1.0]]}, "quadratic[0]", "unordered pair"),
        ({"linear": [[5, 1.0]]}, "linear[0]", "index out of range"),
        ({"quadratic": [[0, 2, 1.0]]}, "quadratic[0]", "index out of range"),
        ({"linear": [[0, 1.0], [0, 2.0]]}, "linear[1]", "duplicate"),
        ({"quadratic": [[0, 1, 1.0], [0, 1, 1.0]]}, "quadratic[1]", "duplicate"),
        ({"version": 2}, "version", "unknown version"),
        ({"format": "other"}, "format", "unknown format"),
        ({"num_vars": 0}, "num_vars", "positive integer"),
        ({"offset": "x"}, "offset", "number"),
        ({"linear": [[0]]}, "linear[0]", "expected"),
    ],
)
def test_import_errors(overrides, field, message):
    with pytest.raises(QuboFormatError, match=message) as info:
        import_qubo(_doc(**overrides))
    assert info.value.field == field


def test_import_missing_field_and_bad_json():
    doc = json.loads(_doc())
    del doc["quadratic"]
    with pytest.raises(QuboFormatError, match="quadratic"):
        import_qubo(doc)
    with pytest.raises(QuboFormatError, match="JSON"):
        import_qubo("{not json")
