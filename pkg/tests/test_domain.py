import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvcanal.domain import (
    VACUOUS,
    IntervalBox,
    MixedRadixDomain,
    MultivaluedFunction,
    Network,
    ResourceLimitError,
    SubsetBox,
    iterate,
    slice_constant,
)

arities_st = st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple)


def test_encode_examples():
    d = MixedRadixDomain((3, 3))
    assert d.encode((0, 0)) == 0
    assert d.encode((2, 2)) == 8
    # position in lexicographic enumeration of all 12 points
    d = MixedRadixDomain((2, 3, 2))
    lex = list(itertools.product(range(2), range(3), range(2)))
    assert d.encode((1, 2, 0)) == lex.index((1, 2, 0)) == 10


def test_encode_rejects_out_of_range():
    d = MixedRadixDomain((3, 2))
    with pytest.raises(IndexError):
        d.encode((3, 0))
    with pytest.raises(ValueError):
        d.encode((1,))
    with pytest.raises(IndexError):
        d.decode(6)


@settings(max_examples=50)
@given(arities_st)
def test_round_trip(arities):
    d = MixedRadixDomain(arities)
    for idx, x in enumerate(d.points()):
        assert d.encode(x) == idx
        assert d.decode(idx) == x


def test_domain_validation():
    with pytest.raises(ValueError):
        MixedRadixDomain(())
    with pytest.raises(ValueError):
        MixedRadixDomain((3, 0))
    with pytest.raises(ResourceLimitError):
        MixedRadixDomain((2,) * 25)
    assert MixedRadixDomain((2,) * 25, max_points=2**25).size == 2**25
    assert MixedRadixDomain((3, 2, 1)).excess == 3


def test_iterate_examples():
    d = MixedRadixDomain((3, 3))
    assert len(list(iterate(d.full_box()))) == 9
    assert len(list(iterate(IntervalBox((1, 0), (2, 2))))) == 6
    assert list(iterate(SubsetBox((0b101, 0b010)))) == [(0, 1), (2, 1)]


@settings(max_examples=50)
@given(arities_st, st.data())
def test_iterate_visits_product_in_order(arities, data):
    masks = tuple(data.draw(st.integers(1, (1 << k) - 1)) for k in arities)
    box = SubsetBox(masks)
    d = MixedRadixDomain(arities)
    pts = list(iterate(box))
    assert len(pts) == len(set(pts)) == box.size
    idx = [d.encode(p) for p in pts]
    assert idx == sorted(idx)
    assert all(box.contains(p) for p in pts)


def test_interval_box_peel():
    box = IntervalBox((0, 0), (2, 1))
    assert box.peel(0, "min") == IntervalBox((1, 0), (2, 1))
    assert box.peel(0, "max") == IntervalBox((0, 0), (1, 1))
    with pytest.raises(ValueError):
        IntervalBox((0, 1), (0, 1)).peel(1, "min")
    with pytest.raises(ValueError):
        IntervalBox((2,), (1,))


def test_subset_box_remove():
    box = SubsetBox((0b111,))
    assert box.remove(0, 1).values(0) == [0, 2]
    with pytest.raises(ValueError):
        SubsetBox((0b100,)).remove(0, 2)
    with pytest.raises(ValueError):
        box.remove(0, 1).remove(0, 1)
    with pytest.raises(ValueError):
        SubsetBox((0,))


def test_slice_constant_examples():
    fmin = MultivaluedFunction.from_callable((3, 3), 3, min)
    box = fmin.domain.full_box()
    assert slice_constant(fmin, box, 0, 0) == 0
    assert slice_constant(fmin, box, 0, 1) is None
    const = MultivaluedFunction.constant((3, 2), 6, 5)
    assert slice_constant(const, const.domain.full_box(), 1, 1) == 5
    ce = MultivaluedFunction((3, 3), 3, [2, 0, 0, 1, 1, 1, 2, 0, 2])
    assert slice_constant(ce, ce.domain.full_box(), 0, 1) == 1
    with pytest.raises(IndexError):
        slice_constant(fmin, IntervalBox((1, 0), (2, 2)), 0, 0)


def test_vacuous_marker_is_falsy_singleton():
    assert not VACUOUS
    assert type(VACUOUS)() is VACUOUS


@settings(max_examples=100)
@given(arities_st, st.data())
def test_slice_constant_matches_naive_loop(arities, data):
    d = MixedRadixDomain(arities)
    vals = data.draw(st.lists(st.integers(0, 2), min_size=d.size, max_size=d.size))
    f = MultivaluedFunction(d, 3, vals)
    masks = tuple(data.draw(st.integers(1, (1 << k) - 1)) for k in arities)
    box = SubsetBox(masks)
    i = data.draw(st.integers(0, d.n - 1))
    a = data.draw(st.sampled_from(box.values(i)))
    seen = {f(x) for x in iterate(box) if x[i] == a}
    expected = seen.pop() if len(seen) == 1 else None
    assert slice_constant(f, box, i, a) == expected


def test_function_validation_and_immutability():
    with pytest.raises(ValueError):
        MultivaluedFunction((2, 2), 3, [0, 1, 2])
    with pytest.raises(ValueError):
        MultivaluedFunction((2,), 2, [0, 2])
    f = MultivaluedFunction((2,), 2, [0, 1])
    with pytest.raises(AttributeError):
        f.codomain = 3
    with pytest.raises(ValueError):
        f.values[0] = 1


def test_function_call_and_table_layout():
    f = MultivaluedFunction.from_callable((2, 3), 6, lambda x, y: 3 * x + y)
    assert f.values.tolist() == list(range(6))
    assert f(1, 2) == 5 and f((1, 2)) == 5
    assert f.table[1, 2] == 5


def test_json_round_trip():
    f = MultivaluedFunction((3, 2), 3, [0, 1, 2, 0, 1, 2])
    text = f.to_json()
    assert json.loads(text) == {"arities": [3, 2], "codomain": 3, "values": [0, 1, 2, 0, 1, 2]}
    g = MultivaluedFunction.from_json(text)
    assert g == f and hash(g) == hash(f)
    with pytest.raises(ValueError):
        MultivaluedFunction.from_dict({"arities": [2]})


def test_network():
    net = Network.identity((3, 2))
    assert net((2, 1)) == (2, 1)
    f = MultivaluedFunction.constant((3, 2), 2, 0)
    with pytest.raises(ValueError):
        Network(MixedRadixDomain((3, 2)), (f, f))
    with pytest.raises(ValueError):
        Network(MixedRadixDomain((3, 2)), (f,))


def test_values_dtype():
    f = MultivaluedFunction((2,), 2, np.array([1, 0], dtype=np.int8))
    assert f.values.dtype == np.int64
