import itertools
import random

import pytest

from mvcanal.booleanize import (
    BooleanNcStep,
    PartialBooleanFunction,
    VanHamCodec,
    booleanize,
    booleanize_function,
    is_nc_partial,
    transport_witness,
    verify_boolean_nc,
)
from mvcanal.canalization import SncStep, SncWitness, WitnessError, generate_snc, is_snc
from mvcanal.domain import MixedRadixDomain, MultivaluedFunction, Network, ResourceLimitError

COUNTEREXAMPLE = MultivaluedFunction((3, 3), 3, [2, 0, 0, 1, 1, 1, 2, 0, 2])


def test_encode_examples():
    c = VanHamCodec((3, 3))
    assert c.k == 4
    assert c.encode((2, 1)) == (1, 1, 1, 0)
    assert c.encode((0, 0)) == (0, 0, 0, 0)
    b = VanHamCodec((2, 2, 2))
    for x in itertools.product(range(2), repeat=3):
        assert b.encode(x) == x


def test_admissibility():
    c = VanHamCodec((3,))
    assert not c.is_admissible((0, 1))
    blocks = [y for y in itertools.product(range(2), repeat=2) if c.is_admissible(y)]
    assert blocks == [(0, 0), (1, 0), (1, 1)]
    with pytest.raises(ValueError):
        c.decode((0, 1))
    with pytest.raises(ValueError):
        c.is_admissible((0, 1, 1))


def test_decode_round_trip_and_injective():
    c = VanHamCodec((3, 2, 4))
    images = set()
    for x in c.domain.points():
        y = c.encode(x)
        assert c.decode(y) == x
        images.add(y)
    assert len(images) == c.domain.size
    assert sorted(images, key=c.bits_to_index) == c.admissible_points()


def test_bit_positions():
    c = VanHamCodec((3, 2, 3))
    assert [c.bit(0, 1), c.bit(0, 2), c.bit(1, 1), c.bit(2, 1), c.bit(2, 2)] == [0, 1, 2, 3, 4]
    assert [c.bit_label(p) for p in range(5)] == [(0, 1), (0, 2), (1, 1), (2, 1), (2, 2)]
    with pytest.raises(IndexError):
        c.bit(1, 2)


def _grid(g, codec):
    """Components as tables indexed by (x, y) with labels 00, 10, 11."""
    return [[g(codec.encode((x, y))) for y in range(3)] for x in range(3)]


def test_counterexample_booleanization_tables():
    comps = booleanize_function(COUNTEREXAMPLE)
    codec = VanHamCodec((3, 3))
    assert _grid(comps[1], codec) == [[1, 0, 0], [1, 1, 1], [1, 0, 1]]
    assert _grid(comps[2], codec) == [[1, 0, 0], [0, 0, 0], [1, 0, 1]]
    assert is_nc_partial(comps[1]) is not None
    assert is_nc_partial(comps[2]) is None


def test_constant_partial_function_is_nc():
    g = PartialBooleanFunction(3, [(0, 0, 0), (1, 0, 0), (1, 1, 0)], [1, 1, 1])
    w = is_nc_partial(g)
    assert w is not None and verify_boolean_nc(g, w)
    assert len(w) == 3


def test_partial_function_validation():
    with pytest.raises(ValueError):
        PartialBooleanFunction(2, [], [])
    with pytest.raises(ValueError):
        PartialBooleanFunction(2, [(0, 0), (0, 0)], [0, 1])
    with pytest.raises(ValueError):
        PartialBooleanFunction(2, [(0, 2)], [0])
    with pytest.raises(ValueError):
        PartialBooleanFunction(2, [(0, 1)], [2])
    g = PartialBooleanFunction(2, [(1, 1), (0, 0)], [1, 0])
    assert g.points == ((0, 0), (1, 1))
    assert g.to_dict()["admissible"] == [0, 3]


def test_is_nc_partial_guard():
    g = PartialBooleanFunction(30, [(0,) * 30], [0])
    with pytest.raises(ResourceLimitError):
        is_nc_partial(g)


def test_full_boolean_nc_matches_brute_force():
    # on the whole cube, compare with an exhaustive search over witnesses
    pts = list(itertools.product(range(2), repeat=2))
    for vals in itertools.product(range(2), repeat=4):
        g = PartialBooleanFunction(2, pts, vals)
        brute = any(
            verify_boolean_nc(g, tuple(BooleanNcStep(j, a, b) for j, (a, b) in zip(order, ab)))
            for order in itertools.permutations(range(2))
            for ab in itertools.product(itertools.product(range(2), repeat=2), repeat=2)
        )
        assert (is_nc_partial(g) is not None) == brute


def test_booleanize_identity_network_gives_beta_components():
    net = Network.identity((3, 3))
    bn = booleanize(net)
    codec = bn.codec
    for (j, a), g in bn.components.items():
        for y, v in zip(g.points, g.values):
            assert v == y[codec.bit(j, a)]


def test_booleanize_constant_network():
    d = MixedRadixDomain((3, 2))
    net = Network(d, (MultivaluedFunction.constant(d, 3, 2), MultivaluedFunction.constant(d, 2, 0)))
    bn = booleanize(net)
    assert set(bn.components[(0, 1)].values) == {1}
    assert set(bn.components[(0, 2)].values) == {1}
    assert set(bn.components[(1, 1)].values) == {0}


def test_transport_witness_cases():
    d = MixedRadixDomain((3,))
    w = SncWitness((SncStep(0, 0, "min", 2), SncStep(0, 2, "max", 0)), 1)
    bw = transport_witness(w, d, threshold=1)
    assert bw[0] == BooleanNcStep(0, 0, 1)  # min case a=0: bit (v, 1) is 0
    assert bw[1] == BooleanNcStep(1, 1, 0)  # max case a=2: bit (v, 2) is 1
    f = w.replay(d, 3)
    assert verify_boolean_nc(booleanize_function(f)[1], bw)


def test_transport_witness_rejects_invalid():
    d = MixedRadixDomain((3,))
    with pytest.raises(WitnessError):
        transport_witness(SncWitness((SncStep(0, 1, "min", 0),), 0), d, 1)


def test_transport_pipeline_random():
    rng = random.Random(2024)
    for _ in range(1000):
        ar = tuple(rng.choice((2, 3, 4)) for _ in range(rng.randint(1, 3)))
        f, w = generate_snc(ar, 3, rng)
        comps = booleanize_function(f)
        for a, g in comps.items():
            assert verify_boolean_nc(g, transport_witness(w, f.domain, a))
        found = is_snc(f)
        for a, g in comps.items():
            assert verify_boolean_nc(g, transport_witness(found, f.domain, a))

