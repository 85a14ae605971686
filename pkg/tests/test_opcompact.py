import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcat.exodromy import yoneda_map
from galcat.funcat import CtsFunctor, NatTrans, corepresentable, functor_coproduct, identity_nat, nat_trans_set, random_functor
from galcat.opcompact import (
    ChainDiagram,
    constant_chain,
    naturality_split,
    opcompactness_check,
    pointwise_lift,
    random_chain,
    surjectivity_witness,
    validate_chain,
)
from galcat.report import ShapeError
from galcat.strat import canned_procat, cyclic_chain, random_procat
from oracles import natural_families


def sign(p):
    return CtsFunctor.from_function(p, 0, [2], lambda x, y, f, a: (a + f) % 2)


def test_constant_chain_is_trivially_compact():
    p = cyclic_chain([2])
    h = corepresentable(p, 0, 0)
    d = constant_chain(h, 3)
    assert validate_chain(d).ok
    w = opcompactness_check(d, h)
    assert w.ok and w.report().ok
    assert len(w.surjectivity) == 2
    assert all(e.j == 0 and e.k == 0 for e in w.surjectivity)
    assert all(e.agree_at is not None for e in w.injectivity)


def test_sign_on_the_reduction_z4_to_z2():
    p = cyclic_chain([2, 4])
    h4 = corepresentable(p, 0, 1)
    h2 = corepresentable(p, 0, 0).refine(1)
    # reduction mod 2 is the Yoneda map sending id to id
    red = NatTrans(h4, h2, yoneda_map(h2, 0, 0, 1).components)
    d = ChainDiagram([h2, h4], [red])
    f = sign(p)
    w = opcompactness_check(d, f)
    assert w.ok
    assert len(w.surjectivity) == len(natural_families(h4, f)) == 2
    # every map out of Z/4 into the sign already factors through Z/2
    assert all(e.factor_levels == (0,) and e.k == 0 for e in w.surjectivity)


def test_a_character_of_z4_does_not_factor():
    p = cyclic_chain([2, 4])
    h4 = corepresentable(p, 0, 1)
    h2 = corepresentable(p, 0, 0).refine(1)
    red = NatTrans(h4, h2, yoneda_map(h2, 0, 0, 1).components)
    d = ChainDiagram([h2, h4], [red])
    w = opcompactness_check(d, h4)
    assert w.ok
    assert len(w.surjectivity) == 4
    assert all(e.factor_levels == (1,) and e.k == 1 for e in w.surjectivity)


def planted_chain():
    p = cyclic_chain([2])
    h = corepresentable(p, 0, 0)
    hh, i1, _ = functor_coproduct(h, h)
    return ChainDiagram([hh, h], [i1]), h


def test_planted_non_natural_lift_walks_up_one_step():
    d, h = planted_chain()
    alpha = identity_nat(h)
    planted = {(0, 2): 0, (0, 3): 0}
    jx, j, lift = pointwise_lift(d, h, alpha, planted)
    assert jx == (0,) and j == 0
    assert lift[0] == (0, 1, 0, 0)
    _, y0 = naturality_split(d, h, 0, lift)
    assert y0
    e = surjectivity_witness(d, h, alpha, planted=planted)
    assert e.k == 1 and e.ok
    assert e.y_sizes[0] > 0 and e.y_sizes[1] == 0


def test_natural_planting_stops_at_once():
    d, h = planted_chain()
    e = surjectivity_witness(d, h, identity_nat(h), planted={(0, 2): 0, (0, 3): 1})
    assert e.k == 0 and e.ok and e.y_sizes == [0]


def test_injectivity_entries_on_a_non_surjective_chain():
    d, h = planted_chain()
    w = opcompactness_check(d, h)
    assert w.ok
    # four maps h + h -> h, pairs sharing the first component agree on the limit
    assert len(nat_trans_set(d.nodes[0], h)) == 4
    at_zero = [e for e in w.injectivity if e.index == 0]
    assert len(at_zero) == 2 and all(e.agree_at == 1 for e in at_zero)


def test_chain_shape_errors():
    p = cyclic_chain([2])
    h = corepresentable(p, 0, 0)
    with pytest.raises(ShapeError):
        ChainDiagram([], [])
    with pytest.raises(ShapeError):
        ChainDiagram([h, h], [])
    hh = functor_coproduct(h, h)[0]
    with pytest.raises(ShapeError):
        ChainDiagram([h, hh], [identity_nat(h)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.booleans())
def test_random_chains(seed, surjective):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    d = random_chain(p, rng, length=rng.randint(1, 5), max_size=4, surjective=surjective)
    assert validate_chain(d).ok
    f = random_functor(p, rng.randrange(p.depth), 3, rng)
    w = opcompactness_check(d, f)
    assert w.ok, w.report().lines()
    assert len(w.surjectivity) == len(natural_families(d.limit, f))


def test_off_image_points_over_an_empty_value_force_a_step_up():
    # F(U) is empty, but D(0)(U) has a point outside the image of D(1)
    p = canned_procat("open-closed")
    h_z = corepresentable(p, 1, 0)
    h_u = corepresentable(p, 0, 0)
    both, i1, _ = functor_coproduct(h_z, h_u)
    d = ChainDiagram([both, h_z], [i1])
    jx, j, lift = pointwise_lift(d, h_z, identity_nat(h_z))
    assert j == 0 and lift[0] == (None,)
    e = surjectivity_witness(d, h_z, identity_nat(h_z))
    assert e.k == 1 and e.ok
    assert opcompactness_check(d, h_z).ok
