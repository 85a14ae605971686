import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcat.galois import joint_conservativity_check
from galcat.procat import validate_procat
from galcat.report import ShapeError, ValidationError
from galcat.strat import (
    CANNED_DOCS,
    ExitSet,
    Group,
    StrataSpec,
    build_bg,
    build_strata,
    canned_examples,
    canned_procat,
    congruence_quotient,
    cyclic_chain,
    cyclic_group,
    group_from_table,
    group_report,
    random_fincat,
    random_procat,
    symmetric_group,
    trivial_group,
)
from oracles import fincat_isomorphic, first_assoc_failure


def test_group_reports():
    assert group_report(symmetric_group(3)).ok
    assert group_report(cyclic_group(5)).ok
    no_unit = Group(((1, 0), (0, 0)))
    assert [v.law for v in group_report(no_unit).violations] == ["unit"]
    # unit 0, but 1*1 = 1 so 1 has no inverse
    monoid = Group(((0, 1), (1, 1)))
    assert "inverse" in {v.law for v in group_report(monoid).violations}
    with pytest.raises(ValidationError):
        group_from_table([[0, 1], [1, 1]])
    with pytest.raises(ShapeError):
        Group(((0, 1), (1,)))


def test_symmetric_group_multiplication_is_composition():
    s3 = symmetric_group(3)
    assert s3.order == 6 and s3.unit() == 0
    assert first_assoc_failure(build_bg(s3).levels[0]) is None
    # non-abelian
    assert any(s3.mul(a, b) != s3.mul(b, a) for a in range(6) for b in range(6))


def test_build_bg_cases():
    t = build_bg(trivial_group())
    assert t.levels[0].hom_sizes() == [[1]]
    assert build_bg(symmetric_group(3)).levels[0].hom_sizes() == [[6]]
    assert build_bg([[0, 1], [1, 0]]).levels[0].hom_sizes() == [[2]]
    chain = cyclic_chain([2, 4, 8])
    assert chain.depth == 3 and validate_procat(chain).ok
    with pytest.raises(ShapeError):
        build_bg([cyclic_group(2), cyclic_group(4)])
    with pytest.raises(ShapeError):
        cyclic_chain([2, 3])
    with pytest.raises(ValidationError):
        # reduction that is not a homomorphism: 1 + 1 = 2 in Z/4 but 1 + 1 = 0 in Z/2 while 2 -> 1
        build_bg([cyclic_group(2), cyclic_group(4)], [[0, 1, 1, 0]])


def test_open_closed_shape():
    p = canned_procat("open-closed")
    assert p.levels[0].hom_sizes() == [[1, 1], [0, 1]]


def test_two_curves_has_arrows_both_ways():
    p = canned_procat("two-curves")
    assert p.levels[0].hom_sizes() == [[1, 1], [1, 1]]
    assert validate_procat(p).ok


def test_z2_monodromy_with_exit_paths():
    p = canned_procat("z2-exit")
    assert p.levels[0].hom_sizes() == [[2, 2], [0, 1]]
    assert validate_procat(p).ok


def test_broken_right_action_is_rejected():
    z2 = cyclic_group(2)
    # the identity loop swaps the exit paths: not an action
    spec = StrataSpec(["U", "Z"], [z2, trivial_group()], {(0, 1): ExitSet(2, [[0, 1]], [[1, 0], [0, 1]])})
    with pytest.raises(ValidationError):
        build_strata(spec)


def test_missing_composition_table_is_named():
    one = lambda: ExitSet(1, [[0]], [[0]])  # noqa: E731
    spec = StrataSpec(["a", "b", "c"], [trivial_group()] * 3, {(0, 1): one(), (1, 2): one(), (0, 2): one()})
    with pytest.raises(ValidationError) as exc:
        build_strata(spec)
    assert exc.value.law == "composition table"


def test_strata_shape_errors():
    with pytest.raises(ShapeError):
        build_strata(StrataSpec(["a", "a"], [trivial_group()] * 2))
    with pytest.raises(ShapeError):
        build_strata(StrataSpec(["a"], [trivial_group()] * 2))
    with pytest.raises(ShapeError):
        build_strata(StrataSpec(["a", "b"], [trivial_group()] * 2, {(0, 1): ExitSet(2, [[0]], [[0]])}))


def test_stratum_order_does_not_matter():
    z2 = cyclic_group(2)
    fwd = build_strata(StrataSpec(["U", "Z"], [z2, trivial_group()], {(0, 1): ExitSet(2, [[0, 1]], [[0, 1], [1, 0]])}))
    rev = build_strata(StrataSpec(["Z", "U"], [trivial_group(), z2], {(1, 0): ExitSet(2, [[0, 1]], [[0, 1], [1, 0]])}))
    assert fincat_isomorphic(fwd.levels[0], rev.levels[0]) is not None
    one = lambda: ExitSet(1, [[0]], [[0]])  # noqa: E731
    a = build_strata(StrataSpec(["s0", "s1", "s2"], [trivial_group()] * 3, {(0, 1): one(), (1, 2): one(), (0, 2): one()}, {(0, 1, 2): [[0]]}))
    # relabel s0 -> 2, s1 -> 0, s2 -> 1
    b = build_strata(StrataSpec(["s1", "s2", "s0"], [trivial_group()] * 3, {(2, 0): one(), (0, 1): one(), (2, 1): one()}, {(2, 0, 1): [[0]]}))
    assert fincat_isomorphic(a.levels[0], b.levels[0]) is not None


def test_canned_examples():
    ex = canned_examples()
    for name in ("terminal", "bz2", "bs3", "bzhat", "open-closed", "two-curves", "three-chain"):
        assert name in ex
    assert set(ex) == set(CANNED_DOCS)
    for name, (g, doc) in ex.items():
        assert doc
        assert validate_procat(g.base).ok, name
        assert joint_conservativity_check(g).ok, name
    assert ex["terminal"][0].base.levels[0].hom_sizes() == [[1]]
    assert ex["bs3"][0].base.levels[0].hom_sizes() == [[6]]
    with pytest.raises(KeyError):
        canned_procat("nope")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_random_procats_are_valid(seed):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    assert validate_procat(p).ok
    assert p.depth <= 2
    assert all(h.size <= 3 for c in p.levels for row in c.homs for h in row)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_congruence_quotient_is_a_category(seed):
    rng = random.Random(seed)
    c = random_fincat(rng, 2, 4)
    arrows = list(c.arrows())
    seeds = [(x, y, f, rng.randrange(c.homs[x][y].size)) for x, y, f in rng.sample(arrows, min(2, len(arrows)))]
    q, proj = congruence_quotient(c, seeds)
    assert first_assoc_failure(q) is None
    for x, y, f, g in seeds:
        assert proj[x][y].table[f] == proj[x][y].table[g]
    # projections are functorial
    n = c.n_objects
    for x in range(n):
        for y in range(n):
            for z in range(n):
                for g in range(c.homs[y][z].size):
                    for f in range(c.homs[x][y].size):
                        lhs = proj[x][z].table[c.composition[x][y][z][g][f]]
                        rhs = q.composition[x][y][z][proj[y][z].table[g]][proj[x][y].table[f]]
                        assert lhs == rhs
