import pytest

from galcat import galois
from galcat.finset import FinMap, FinSet
from galcat.funcat import CtsFunctor, check_functor, corepresentable, nat_trans_set, terminal_functor
from galcat.galois import (
    FibreEvaluation,
    GaloisPresentation,
    cofilteredness_check,
    elements_category,
    faithfulness_check,
    fundamental_category,
    hom_basis_query,
    hom_profinite,
    joint_conservativity_check,
    mono_epi_detection_check,
    pi1,
    presentation_family,
    pretopos_morphism_check,
    reconstructed_procat,
    subobject_injectivity_check,
)
from galcat.procat import validate_procat
from galcat.report import CrossValidationError, GeneratorBoundError, ShapeError
from galcat.strat import build_bg, canned_procat, symmetric_group


def pres(name, points=None, **kw):
    p = canned_procat(name)
    return GaloisPresentation.all_points(p, **kw) if points is None else GaloisPresentation(p, tuple(points), **kw)


def test_presentation_rejects_bad_points():
    p = canned_procat("bz2")
    with pytest.raises(ShapeError):
        GaloisPresentation(p, (1,))
    with pytest.raises(ShapeError):
        GaloisPresentation(p, ())


@pytest.mark.parametrize(
    "name, homs",
    [
        ("terminal", [[[1]]]),
        ("bs3", [[[6]]]),
        ("two-curves", [[[1, 1], [1, 1]]]),
        ("bzhat", [[[2]], [[4]], [[8]]]),
        ("open-closed", [[[1, 1], [0, 1]]]),
    ],
)
def test_fundamental_category_cross_validates(name, homs):
    g = pres(name)
    fc = fundamental_category(g)
    assert fc.validated
    assert [c.hom_sizes() for c in fc.procat.levels] == homs
    for k, counts in enumerate(fc.cross_validation):
        for (i, j), n in counts.items():
            assert n == homs[k][i][j]


def test_pi1_on_a_subset_of_points():
    g = pres("three-chain", points=[0, 2])
    p = pi1(g)
    assert p.n_objects == 2
    assert p.levels[0].hom_sizes() == [[1, 1], [0, 1]]
    assert validate_procat(p).ok


def test_generator_bound_is_enforced():
    with pytest.raises(GeneratorBoundError):
        fundamental_category(pres("bs3", generator_bound=3))


def test_poor_test_family_is_caught(monkeypatch):
    g = pres("bz2")
    only_point = lambda p, k, bound, members: (terminal_functor(p, k),)  # noqa: E731
    monkeypatch.setattr(galois, "cumulative_family", only_point)
    with pytest.raises(CrossValidationError):
        fundamental_category(g)


def test_reconstructed_bs3_has_six_arrows():
    q, fams = reconstructed_procat(pres("bs3"))
    assert validate_procat(q).ok
    assert q.levels[0].hom_sizes() == [[6]]


@pytest.mark.parametrize("name", ["bz2", "bs3", "open-closed", "z2-exit"])
def test_fibre_functors_are_pretopos_morphisms(name):
    g = pres(name)
    samples = [a for a in presentation_family(g) if a.total_size <= 12][:5]
    for i in range(g.n_points):
        assert pretopos_morphism_check(g, i, samples).ok


def test_broken_evaluator_is_not_a_pretopos_morphism():
    class Doubling(FibreEvaluation):
        def obj(self, a):
            return FinSet(2 * a.on_objects[self.x].size)

        def arr(self, t):
            m = t.components[self.x]
            tab = m.table + tuple(v + m.target.size for v in m.table)
            return FinMap(FinSet(2 * m.source.size), FinSet(2 * m.target.size), tab)

    g = pres("bz2")
    samples = list(presentation_family(g))[:4]
    rep = pretopos_morphism_check(g, 0, samples, Doubling(0))
    assert not rep.ok
    assert any(v.law == "terminal object" for v in rep.violations)


def test_joint_conservativity():
    assert joint_conservativity_check(pres("open-closed")).ok
    # the closed point alone does not see the open stratum
    rep = joint_conservativity_check(pres("open-closed", points=[1]))
    assert not rep.ok
    # in the indiscrete two-curves category either point suffices
    assert joint_conservativity_check(pres("two-curves", points=[0])).ok


@pytest.mark.parametrize("name", ["bz2", "bs3", "z2-exit", "three-chain"])
def test_elementary_lemma_checks(name):
    g = pres(name)
    objs = [a for a in presentation_family(g) if a.total_size <= 8][:5]
    for a in objs:
        assert subobject_injectivity_check(g, a).ok
        for b in objs:
            assert faithfulness_check(g, a, b).ok
            for t in nat_trans_set(a, b, 6):
                assert mono_epi_detection_check(g, t).ok


def test_faithfulness_fails_for_non_conservative_points():
    g = pres("open-closed", points=[1])
    h_u = corepresentable(g.base, 0, 0)
    # two elements over the open point, both sent to the single closed one
    b = CtsFunctor.from_function(g.base, 0, [2, 1], lambda x, y, f, a: a if x == y else 0)
    assert check_functor(b).ok
    assert len(nat_trans_set(h_u, b)) == 2
    rep = faithfulness_check(g, h_u, b)
    assert not rep.ok
    assert faithfulness_check(pres("open-closed"), h_u, b).ok


def test_hom_basis_query_matches_direct_scan():
    g = pres("bs3")
    h = corepresentable(g.base, 0, 0)
    q = hom_basis_query(g, 0, 0, h, 1, 4)
    direct = {phi for phi in range(6) if h.on_arrows[0][0][phi][1] == 4}
    assert q.select(hom_profinite(g, 0, 0)) == frozenset(direct)
    assert len(direct) == 1


def test_elements_category_is_cofiltered():
    g = pres("bz2")
    cat = elements_category(g, window=4)
    assert cat.nodes
    assert cofilteredness_check(cat).ok
    # no points selected: el of the terminal functor
    cat0 = elements_category(g, points=(), window=4)
    assert all(pt == () for _, pt in cat0.nodes)
    assert cofilteredness_check(cat0).ok
    with pytest.raises(ShapeError):
        elements_category(g, window=0)


def test_bs3_family_contains_the_regular_representation():
    g = GaloisPresentation.all_points(build_bg(symmetric_group(3)))
    fam = presentation_family(g)
    assert fam[0] == corepresentable(g.base, 0, 0)
    assert any(a.sizes == (3,) for a in fam)
