"""Fibre functors, the elementary Galois-category checks, and the fundamental category.

The Galois category here is ``Fun^cts(Π, Fin)`` for a ProCat ``Π``; its fibre
functors are evaluations at chosen objects ``x_i``. Natural transformations
between fibre functors are computed two ways: directly as level-wise homs of
``Π`` restricted to the fibre points, and independently as the equaliser of
``∏_A Hom(A(x), A(y)) ⇉ ∏_{t: A -> B} Hom(A(x), B(y))`` over a generated
family of test objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from typing import Optional, Sequence

from . import finset as fs
from .finset import FinMap, FinSet
from .funcat import (
    CtsFunctor,
    NatTrans,
    compose_nat,
    constant_functor,
    corepresentable,
    functor_coequaliser,
    functor_coproduct,
    functor_equaliser,
    functor_image,
    functor_product,
    is_effective_epi,
    is_mono,
    nat_trans_set,
    propagate_search,
    subfunctor_lattice,
)
from .procat import ClopenBasisQuery, FinCat, Probe, ProCat, hom_pro
from .report import CrossValidationError, GeneratorBoundError, ShapeError, ValidationReport

DEFAULT_GENERATOR_BOUND = 64
DEFAULT_MAX_MEMBERS = 12
# transformations kept per ordered pair of test objects; Hom(h x h, h x h)
# over a group is far too large to list
MORPHISM_CAP = 48
# search effort per capped pair; solutions between large non-corepresentable
# members can be sparse enough to make reaching the cap exponential
MORPHISM_BUDGET = 4000


@dataclass(frozen=True)
class GaloisPresentation:
    base: ProCat
    fibre_points: tuple[int, ...]
    generator_bound: int = DEFAULT_GENERATOR_BOUND
    max_members: int = DEFAULT_MAX_MEMBERS

    def __post_init__(self):
        pts = tuple(self.fibre_points)
        object.__setattr__(self, "fibre_points", pts)
        if not pts:
            raise ShapeError("at least one fibre point is required")
        for x in pts:
            if not 0 <= x < self.base.n_objects:
                raise ShapeError(f"fibre point {x} is not an object")

    @classmethod
    def all_points(cls, base: ProCat, **kw) -> GaloisPresentation:
        return cls(base, tuple(range(base.n_objects)), **kw)

    @property
    def n_points(self) -> int:
        return len(self.fibre_points)


def restrict_procat(p: ProCat, points: Sequence[int]) -> ProCat:
    """The full sub-ProCat on ``points`` (repetitions allowed), labels kept."""
    pts = list(points)
    labels = tuple(p.objects.label(x) for x in pts)
    objs = FinSet(len(pts), labels if len(set(labels)) == len(labels) else None)
    levels = []
    for c in p.levels:
        homs = tuple(tuple(c.homs[x][y] for y in pts) for x in pts)
        comp = tuple(tuple(tuple(c.composition[x][y][z] for z in pts) for y in pts) for x in pts)
        levels.append(FinCat(objs, homs, tuple(c.identities[x] for x in pts), comp))
    trans = tuple(tuple(tuple(t[x][y] for y in pts) for x in pts) for t in p.transitions)
    return ProCat(tuple(levels), trans)


@lru_cache(maxsize=256)
def pi1(g: GaloisPresentation) -> ProCat:
    """The fundamental category as a ProCat on the fibre indices."""
    return restrict_procat(g.base, g.fibre_points)


def fibre_eval(g: GaloisPresentation, i: int, a: CtsFunctor) -> FinSet:
    if not 0 <= i < g.n_points:
        raise ShapeError(f"fibre index {i} out of range")
    return a.on_objects[g.fibre_points[i]]


# -- test families -------------------------------------------------------------


def _add(fam: list, seen: set, f: CtsFunctor, bound: int) -> None:
    if f.total_size <= bound and f not in seen:
        seen.add(f)
        fam.append(f)


@lru_cache(maxsize=512)
def generate_family(p: ProCat, level: int, bound: int = DEFAULT_GENERATOR_BOUND, max_members: int = DEFAULT_MAX_MEMBERS) -> tuple[CtsFunctor, ...]:
    """Test objects at one level: the corepresentables ``Hom_level(x, -)``, then
    the point, the empty functor, binary products and coproducts of
    corepresentables, their subfunctors and orbit quotients, as long as they
    fit under ``bound`` total elements. Corepresentables are always kept;
    the rest is truncated to ``max_members``.
    """
    coreps = [corepresentable(p, x, level) for x in range(p.n_objects)]
    for x, h in enumerate(coreps):
        if h.total_size > bound:
            raise GeneratorBoundError(f"Hom(x{x}, -) at level {level} has {h.total_size} elements > bound {bound}")
    fam: list[CtsFunctor] = []
    seen: set = set()
    for h in coreps:
        _add(fam, seen, h, bound)
    extra: list[CtsFunctor] = []
    extra_seen = set(seen)
    _add(extra, extra_seen, constant_functor(p, 1, level), bound)
    _add(extra, extra_seen, constant_functor(p, 0, level), bound)
    for i, a in enumerate(coreps):
        for b in coreps[i:]:
            if a.total_size + b.total_size <= bound:
                _add(extra, extra_seen, functor_coproduct(a, b)[0], bound)
            if sum(u * v for u, v in zip(a.sizes, b.sizes)) <= bound:
                _add(extra, extra_seen, functor_product(a, b)[0], bound)
    for h in coreps:
        for s in subfunctor_lattice(h)[1:-1]:
            _add(extra, extra_seen, s.to_functor()[0], bound)
        for e in nat_trans_set(h, h):
            _add(extra, extra_seen, functor_coequaliser(_identity(h), e)[0], bound)
    room = max(0, max_members - len(fam))
    return tuple(fam + extra[:room])


def _identity(f: CtsFunctor) -> NatTrans:
    return NatTrans(f, f, tuple(FinMap.identity(o) for o in f.on_objects))


@lru_cache(maxsize=256)
def cumulative_family(p: ProCat, level: int, bound: int = DEFAULT_GENERATOR_BOUND, max_members: int = DEFAULT_MAX_MEMBERS) -> tuple[CtsFunctor, ...]:
    """Test objects of every level up to ``level``, all presented at ``level``.

    Members of the level ``k-1`` family come first, refined, so restricting a
    transformation defined on this family to its prefix is the level
    transition.
    """
    if level == 0:
        return generate_family(p, 0, bound, max_members)
    prev = [f.refine(level) for f in cumulative_family(p, level - 1, bound, max_members)]
    seen = set(prev)
    out = list(prev)
    for f in generate_family(p, level, bound, max_members):
        if f not in seen:
            seen.add(f)
            out.append(f)
    return tuple(out)


def presentation_family(g: GaloisPresentation, level: Optional[int] = None) -> tuple[CtsFunctor, ...]:
    lv = g.base.top if level is None else level
    return cumulative_family(g.base, lv, g.generator_bound, g.max_members)


def sample_transformations(family: Sequence[CtsFunctor], limit: Optional[int] = None, per_pair: int = MORPHISM_CAP) -> list[NatTrans]:
    out = []
    for a in family:
        for b in family:
            out.extend(nat_trans_set(a, b, per_pair, MORPHISM_BUDGET))
            if limit is not None and len(out) >= limit:
                return out[:limit]
    return out


# -- fibre functor checks --------------------------------------------------------


class FibreEvaluation:
    """Evaluation at one object, on objects and on transformations."""

    def __init__(self, x: int):
        self.x = x

    def obj(self, a: CtsFunctor) -> FinSet:
        return FinSet(a.on_objects[self.x].size)

    def arr(self, t: NatTrans) -> FinMap:
        m = t.components[self.x]
        return FinMap(FinSet(m.source.size), FinSet(m.target.size), m.table)


def pretopos_morphism_check(g: GaloisPresentation, i: int, samples: Sequence[CtsFunctor], evaluator=None) -> ValidationReport:
    """Check that evaluation preserves the terminal object, binary products,
    equalisers, coproducts, coequalisers and effective epimorphisms on the
    sampled objects and the transformations between them."""
    ev = evaluator if evaluator is not None else FibreEvaluation(g.fibre_points[i])
    rep = ValidationReport(f"fibre functor {i}")
    if not samples:
        return rep
    p = samples[0].procat
    rep.tick()
    if ev.obj(constant_functor(p, 1, 0)).size != 1:
        rep.add("terminal object", ())
    for ai, a in enumerate(samples):
        for bi, b in enumerate(samples):
            prod, p1, p2 = functor_product(a, b)
            cmp_ = tuple(fs.pair_index(u, v, ev.obj(b).size) for u, v in zip(ev.arr(p1).table, ev.arr(p2).table))
            rep.tick()
            if not FinMap(ev.obj(prod), FinSet(ev.obj(a).size * ev.obj(b).size), cmp_).is_bijective():
                rep.add("finite products", (ai, bi))
            cop, i1, i2 = functor_coproduct(a, b)
            rep.tick()
            joint = ev.arr(i1).table + ev.arr(i2).table
            if len(joint) != ev.obj(cop).size or sorted(joint) != list(range(ev.obj(cop).size)):
                rep.add("finite coproducts", (ai, bi))
            ts = nat_trans_set(a, b, MORPHISM_CAP, MORPHISM_BUDGET)
            for s_idx, s in enumerate(ts):
                rep.tick()
                if is_effective_epi(s) and not ev.arr(s).is_surjective():
                    rep.add("effective epimorphisms", (ai, bi, s_idx))
            for s_idx, s in enumerate(ts[:4]):
                for t_idx, t in enumerate(ts[:4]):
                    if t_idx <= s_idx:
                        continue
                    e, inc = functor_equaliser(s, t)
                    _, ref = fs.equaliser(ev.arr(s), ev.arr(t))
                    rep.tick()
                    if ev.arr(inc).table != ref.table:
                        rep.add("equalisers", (ai, bi, s_idx, t_idx))
                    q, proj = functor_coequaliser(s, t)
                    qs, qref = fs.coequaliser(ev.arr(s), ev.arr(t))
                    rep.tick()
                    if not _induced_bijection(qref, ev.arr(proj)):
                        rep.add("coequalisers", (ai, bi, s_idx, t_idx))
    return rep


def _induced_bijection(p: FinMap, q: FinMap) -> bool:
    """Do the surjections ``p`` and ``q`` out of one set have the same kernel and cover their targets?"""
    if p.source.size != q.source.size:
        return False
    m: dict[int, int] = {}
    for a, b in zip(p.table, q.table):
        if m.setdefault(a, b) != b:
            return False
    return len(set(m.values())) == len(m) == q.target.size and len(m) == p.target.size


def joint_conservativity_check(g: GaloisPresentation, samples: Optional[Sequence[NatTrans]] = None) -> ValidationReport:
    rep = ValidationReport("joint conservativity")
    if samples is None:
        samples = sample_transformations(presentation_family(g))
    for k, t in enumerate(samples):
        rep.tick()
        if all(t.components[x].is_bijective() for x in g.fibre_points):
            for x in range(t.source.procat.n_objects):
                if not t.components[x].is_bijective():
                    rep.add("conservativity", (k, x), "bijective at every fibre point but not at this object")
                    break
    return rep


def fibre_tuple(g: GaloisPresentation, t: NatTrans) -> tuple:
    return tuple(t.components[x].table for x in g.fibre_points)


def faithfulness_check(g: GaloisPresentation, a: CtsFunctor, b: CtsFunctor) -> ValidationReport:
    rep = ValidationReport("faithfulness")
    seen: dict[tuple, int] = {}
    for k, t in enumerate(nat_trans_set(a, b)):
        rep.tick()
        key = fibre_tuple(g, t)
        if key in seen:
            rep.add("faithful", (seen[key], k), "distinct transformations agree at every fibre point")
        seen.setdefault(key, k)
    return rep


def subobject_injectivity_check(g: GaloisPresentation, a: CtsFunctor) -> ValidationReport:
    rep = ValidationReport("subobject injectivity")
    seen: dict[tuple, int] = {}
    for k, s in enumerate(subfunctor_lattice(a)):
        rep.tick()
        key = tuple(s.subset[x] for x in g.fibre_points)
        if key in seen:
            rep.add("Sub(A) -> Sub(F(A)) injective", (seen[key], k))
        seen.setdefault(key, k)
    return rep


def mono_epi_detection_check(g: GaloisPresentation, t: NatTrans) -> ValidationReport:
    """Injective (surjective) at the fibre points implies mono (effective epi)."""
    rep = ValidationReport("mono/epi detection")
    rep.tick()
    if all(t.components[x].is_injective() for x in g.fibre_points) and not is_mono(t):
        rep.add("monomorphism", fibre_tuple(g, t))
    rep.tick()
    if all(t.components[x].is_surjective() for x in g.fibre_points):
        if not is_effective_epi(t):
            rep.add("effective epimorphism", fibre_tuple(g, t))
        else:
            from .funcat import is_coequaliser_of_kernel_pair

            if not is_coequaliser_of_kernel_pair(t):
                rep.add("effective epimorphism", fibre_tuple(g, t), "not the coequaliser of its kernel pair")
    # the image factorisation is preserved by evaluation
    im, epi, mono = functor_image(t)
    for x in g.fibre_points:
        rep.tick()
        e, m = fs.image_factorization(t.components[x])
        if e.table != epi.components[x].table or m.table != mono.components[x].table:
            rep.add("image factorisation", (x,))
    return rep


# -- category of elements --------------------------------------------------------


@dataclass
class ElementsCategory:
    """A window of ``el(F)`` for ``F = ∏_i ev_{x_i}`` over chosen fibre indices."""

    presentation: GaloisPresentation
    points: tuple[int, ...]
    objects: tuple[CtsFunctor, ...]
    nodes: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)

    def node_object(self, node) -> CtsFunctor:
        return self.objects[node[0]]

    def hom(self, n1, n2) -> list[NatTrans]:
        a, pa = self.objects[n1[0]], n1[1]
        b, pb = self.objects[n2[0]], n2[1]
        xs = [self.presentation.fibre_points[i] for i in self.points]
        return [t for t in nat_trans_set(a, b) if all(t.components[x].table[u] == v for x, u, v in zip(xs, pa, pb))]


def elements_category(g: GaloisPresentation, points: Optional[Sequence[int]] = None, window: int = 8) -> ElementsCategory:
    """Nodes ``(A, a)`` with ``A`` a test object of at most ``window`` elements
    and ``a`` a point of ``∏_i A(x_i)``; ``points`` selects the fibre indices
    (all by default, the empty tuple gives the terminal functor)."""
    if window < 1:
        raise ShapeError("window must be at least 1")
    pts = tuple(range(g.n_points)) if points is None else tuple(points)
    objs = tuple(a for a in presentation_family(g) if a.total_size <= window)
    cat = ElementsCategory(g, pts, objs)
    for k, a in enumerate(objs):
        ranges = [range(a.on_objects[g.fibre_points[i]].size) for i in pts]
        for pt in iproduct(*ranges):
            cat.nodes.append((k, tuple(pt)))
    return cat


def cofilteredness_check(cat: ElementsCategory, max_pairs: int = 200) -> ValidationReport:
    """Common sources via products and equalising nodes via equalisers."""
    g = cat.presentation
    xs = [g.fibre_points[i] for i in cat.points]
    rep = ValidationReport("el(F) cofiltered")
    nodes = cat.nodes
    pairs = [(u, v) for u in nodes for v in nodes][:max_pairs]
    for u, v in pairs:
        a, b = cat.node_object(u), cat.node_object(v)
        prod, p1, p2 = functor_product(a, b)
        pt = tuple(fs.pair_index(s, t, b.on_objects[x].size) for x, s, t in zip(xs, u[1], v[1]))
        rep.tick()
        if any(p1.components[x].table[q] != s for x, q, s in zip(xs, pt, u[1])) or any(
            p2.components[x].table[q] != t for x, q, t in zip(xs, pt, v[1])
        ):
            rep.add("common source", (u, v))
    for u in nodes:
        for v in nodes:
            maps = cat.hom(u, v)
            for i, s in enumerate(maps[:3]):
                for t in maps[i + 1 : 4]:
                    e, inc = functor_equaliser(s, t)
                    rep.tick()
                    # the point of u must lie in the equaliser
                    inside = all(q in inc.components[x].table for x, q in zip(xs, u[1]))
                    if not inside:
                        rep.add("equalising node", (u, v))
                    if len(rep.violations) > 20:
                        return rep
    return rep


# -- fundamental category ----------------------------------------------------------


def equaliser_transformations(family: Sequence[CtsFunctor], x: int, y: int, morphisms=None) -> list[tuple[tuple[int, ...], ...]]:
    """All families ``η_A: A(x) -> A(y)`` over ``family`` natural for every
    transformation between members. Each solution lists one table per member."""
    if morphisms is None:
        morphisms = family_morphisms(family)
    out = [[] for _ in family]
    for (m1, m2), ts in morphisms.items():
        for t in ts:
            out[m1].append((m2, t.components[x].table, t.components[y].table))
    src = [a.on_objects[x].size for a in family]
    tgt = [a.on_objects[y].size for a in family]
    return list(propagate_search(src, tgt, out))


@lru_cache(maxsize=64)
def family_morphisms(family: tuple[CtsFunctor, ...], cap: int = MORPHISM_CAP) -> dict:
    """Transformations between members, at most ``cap`` per ordered pair.

    Maps out of a corepresentable ``Hom(x, -)`` are never truncated: they are
    what pins a natural family down.
    """
    out = {}
    for i, a in enumerate(family):
        corep = _is_corepresentable(a)
        for j, b in enumerate(family):
            out[(i, j)] = nat_trans_set(a, b) if corep else nat_trans_set(a, b, cap, MORPHISM_BUDGET)
    return out


def _is_corepresentable(a: CtsFunctor) -> bool:
    p = a.procat
    return any(a == corepresentable(p, x, a.level) for x in range(p.n_objects))


@dataclass
class FundamentalCategory:
    procat: ProCat
    base: ProCat
    fibre_points: tuple[int, ...]
    # per level: {(i, j): number of transformations ev_i -> ev_j over the family}
    cross_validation: list[dict] = field(default_factory=list)
    family_sizes: list[int] = field(default_factory=list)

    @property
    def validated(self) -> bool:
        return bool(self.cross_validation)


def canonical_transformation(family: Sequence[CtsFunctor], x: int, y: int, f: int) -> tuple[tuple[int, ...], ...]:
    """The family ``(A(f))_A`` attached to an arrow ``f: x -> y``."""
    return tuple(a.on_arrows[x][y][f] for a in family)


def fundamental_category(g: GaloisPresentation, cross_validate: bool = True) -> FundamentalCategory:
    p = g.base
    fc = FundamentalCategory(pi1(g), p, g.fibre_points)
    if not cross_validate:
        return fc
    pts = g.fibre_points
    for k in range(p.depth):
        fam = cumulative_family(p, k, g.generator_bound, g.max_members)
        morphs = family_morphisms(fam)
        c = p.levels[k]
        counts = {}
        index = {}
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                sols = equaliser_transformations(fam, x, y, morphs)
                counts[(i, j)] = len(sols)
                if len(sols) != c.homs[x][y].size:
                    raise CrossValidationError(k, (i, j), f"{len(sols)} transformations over the test family, {c.homs[x][y].size} arrows")
                pos = {s: n for n, s in enumerate(sols)}
                images = [pos.get(canonical_transformation(fam, x, y, f)) for f in range(c.homs[x][y].size)]
                if None in images or len(set(images)) != len(images):
                    raise CrossValidationError(k, (i, j), "arrows do not biject with transformations")
                index[(i, j)] = (sols, pos, images)
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                for l, z in enumerate(pts):
                    sols_ij, _, im_ij = index[(i, j)]
                    sols_jl, _, im_jl = index[(j, l)]
                    _, pos_il, im_il = index[(i, l)]
                    for gg in range(c.homs[y][z].size):
                        for ff in range(c.homs[x][y].size):
                            comp = tuple(
                                tuple(b[u] for u in a) for a, b in zip(sols_ij[im_ij[ff]], sols_jl[im_jl[gg]])
                            )
                            if pos_il.get(comp) != im_il[c.composition[x][y][z][gg][ff]]:
                                raise CrossValidationError(k, (i, l), f"composition of arrows {gg}∘{ff} disagrees")
        fc.cross_validation.append(counts)
        fc.family_sizes.append(len(fam))
    return fc


def reconstructed_procat(g: GaloisPresentation) -> tuple[ProCat, list[tuple[CtsFunctor, ...]]]:
    """Build ``Π₁`` from transformations of fibre functors alone.

    Level ``k`` homs are the solutions of :func:`equaliser_transformations`
    over the level-``k`` family, composition is componentwise, and
    transitions restrict a transformation to the previous family.
    """
    p = g.base
    pts = g.fibre_points
    n = len(pts)
    levels = []
    sols_by_level = []
    families = []
    for k in range(p.depth):
        fam = cumulative_family(p, k, g.generator_bound, g.max_members)
        families.append(fam)
        morphs = family_morphisms(fam)
        sols = {(i, j): equaliser_transformations(fam, pts[i], pts[j], morphs) for i in range(n) for j in range(n)}
        pos = {key: {s: m for m, s in enumerate(v)} for key, v in sols.items()}
        idents = []
        for i in range(n):
            ident = tuple(tuple(range(a.on_objects[pts[i]].size)) for a in fam)
            idents.append(pos[(i, i)][ident])

        def compose(x, y, z, gg, ff, sols=sols, pos=pos):
            a_, b_ = sols[(x, y)][ff], sols[(y, z)][gg]
            return pos[(x, z)][tuple(tuple(bt[u] for u in at) for at, bt in zip(a_, b_))]

        levels.append(FinCat.build(n, [[len(sols[(i, j)]) for j in range(n)] for i in range(n)], idents, compose))
        sols_by_level.append((sols, pos))
    trans = []
    for k in range(p.depth - 1):
        m = len(families[k])
        sols_hi, _ = sols_by_level[k + 1]
        _, pos_lo = sols_by_level[k]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                tab = tuple(pos_lo[(i, j)][s[:m]] for s in sols_hi[(i, j)])
                row.append(FinMap(FinSet(len(tab)), FinSet(len(pos_lo[(i, j)])), tab))
            rows.append(tuple(row))
        trans.append(tuple(rows))
    return ProCat(tuple(levels), tuple(trans)), families


def hom_basis_query(g: GaloisPresentation, i: int, j: int, a: CtsFunctor, u: int, v: int) -> ClopenBasisQuery:
    """``U_A(u, v)``: arrows ``x_i -> x_j`` of ``Π₁`` whose action on ``A`` sends ``u`` to ``v``."""
    x, y = g.fibre_points[i], g.fibre_points[j]
    probe = Probe(a.level, a.on_objects[x], a.on_objects[y], tuple(a.on_arrows[x][y]))
    return ClopenBasisQuery(a.level, (u, v), probe)


def hom_profinite(g: GaloisPresentation, i: int, j: int):
    return hom_pro(pi1(g), i, j)
