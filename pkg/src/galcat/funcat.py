"""Continuous finite-set-valued functors on a ProCat and their pretopos structure.

A continuous functor is stored as a functor on one finite level ``Π_n``; it acts
on a finer level through the transition maps. Binary operations first refine
both operands to the larger level. All limits and colimits are computed
pointwise with :mod:`galcat.finset`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from . import finset as fs
from .finset import FinMap, FinSet, pair_index
from .procat import ProCat
from .report import ShapeError, ValidationError, ValidationReport

Tables = tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]


@dataclass(frozen=True, eq=True)
class CtsFunctor:
    procat: ProCat
    level: int
    on_objects: tuple[FinSet, ...]
    # on_arrows[x][y][f] is the table of F(f): F(x) -> F(y), f in Hom_level(x, y)
    on_arrows: Tables

    def __post_init__(self):
        objs = tuple(FinSet(o) if isinstance(o, int) else o for o in self.on_objects)
        arrows = tuple(tuple(tuple(tuple(t) for t in row) for row in r) for r in self.on_arrows)
        object.__setattr__(self, "on_objects", objs)
        object.__setattr__(self, "on_arrows", arrows)
        p = self.procat
        n = p.n_objects
        if not 0 <= self.level < p.depth:
            raise ShapeError(f"level {self.level} outside 0..{p.top}")
        if len(objs) != n:
            raise ShapeError(f"need one value per object ({n})")
        c = p.levels[self.level]
        if len(arrows) != n or any(len(r) != n for r in arrows):
            raise ShapeError(f"arrow actions must be indexed {n}x{n}")
        for x in range(n):
            for y in range(n):
                tabs = arrows[x][y]
                if len(tabs) != c.homs[x][y].size:
                    raise ShapeError(f"need one table per arrow of Hom({x},{y}) at level {self.level}")
                sx, sy = objs[x].size, objs[y].size
                for t in tabs:
                    if len(t) != sx or any(not 0 <= v < sy for v in t):
                        raise ShapeError(f"arrow table on Hom({x},{y}) is not a map {sx} -> {sy}")

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.procat, self.level, self.on_objects, self.on_arrows))
            self.__dict__["_hash"] = h
        return h

    @classmethod
    def from_function(cls, procat: ProCat, level: int, sizes: Sequence[int], act) -> CtsFunctor:
        """``act(x, y, f, a)`` is the image of ``a`` under the arrow ``f: x -> y``."""
        c = procat.levels[level]
        n = procat.n_objects
        arrows = tuple(
            tuple(
                tuple(tuple(act(x, y, f, a) for a in range(sizes[x])) for f in range(c.homs[x][y].size))
                for y in range(n)
            )
            for x in range(n)
        )
        return cls(procat, level, tuple(FinSet(s) for s in sizes), arrows)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(o.size for o in self.on_objects)

    @property
    def total_size(self) -> int:
        return sum(self.sizes)

    def value(self, x: int) -> FinSet:
        return self.on_objects[x]

    def act(self, x: int, y: int, f: int) -> tuple[int, ...]:
        return self.on_arrows[x][y][f]

    def arrow_map(self, x: int, y: int, f: int) -> FinMap:
        return FinMap(self.on_objects[x], self.on_objects[y], self.on_arrows[x][y][f])

    def refine(self, level: int) -> CtsFunctor:
        if level == self.level:
            return self
        if level < self.level:
            raise ShapeError(f"cannot coarsen a level-{self.level} functor to level {level}")
        p = self.procat
        n = p.n_objects
        arrows = tuple(
            tuple(
                tuple(self.on_arrows[x][y][v] for v in p.projection_table(level, self.level, x, y))
                for y in range(n)
            )
            for x in range(n)
        )
        return CtsFunctor(p, level, self.on_objects, arrows)

    def minimal_level(self) -> int:
        """The least level through which this functor factors."""
        p = self.procat
        top = self.refine(p.top)
        for k in range(self.level + 1):
            ok = True
            for x in range(p.n_objects):
                for y in range(p.n_objects):
                    pr = p.projection_table(p.top, k, x, y)
                    seen: dict[int, tuple] = {}
                    for f, v in enumerate(pr):
                        t = top.on_arrows[x][y][f]
                        if seen.setdefault(v, t) != t:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                return k
        return self.level

    def coarsen(self, level: int) -> CtsFunctor:
        """Re-present at a coarser level; raises if the functor does not factor there."""
        if level >= self.level:
            return self.refine(level)
        p = self.procat
        n = p.n_objects
        c = p.levels[level]
        arrows = []
        for x in range(n):
            row = []
            for y in range(n):
                pr = p.projection_table(self.level, level, x, y)
                tabs: list = [None] * c.homs[x][y].size
                for f, v in enumerate(pr):
                    t = self.on_arrows[x][y][f]
                    if tabs[v] is None:
                        tabs[v] = t
                    elif tabs[v] != t:
                        raise ShapeError(f"functor does not factor through level {level}")
                row.append(tuple(tabs))
            arrows.append(tuple(row))
        return CtsFunctor(p, level, self.on_objects, tuple(arrows))


def common_level(*fs_: CtsFunctor) -> list[CtsFunctor]:
    p = fs_[0].procat
    for f in fs_:
        if f.procat != p:
            raise ShapeError("functors live on different ProCats")
    m = max(f.level for f in fs_)
    return [f.refine(m) for f in fs_]


def check_functor(f: CtsFunctor) -> ValidationReport:
    rep = ValidationReport("functor")
    c = f.procat.levels[f.level]
    n = c.n_objects
    for x in range(n):
        rep.tick()
        idt = f.on_arrows[x][x][c.identities[x]]
        if idt != tuple(range(f.on_objects[x].size)):
            rep.add("identity", (x,), f"F(id) = {idt}")
    for x in range(n):
        for y in range(n):
            for z in range(n):
                comp = c.composition[x][y][z]
                for g in range(c.homs[y][z].size):
                    tg = f.on_arrows[y][z][g]
                    for h in range(c.homs[x][y].size):
                        rep.tick()
                        th = f.on_arrows[x][y][h]
                        lhs = f.on_arrows[x][z][comp[g][h]]
                        if any(lhs[a] != tg[th[a]] for a in range(len(th))):
                            rep.add("composition", ((y, z, g), (x, y, h)), "F(g∘f) != F(g)∘F(f)")
    return rep


def terminal_functor(p: ProCat, level: int = 0) -> CtsFunctor:
    return constant_functor(p, 1, level)


def empty_functor(p: ProCat, level: int = 0) -> CtsFunctor:
    return constant_functor(p, 0, level)


def constant_functor(p: ProCat, size: int, level: int = 0) -> CtsFunctor:
    return CtsFunctor.from_function(p, level, [size] * p.n_objects, lambda x, y, f, a: a)


def corepresentable(p: ProCat, x: int, level: int) -> CtsFunctor:
    """``Hom_level(x, -)``, acting by postcomposition."""
    c = p.levels[level]
    n = p.n_objects
    sizes = [c.homs[x][y].size for y in range(n)]
    return CtsFunctor.from_function(p, level, sizes, lambda y, z, g, phi: c.composition[x][y][z][g][phi])


@dataclass(frozen=True, eq=True)
class NatTrans:
    source: CtsFunctor
    target: CtsFunctor
    components: tuple[FinMap, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if self.source.procat != self.target.procat:
            raise ShapeError("source and target live on different ProCats")
        n = self.source.procat.n_objects
        if len(comps) != n:
            raise ShapeError(f"need one component per object ({n})")
        for x, m in enumerate(comps):
            if m.source.size != self.source.on_objects[x].size or m.target.size != self.target.on_objects[x].size:
                raise ShapeError(f"component {x} has the wrong shape")

    def __hash__(self):
        return hash((self.source, self.target, self.tables))

    @classmethod
    def from_tables(cls, source: CtsFunctor, target: CtsFunctor, tables) -> NatTrans:
        return cls(source, target, tuple(FinMap(source.on_objects[x], target.on_objects[x], tuple(t)) for x, t in enumerate(tables)))

    @property
    def tables(self) -> tuple[tuple[int, ...], ...]:
        return tuple(m.table for m in self.components)

    def component(self, x: int) -> FinMap:
        return self.components[x]


def check_nat_trans(t: NatTrans) -> ValidationReport:
    rep = ValidationReport("natural transformation")
    s, g = common_level(t.source, t.target)
    c = s.procat.levels[s.level]
    for x, y, f in c.arrows():
        tx, ty = t.components[x].table, t.components[y].table
        sf, gf = s.on_arrows[x][y][f], g.on_arrows[x][y][f]
        for a in range(len(tx)):
            rep.tick()
            if ty[sf[a]] != gf[tx[a]]:
                rep.add("naturality", (x, y, f, a))
    return rep


def identity_nat(f: CtsFunctor) -> NatTrans:
    return NatTrans(f, f, tuple(FinMap.identity(o) for o in f.on_objects))


def compose_nat(t: NatTrans, s: NatTrans) -> NatTrans:
    """``t ∘ s``."""
    if s.target.on_objects != t.source.on_objects:
        raise ShapeError("natural transformations are not composable")
    return NatTrans(s.source, t.target, tuple(b.compose(a) for a, b in zip(s.components, t.components)))


def _non_identity_arrows(c, x):
    for y in range(c.n_objects):
        for f in range(c.homs[x][y].size):
            if x == y and f == c.identities[x]:
                continue
            yield y, f


def propagate_search(
    src_sizes: Sequence[int], tgt_sizes: Sequence[int], out, injective: bool = False, budget: Optional[int] = None
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Enumerate families of maps ``η_k: src_k -> tgt_k`` subject to
    ``η_l(s(a)) = t(η_k(a))`` for every edge ``(l, s, t)`` in ``out[k]``.

    Depth-first search with forward propagation: assigning ``η_k(a) = v``
    forces ``η_l(s[a]) = t[v]`` along every edge, and conflicts prune the
    branch. Solutions come out in lexicographic order of the flattened tables.
    ``budget`` bounds the number of tried assignments; the enumeration stops
    silently once it is spent, so a budgeted run yields a prefix.
    """
    groups = len(src_sizes)
    if injective and list(src_sizes) != list(tgt_sizes):
        return
    for k in range(groups):
        if src_sizes[k] > 0 and tgt_sizes[k] == 0:
            return
    assign: list[list[Optional[int]]] = [[None] * src_sizes[k] for k in range(groups)]
    used = [set() for _ in range(groups)]
    order = [(k, a) for k in range(groups) for a in range(src_sizes[k])]
    trail: list[tuple[int, int]] = []
    spent = [0]

    def push(k0, a0, v0) -> bool:
        queue = [(k0, a0, v0)]
        while queue:
            k, a, v = queue.pop()
            cur = assign[k][a]
            if cur is not None:
                if cur != v:
                    return False
                continue
            if injective and v in used[k]:
                return False
            assign[k][a] = v
            used[k].add(v)
            trail.append((k, a))
            for l, st, tt in out[k]:
                queue.append((l, st[a], tt[v]))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            k, a = trail.pop()
            used[k].discard(assign[k][a])
            assign[k][a] = None

    def search(i: int):
        while i < len(order) and assign[order[i][0]][order[i][1]] is not None:
            i += 1
        if i == len(order):
            yield tuple(tuple(row) for row in assign)
            return
        k, a = order[i]
        for v in range(tgt_sizes[k]):
            if budget is not None:
                spent[0] += 1
                if spent[0] > budget:
                    return
            mark = len(trail)
            if push(k, a, v):
                yield from search(i + 1)
            undo(mark)

    yield from search(0)


def _nat_solutions(f: CtsFunctor, g: CtsFunctor, injective: bool = False, budget: Optional[int] = None) -> Iterator[tuple[tuple[int, ...], ...]]:
    f, g = common_level(f, g)
    c = f.procat.levels[f.level]
    out = [[(y, f.on_arrows[x][y][phi], g.on_arrows[x][y][phi]) for y, phi in _non_identity_arrows(c, x)] for x in range(c.n_objects)]
    return propagate_search(f.sizes, g.sizes, out, injective, budget)


def nat_trans_set(f: CtsFunctor, g: CtsFunctor, limit: Optional[int] = None, budget: Optional[int] = None) -> list[NatTrans]:
    """Every natural transformation ``f -> g``, in canonical order.

    ``limit`` keeps only the first that many; ``budget`` caps the search
    effort (see :func:`propagate_search`).
    """
    out = []
    for sol in _nat_solutions(f, g, budget=budget):
        if limit is not None and len(out) >= limit:
            break
        out.append(NatTrans.from_tables(f, g, sol))
    return out


def count_nat_trans(f: CtsFunctor, g: CtsFunctor) -> int:
    return sum(1 for _ in _nat_solutions(f, g))


def find_isomorphism(f: CtsFunctor, g: CtsFunctor) -> Optional[NatTrans]:
    for sol in _nat_solutions(f, g, injective=True):
        return NatTrans.from_tables(f, g, sol)
    return None


def is_isomorphic(f: CtsFunctor, g: CtsFunctor) -> bool:
    return find_isomorphism(f, g) is not None


def is_mono(t: NatTrans) -> bool:
    return all(m.is_injective() for m in t.components)


def is_effective_epi(t: NatTrans) -> bool:
    return all(m.is_surjective() for m in t.components)


def is_iso(t: NatTrans) -> bool:
    return all(m.is_bijective() for m in t.components)


# -- pointwise limits and colimits -------------------------------------------


def functor_product(f: CtsFunctor, g: CtsFunctor) -> tuple[CtsFunctor, NatTrans, NatTrans]:
    f, g = common_level(f, g)
    gs = g.sizes

    def act(x, y, phi, i):
        a, b = divmod(i, gs[x])
        return pair_index(f.on_arrows[x][y][phi][a], g.on_arrows[x][y][phi][b], gs[y])

    sizes = [a * b for a, b in zip(f.sizes, gs)]
    p = CtsFunctor.from_function(f.procat, f.level, sizes, act)
    prods = [fs.product(f.on_objects[x], g.on_objects[x]) for x in range(len(sizes))]
    p1 = NatTrans(p, f, tuple(FinMap(p.on_objects[x], f.on_objects[x], pr[1].table) for x, pr in enumerate(prods)))
    p2 = NatTrans(p, g, tuple(FinMap(p.on_objects[x], g.on_objects[x], pr[2].table) for x, pr in enumerate(prods)))
    return p, p1, p2


def functor_coproduct(f: CtsFunctor, g: CtsFunctor) -> tuple[CtsFunctor, NatTrans, NatTrans]:
    f, g = common_level(f, g)
    fsz = f.sizes

    def act(x, y, phi, i):
        if i < fsz[x]:
            return f.on_arrows[x][y][phi][i]
        return fsz[y] + g.on_arrows[x][y][phi][i - fsz[x]]

    sizes = [a + b for a, b in zip(fsz, g.sizes)]
    s = CtsFunctor.from_function(f.procat, f.level, sizes, act)
    i1 = NatTrans(f, s, tuple(FinMap(f.on_objects[x], s.on_objects[x], tuple(range(fsz[x]))) for x in range(len(sizes))))
    i2 = NatTrans(g, s, tuple(FinMap(g.on_objects[x], s.on_objects[x], tuple(range(fsz[x], sizes[x]))) for x in range(len(sizes))))
    return s, i1, i2


def coproduct_many(parts: Sequence[CtsFunctor], p: Optional[ProCat] = None, level: int = 0) -> tuple[CtsFunctor, list[NatTrans]]:
    """Coproduct of a list of functors with its insertions (block order)."""
    if not parts:
        e = empty_functor(p, level)
        return e, []
    parts = common_level(*parts)
    lv = parts[0].level
    procat = parts[0].procat
    n = procat.n_objects
    offsets = []
    run = [0] * n
    for q in parts:
        offsets.append(list(run))
        run = [r + s for r, s in zip(run, q.sizes)]
    owner: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for k, q in enumerate(parts):
        for x in range(n):
            owner[x].extend((k, a) for a in range(q.sizes[x]))

    def act(x, y, phi, i):
        k, a = owner[x][i]
        return offsets[k][y] + parts[k].on_arrows[x][y][phi][a]

    s = CtsFunctor.from_function(procat, lv, run, act)
    ins = [
        NatTrans(q, s, tuple(FinMap(q.on_objects[x], s.on_objects[x], tuple(range(offsets[k][x], offsets[k][x] + q.sizes[x]))) for x in range(n)))
        for k, q in enumerate(parts)
    ]
    return s, ins


def _parallel(s: NatTrans, t: NatTrans) -> None:
    if s.source.on_objects != t.source.on_objects or s.target.on_objects != t.target.on_objects:
        raise ShapeError("natural transformations are not parallel")


def functor_equaliser(s: NatTrans, t: NatTrans) -> tuple[CtsFunctor, NatTrans]:
    _parallel(s, t)
    f = common_level(s.source, t.source)[0]
    keep = [fs.equaliser(s.components[x], t.components[x])[1].table for x in range(f.procat.n_objects)]
    return _restrict(f, keep)


def _restrict(f: CtsFunctor, keep: Sequence[Sequence[int]]) -> tuple[CtsFunctor, NatTrans]:
    """The subfunctor on the listed elements (which must be arrow-closed)."""
    pos = [{v: i for i, v in enumerate(k)} for k in keep]

    def act(x, y, phi, i):
        return pos[y][f.on_arrows[x][y][phi][keep[x][i]]]

    e = CtsFunctor.from_function(f.procat, f.level, [len(k) for k in keep], act)
    inc = NatTrans(e, f, tuple(FinMap(e.on_objects[x], f.on_objects[x], tuple(keep[x])) for x in range(len(keep))))
    return e, inc


def _quotient(g: CtsFunctor, projections: Sequence[FinMap]) -> tuple[CtsFunctor, NatTrans]:
    """Functor structure on pointwise quotients, induced from ``g``."""
    n = g.procat.n_objects
    reps = []
    for x in range(n):
        r: dict[int, int] = {}
        for a, c in enumerate(projections[x].table):
            r.setdefault(c, a)
        reps.append(r)

    def act(x, y, phi, c):
        return projections[y].table[g.on_arrows[x][y][phi][reps[x][c]]]

    q = CtsFunctor.from_function(g.procat, g.level, [projections[x].target.size for x in range(n)], act)
    proj = NatTrans(g, q, tuple(FinMap(g.on_objects[x], q.on_objects[x], projections[x].table) for x in range(n)))
    return q, proj


def functor_coequaliser(s: NatTrans, t: NatTrans) -> tuple[CtsFunctor, NatTrans]:
    _parallel(s, t)
    g = common_level(s.target, t.target)[0]
    projs = [fs.coequaliser(s.components[x], t.components[x])[1] for x in range(g.procat.n_objects)]
    return _quotient(g, projs)


def functor_pullback(s: NatTrans, t: NatTrans) -> tuple[CtsFunctor, NatTrans, NatTrans]:
    """Fibre product of ``s: A -> C`` and ``t: B -> C``, computed as an equaliser inside A x B."""
    if s.target.on_objects != t.target.on_objects:
        raise ShapeError("pullback needs a common target")
    a, b = common_level(s.source, t.source)
    prod, p1, p2 = functor_product(a, b)
    n = a.procat.n_objects
    keep = [
        [i for i in range(prod.on_objects[x].size) if s.components[x].table[p1.components[x].table[i]] == t.components[x].table[p2.components[x].table[i]]]
        for x in range(n)
    ]
    pb, inc = _restrict(prod, keep)
    return pb, compose_nat(p1, inc), compose_nat(p2, inc)


def functor_image(t: NatTrans) -> tuple[CtsFunctor, NatTrans, NatTrans]:
    """Factor ``t`` as ``mono ∘ epi`` through its pointwise image."""
    b = common_level(t.source, t.target)[1]
    keep = [t.components[x].image() for x in range(b.procat.n_objects)]
    im, mono = _restrict(b, keep)
    pos = [{v: i for i, v in enumerate(k)} for k in keep]
    epi = NatTrans(t.source, im, tuple(FinMap(t.source.on_objects[x], im.on_objects[x], tuple(pos[x][v] for v in t.components[x].table)) for x in range(len(keep))))
    return im, epi, mono


# -- subfunctors and effective quotients --------------------------------------


@dataclass(frozen=True)
class Subfunctor:
    ambient: CtsFunctor
    subset: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "subset", tuple(frozenset(s) for s in self.subset))
        if len(self.subset) != self.ambient.procat.n_objects:
            raise ShapeError("need one subset per object")

    def first_open_arrow(self) -> Optional[tuple]:
        f = self.ambient
        c = f.procat.levels[f.level]
        for x, y, phi in c.arrows():
            t = f.on_arrows[x][y][phi]
            for a in sorted(self.subset[x]):
                if t[a] not in self.subset[y]:
                    return (x, y, phi, a)
        return None

    def is_closed(self) -> bool:
        return self.first_open_arrow() is None

    def to_functor(self) -> tuple[CtsFunctor, NatTrans]:
        bad = self.first_open_arrow()
        if bad is not None:
            raise ValidationError("arrow closure", bad)
        return _restrict(self.ambient, [sorted(s) for s in self.subset])

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.subset)


def generated_subfunctor(f: CtsFunctor, elements: Iterable[tuple[int, int]]) -> Subfunctor:
    """Smallest arrow-closed subset containing the given ``(object, element)`` pairs."""
    c = f.procat.levels[f.level]
    n = c.n_objects
    sub = [set() for _ in range(n)]
    stack = list(elements)
    while stack:
        x, a = stack.pop()
        if a in sub[x]:
            continue
        sub[x].add(a)
        for y in range(n):
            for t in f.on_arrows[x][y]:
                if t[a] not in sub[y]:
                    stack.append((y, t[a]))
    return Subfunctor(f, tuple(frozenset(s) for s in sub))


def subfunctor_lattice(f: CtsFunctor) -> list[Subfunctor]:
    """All arrow-closed subsets, smallest first, ties broken lexicographically."""
    n = f.procat.n_objects
    elems = [(x, a) for x in range(n) for a in range(f.sizes[x])]
    bit = {e: 1 << i for i, e in enumerate(elems)}
    principal = []
    for e in elems:
        g = generated_subfunctor(f, [e])
        principal.append(sum(bit[(x, a)] for x in range(n) for a in g.subset[x]))
    closed = {0}
    for pm in principal:
        closed |= {s | pm for s in closed}

    def decode(mask):
        return tuple(frozenset(a for (x2, a) in elems if x2 == x and mask & bit[(x2, a)]) for x in range(n))

    def key(mask):
        members = [i for i in range(len(elems)) if mask >> i & 1]
        return (len(members), members)

    return [Subfunctor(f, decode(m)) for m in sorted(closed, key=key)]


def kernel_pair_subfunctor(t: NatTrans) -> tuple[CtsFunctor, Subfunctor]:
    """The kernel pair of ``t`` as a subfunctor of ``source x source``."""
    a = t.source
    prod = functor_product(a, a)[0]
    sub = []
    for x in range(a.procat.n_objects):
        tab = t.components[x].table
        m = a.sizes[x]
        sub.append(frozenset(pair_index(i, j, m) for i in range(m) for j in range(m) if tab[i] == tab[j]))
    return prod, Subfunctor(prod, tuple(sub))


def subfunctor_relations(f: CtsFunctor, r: Subfunctor) -> list[fs.EquivRelation]:
    """Decode a subfunctor of ``f x f`` into one relation per object."""
    out = []
    for x in range(f.procat.n_objects):
        m = f.sizes[x]
        out.append(fs.EquivRelation(f.on_objects[x], frozenset(divmod(i, m) for i in r.subset[x])))
    return out


def equivalence_closure(f: CtsFunctor, seeds: Iterable[tuple[int, int, int]]) -> Subfunctor:
    """The smallest arrow-closed equivalence relation on ``f`` containing
    each ``(x, a, b)``, as a subfunctor of ``f x f``."""
    n = f.procat.n_objects
    c = f.procat.levels[f.level]
    parent = [list(range(f.sizes[x])) for x in range(n)]

    def find(x, a):
        while parent[x][a] != a:
            parent[x][a] = parent[x][parent[x][a]]
            a = parent[x][a]
        return a

    def union(x, a, b) -> bool:
        ra, rb = find(x, a), find(x, b)
        if ra == rb:
            return False
        parent[x][max(ra, rb)] = min(ra, rb)
        return True

    for x, a, b in seeds:
        union(x, a, b)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            for a in range(f.sizes[x]):
                r = find(x, a)
                if r == a:
                    continue
                for y in range(n):
                    for phi in range(c.homs[x][y].size):
                        tab = f.on_arrows[x][y][phi]
                        changed |= union(y, tab[a], tab[r])
    prod = functor_product(f, f)[0]
    sub = []
    for x in range(n):
        m = f.sizes[x]
        sub.append(frozenset(pair_index(i, j, m) for i in range(m) for j in range(m) if find(x, i) == find(x, j)))
    return Subfunctor(prod, tuple(sub))


def quotient_by_equiv_subfunctor(f: CtsFunctor, r: Subfunctor) -> tuple[CtsFunctor, NatTrans]:
    f, amb = common_level(f, r.ambient)
    prod = functor_product(f, f)[0]
    if amb != prod:
        raise ShapeError("relation is not a subfunctor of f x f")
    bad = r.first_open_arrow()
    if bad is not None:
        raise ValidationError("arrow closure", bad)
    rels = subfunctor_relations(f, r)
    projs = []
    for x, rel in enumerate(rels):
        v = rel.first_violation()
        if v is not None:
            raise ValidationError(v[0], (x, v[1]), "relation is not an equivalence relation at this object")
        projs.append(fs.quotient_by_equiv(rel)[1])
    return _quotient(f, projs)


def is_coequaliser_of_kernel_pair(t: NatTrans) -> bool:
    """Check that ``t`` is (isomorphic to) the coequaliser of its kernel pair."""
    a = t.source
    kp_prod, kp = kernel_pair_subfunctor(t)
    rel, inc = kp.to_functor()
    _, p1, p2 = functor_product(a, a)
    r1, r2 = compose_nat(p1, inc), compose_nat(p2, inc)
    q, proj = functor_coequaliser(r1, r2)
    # the induced comparison q -> target must be a well-defined bijection
    for x in range(a.procat.n_objects):
        cmp_: dict[int, int] = {}
        for i, c in enumerate(proj.components[x].table):
            if cmp_.setdefault(c, t.components[x].table[i]) != t.components[x].table[i]:
                return False
        if sorted(cmp_.values()) != list(range(t.target.sizes[x])):
            return False
    return True


# -- enumeration of functors ---------------------------------------------------


def enumerate_functors(p: ProCat, level: int, sizes: Sequence[int], rng: Optional[random.Random] = None) -> Iterator[CtsFunctor]:
    """Every functor ``Π_level -> Fin`` with the given value sizes.

    Variables are the entries ``F(φ)(a)``; the composition law
    ``F(g∘f)(a) = F(g)(F(f)(a))`` is propagated in all three directions.
    With ``rng`` the value order is shuffled, so the first result is a
    random functor.
    """
    c = p.levels[level]
    n = c.n_objects
    arrows = list(c.arrows())
    aid = {a: i for i, a in enumerate(arrows)}
    src = [a[0] for a in arrows]
    tgt = [a[1] for a in arrows]
    by_first: list[list[tuple[int, int]]] = [[] for _ in arrows]
    by_second: list[list[tuple[int, int]]] = [[] for _ in arrows]
    by_comp: list[list[tuple[int, int]]] = [[] for _ in arrows]
    for fi, (x, y, f) in enumerate(arrows):
        for z in range(n):
            for g in range(c.homs[y][z].size):
                gi = aid[(y, z, g)]
                ki = aid[(x, z, c.composition[x][y][z][g][f])]
                by_first[fi].append((gi, ki))
                by_second[gi].append((fi, ki))
                by_comp[ki].append((fi, gi))
    val: list[list[Optional[int]]] = [[None] * sizes[src[i]] for i in range(len(arrows))]
    trail: list[tuple[int, int]] = []
    spent = [0]

    def push(i0, a0, b0) -> bool:
        queue = [(i0, a0, b0)]
        while queue:
            i, a, b = queue.pop()
            cur = val[i][a]
            if cur is not None:
                if cur != b:
                    return False
                continue
            val[i][a] = b
            trail.append((i, a))
            for g, k in by_first[i]:
                vb = val[g][b]
                if vb is not None:
                    queue.append((k, a, vb))
                else:
                    w = val[k][a]
                    if w is not None:
                        queue.append((g, b, w))
            for f, k in by_second[i]:
                for a2, fv in enumerate(val[f]):
                    if fv == a:
                        queue.append((k, a2, b))
            for f, g in by_comp[i]:
                fv = val[f][a]
                if fv is not None:
                    queue.append((g, fv, b))
        return True

    def undo(mark):
        while len(trail) > mark:
            i, a = trail.pop()
            val[i][a] = None

    for x in range(n):
        i = aid[(x, x, c.identities[x])]
        for a in range(sizes[x]):
            if not push(i, a, a):
                return
    order = [(i, a) for i in range(len(arrows)) for a in range(sizes[src[i]])]

    def build():
        acts = [[[None] * c.homs[x][y].size for y in range(n)] for x in range(n)]
        for i, (x, y, f) in enumerate(arrows):
            acts[x][y][f] = tuple(val[i])
        return CtsFunctor(p, level, tuple(FinSet(s) for s in sizes), acts)

    def search(j):
        while j < len(order) and val[order[j][0]][order[j][1]] is not None:
            j += 1
        if j == len(order):
            yield build()
            return
        i, a = order[j]
        values = list(range(sizes[tgt[i]]))
        if rng is not None:
            rng.shuffle(values)
        for b in values:
            mark = len(trail)
            if push(i, a, b):
                yield from search(j + 1)
            undo(mark)

    yield from search(0)


def all_functors(p: ProCat, level: int, max_size: int) -> Iterator[CtsFunctor]:
    """Every functor at ``level`` with all values of size at most ``max_size``."""
    from itertools import product as iproduct

    for sizes in iproduct(range(max_size + 1), repeat=p.n_objects):
        yield from enumerate_functors(p, level, sizes)


def random_functor(p: ProCat, level: int, max_size: int, rng: random.Random, attempts: int = 50) -> CtsFunctor:
    for _ in range(attempts):
        sizes = [rng.randint(0, max_size) for _ in range(p.n_objects)]
        for f in enumerate_functors(p, level, sizes, rng):
            return f
    return terminal_functor(p, level)
