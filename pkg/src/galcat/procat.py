"""Finite categories, their inverse chains, and profinite sets presented as chains.

A :class:`ProCat` is a chain ``Π_0 <- Π_1 <- ... <- Π_L`` of finite categories
on one object set, with identity-on-objects functors that are surjective on
every hom-set. Level 0 is the coarsest quotient; ``Π_L`` is the limit. A
:class:`ProfiniteSet` is the same idea for bare sets, and its clopen subsets
are handled by :class:`ClopenSet` and :class:`ClopenBasisQuery`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

from .finset import FinMap, FinSet, pair_index
from .report import ShapeError, ValidationError, ValidationReport

# composition[x][y][z][g][f] = g ∘ f for f: x -> y, g: y -> z
Table = tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=True)
class FinCat:
    objects: FinSet
    homs: tuple[tuple[FinSet, ...], ...]
    identities: tuple[int, ...]
    composition: tuple[tuple[tuple[Table, ...], ...], ...]

    def __post_init__(self):
        n = self.objects.size
        homs = tuple(tuple(row) for row in self.homs)
        object.__setattr__(self, "homs", homs)
        object.__setattr__(self, "identities", tuple(self.identities))
        comp = tuple(tuple(tuple(tuple(tuple(r) for r in t) for t in zs) for zs in ys) for ys in self.composition)
        object.__setattr__(self, "composition", comp)
        if len(homs) != n or any(len(r) != n for r in homs):
            raise ShapeError(f"hom matrix must be {n}x{n}")
        if len(self.identities) != n:
            raise ShapeError("one identity per object required")
        for x in range(n):
            if not 0 <= self.identities[x] < homs[x][x].size:
                raise ShapeError(f"identity of object {x} outside Hom({x},{x})")
        if len(comp) != n or any(len(c) != n or any(len(cc) != n for cc in c) for c in comp):
            raise ShapeError(f"composition must be indexed {n}x{n}x{n}")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    t = comp[x][y][z]
                    gs, fs, out = homs[y][z].size, homs[x][y].size, homs[x][z].size
                    if len(t) != gs or any(len(row) != fs for row in t):
                        raise ShapeError(f"composition table ({x},{y},{z}) must be {gs}x{fs}")
                    for row in t:
                        for v in row:
                            if not 0 <= v < out:
                                raise ShapeError(f"composition ({x},{y},{z}) lands outside Hom({x},{z})")

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.objects, self.homs, self.identities, self.composition))
            self.__dict__["_hash"] = h
        return h

    @classmethod
    def build(cls, objects, hom_sizes, identities, compose) -> FinCat:
        """Build from ``hom_sizes[x][y]`` and a function ``compose(x, y, z, g, f)``."""
        if isinstance(objects, int):
            objects = FinSet(objects)
        n = objects.size
        homs = tuple(tuple(h if isinstance(h, FinSet) else FinSet(h) for h in row) for row in hom_sizes)
        comp = tuple(
            tuple(
                tuple(
                    tuple(tuple(compose(x, y, z, g, f) for f in range(homs[x][y].size)) for g in range(homs[y][z].size))
                    for z in range(n)
                )
                for y in range(n)
            )
            for x in range(n)
        )
        return cls(objects, homs, tuple(identities), comp)

    @property
    def n_objects(self) -> int:
        return self.objects.size

    def hom(self, x: int, y: int) -> FinSet:
        return self.homs[x][y]

    def hom_size(self, x: int, y: int) -> int:
        return self.homs[x][y].size

    def identity(self, x: int) -> int:
        return self.identities[x]

    def compose(self, x: int, y: int, z: int, g: int, f: int) -> int:
        return self.composition[x][y][z][g][f]

    def arrows(self) -> Iterator[tuple[int, int, int]]:
        n = self.n_objects
        for x in range(n):
            for y in range(n):
                for f in range(self.homs[x][y].size):
                    yield x, y, f

    def n_arrows(self) -> int:
        return sum(h.size for row in self.homs for h in row)

    def hom_sizes(self) -> list[list[int]]:
        return [[h.size for h in row] for row in self.homs]

    def arrow_label(self, x: int, y: int, f: int) -> str:
        return self.homs[x][y].label(f)


def validate_fincat(c: FinCat) -> ValidationReport:
    rep = ValidationReport("fincat")
    n = c.n_objects
    for x, y, f in c.arrows():
        rep.tick(2)
        if c.compose(x, y, y, c.identities[y], f) != f:
            rep.add("left identity", (x, y, f))
        if c.compose(x, x, y, f, c.identities[x]) != f:
            rep.add("right identity", (x, y, f))
    for x in range(n):
        for y in range(n):
            for z in range(n):
                for w in range(n):
                    c_xyz = c.composition[x][y][z]
                    c_yzw = c.composition[y][z][w]
                    c_xzw = c.composition[x][z][w]
                    c_xyw = c.composition[x][y][w]
                    for h in range(c.homs[x][y].size):
                        for f in range(c.homs[y][z].size):
                            fh = c_xyz[f][h]
                            for g in range(c.homs[z][w].size):
                                rep.tick()
                                if c_xzw[g][fh] != c_xyw[c_yzw[g][f]][h]:
                                    rep.add("associativity", ((z, w, g), (y, z, f), (x, y, h)), "g∘(f∘h) != (g∘f)∘h")
    return rep


@dataclass(frozen=True, eq=True)
class ProCat:
    levels: tuple[FinCat, ...]
    # transitions[k][x][y]: level k+1 Hom(x, y) -> level k Hom(x, y)
    transitions: tuple[tuple[tuple[FinMap, ...], ...], ...] = ()

    def __post_init__(self):
        levels = tuple(self.levels)
        trans = tuple(tuple(tuple(row) for row in t) for t in self.transitions)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "transitions", trans)
        if not levels:
            raise ShapeError("a ProCat needs at least one level")
        objs = levels[0].objects
        for k, lv in enumerate(levels):
            if lv.objects.size != objs.size:
                raise ShapeError(f"level {k} has a different object set")
        if len(trans) != len(levels) - 1:
            raise ShapeError("need exactly one transition per consecutive pair of levels")
        n = objs.size
        for k, t in enumerate(trans):
            if len(t) != n or any(len(r) != n for r in t):
                raise ShapeError(f"transition {k} must be indexed {n}x{n}")
            for x in range(n):
                for y in range(n):
                    m = t[x][y]
                    if m.source.size != levels[k + 1].homs[x][y].size or m.target.size != levels[k].homs[x][y].size:
                        raise ShapeError(f"transition {k} on Hom({x},{y}) has the wrong shape")

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.levels, self.transitions))
            self.__dict__["_hash"] = h
        return h

    @classmethod
    def discrete(cls, c: FinCat) -> ProCat:
        """A single-level ProCat: finite homs with the discrete topology."""
        return cls((c,), ())

    @property
    def objects(self) -> FinSet:
        return self.levels[0].objects

    @property
    def n_objects(self) -> int:
        return self.levels[0].objects.size

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def level(self, k: int) -> FinCat:
        return self.levels[k]

    @cached_property
    def _projections(self) -> dict:
        # (m, k) -> [x][y] table from level m down to level k
        n = self.n_objects
        out = {}
        for m in range(self.depth):
            cur = [[tuple(range(self.levels[m].homs[x][y].size)) for y in range(n)] for x in range(n)]
            out[(m, m)] = cur
            for k in range(m - 1, -1, -1):
                t = self.transitions[k]
                cur = [[tuple(t[x][y].table[v] for v in cur[x][y]) for y in range(n)] for x in range(n)]
                out[(m, k)] = cur
        return out

    def projection_table(self, m: int, k: int, x: int, y: int) -> tuple[int, ...]:
        if k > m:
            raise ShapeError(f"cannot project from level {m} up to level {k}")
        return self._projections[(m, k)][x][y]

    def project(self, m: int, k: int, x: int, y: int, f: int) -> int:
        return self._projections[(m, k)][x][y][f]


def validate_procat(p: ProCat) -> ValidationReport:
    rep = ValidationReport("procat")
    for k, lv in enumerate(p.levels):
        rep.extend(validate_fincat(lv), prefix=f"level {k}: ")
    n = p.n_objects
    for k, t in enumerate(p.transitions):
        hi, lo = p.levels[k + 1], p.levels[k]
        for x in range(n):
            rep.tick()
            if t[x][x].table[hi.identities[x]] != lo.identities[x]:
                rep.add(f"transition {k}: identity", (x,))
            for y in range(n):
                rep.tick()
                if not t[x][y].is_surjective():
                    missing = sorted(set(range(lo.homs[x][y].size)) - set(t[x][y].table))
                    rep.add(f"transition {k}: surjectivity", (x, y, missing[0]), "level element not hit")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    for g in range(hi.homs[y][z].size):
                        for f in range(hi.homs[x][y].size):
                            rep.tick()
                            lhs = t[x][z].table[hi.composition[x][y][z][g][f]]
                            rhs = lo.composition[x][y][z][t[y][z].table[g]][t[x][y].table[f]]
                            if lhs != rhs:
                                rep.add(f"transition {k}: functoriality", ((y, z, g), (x, y, f)))
    return rep


@dataclass(frozen=True)
class ProfiniteSet:
    levels: tuple[FinSet, ...]
    transitions: tuple[FinMap, ...] = ()

    def __post_init__(self):
        levels = tuple(self.levels)
        trans = tuple(self.transitions)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "transitions", trans)
        if not levels:
            raise ShapeError("a profinite set needs at least one level")
        if len(trans) != len(levels) - 1:
            raise ShapeError("need one transition per consecutive pair of levels")
        for k, t in enumerate(trans):
            if t.source.size != levels[k + 1].size or t.target.size != levels[k].size:
                raise ShapeError(f"transition {k} has the wrong shape")
            if not t.is_surjective():
                raise ValidationError("surjective transitions", k, "image-truncate the system first")

    @classmethod
    def truncate_images(cls, levels: Sequence[FinSet], transitions: Sequence[FinMap]) -> ProfiniteSet:
        """Replace every level by the image of the limit, giving surjective transitions."""
        levels = list(levels)
        if not transitions:
            return cls(tuple(levels), ())
        keep = [list(range(levels[-1].size))]
        for k in range(len(levels) - 2, -1, -1):
            keep.insert(0, sorted({transitions[k].table[v] for v in keep[0]}))
        new_levels = tuple(FinSet(len(kp)) for kp in keep)
        new_trans = []
        for k in range(len(levels) - 1):
            pos = {v: i for i, v in enumerate(keep[k])}
            new_trans.append(FinMap(new_levels[k + 1], new_levels[k], tuple(pos[transitions[k].table[v]] for v in keep[k + 1])))
        return cls(new_levels, tuple(new_trans))

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    @property
    def limit(self) -> FinSet:
        return self.levels[-1]

    def projection(self, m: int, k: int) -> FinMap:
        """The composite transition from level ``m`` down to level ``k``."""
        if k > m:
            raise ShapeError(f"cannot project from level {m} up to level {k}")
        f = FinMap.identity(self.levels[m])
        for j in range(m - 1, k - 1, -1):
            f = self.transitions[j].compose(f)
        return f

    def fibre(self, k: int, e: int) -> frozenset:
        pr = self.projection(self.top, k).table
        return frozenset(w for w in range(self.limit.size) if pr[w] == e)

    def clopen(self, level: int, members) -> ClopenSet:
        return ClopenSet(self, level, frozenset(members))


@dataclass(frozen=True)
class ClopenSet:
    """``{ω | projection of ω to `level` lies in `members`}``."""

    pset: ProfiniteSet
    level: int
    members: frozenset

    def selection(self) -> frozenset:
        pr = self.pset.projection(self.pset.top, self.level).table
        return frozenset(w for w in range(self.pset.limit.size) if pr[w] in self.members)

    def refine(self, level: int) -> ClopenSet:
        pr = self.pset.projection(level, self.level).table
        return ClopenSet(self.pset, level, frozenset(e for e in range(len(pr)) if pr[e] in self.members))

    def complement(self) -> ClopenSet:
        return ClopenSet(self.pset, self.level, frozenset(range(self.pset.levels[self.level].size)) - self.members)

    def intersect(self, other: ClopenSet) -> ClopenSet:
        m = max(self.level, other.level)
        a, b = self.refine(m), other.refine(m)
        return ClopenSet(self.pset, m, a.members & b.members)

    def union(self, other: ClopenSet) -> ClopenSet:
        m = max(self.level, other.level)
        a, b = self.refine(m), other.refine(m)
        return ClopenSet(self.pset, m, a.members | b.members)


@dataclass(frozen=True)
class Probe:
    """Elements of one level acting as maps ``source -> target``.

    ``tables[e]`` is the map attached to level element ``e``. A hom-set acting
    on the values of a functor is the typical probe.
    """

    level: int
    source: FinSet
    target: FinSet
    tables: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ClopenBasisQuery:
    """Selects the elements whose level-``level`` image sends ``x`` to ``y``."""

    level: int
    element_constraint: tuple[int, int]
    probe: Probe

    def __post_init__(self):
        if self.probe.level != self.level:
            raise ShapeError("query level and probe level differ")

    def members(self) -> frozenset:
        x, y = self.element_constraint
        return frozenset(e for e, t in enumerate(self.probe.tables) if t[x] == y)

    def to_clopen(self, pset: ProfiniteSet) -> ClopenSet:
        return ClopenSet(pset, self.level, self.members())

    def select(self, pset: ProfiniteSet) -> frozenset:
        return self.to_clopen(pset).selection()


def refine_probe(pset: ProfiniteSet, probe: Probe, level: int) -> Probe:
    pr = pset.projection(level, probe.level).table
    return Probe(level, probe.source, probe.target, tuple(probe.tables[pr[e]] for e in range(len(pr))))


def product_probe(pset: ProfiniteSet, p: Probe, q: Probe) -> Probe:
    """Act on ``p.source x q.source`` by the pair of actions, at the finer level."""
    m = max(p.level, q.level)
    p, q = refine_probe(pset, p, m), refine_probe(pset, q, m)
    ns, nt = q.source.size, q.target.size
    tables = []
    for tp, tq in zip(p.tables, q.tables):
        tables.append(tuple(pair_index(tp[a], tq[b], nt) for a in range(p.source.size) for b in range(ns)))
    return Probe(m, FinSet(p.source.size * ns), FinSet(p.target.size * nt), tuple(tables))


def intersect_queries(pset: ProfiniteSet, q1: ClopenBasisQuery, q2: ClopenBasisQuery) -> ClopenBasisQuery:
    """``U(x,y) ∩ U(u,v) = U_×((x,u),(y,v))`` as a single query on the product probe."""
    probe = product_probe(pset, q1.probe, q2.probe)
    x, y = q1.element_constraint
    u, v = q2.element_constraint
    c = (pair_index(x, u, q2.probe.source.size), pair_index(y, v, q2.probe.target.size))
    return ClopenBasisQuery(probe.level, c, probe)


def hom_pro(p: ProCat, x: int, y: int) -> ProfiniteSet:
    n = p.n_objects
    if not (0 <= x < n and 0 <= y < n):
        raise ShapeError(f"objects {(x, y)} out of range for {n} objects")
    return ProfiniteSet(tuple(lv.homs[x][y] for lv in p.levels), tuple(t[x][y] for t in p.transitions))


def postcomposition_probe(p: ProCat, level: int, w: int, y: int, z: int) -> Probe:
    """``Hom_level(y, z)`` acting on ``Hom_level(w, y) -> Hom_level(w, z)`` by composition."""
    c = p.levels[level]
    comp = c.composition[w][y][z]
    return Probe(level, c.homs[w][y], c.homs[w][z], tuple(tuple(comp[g]) for g in range(c.homs[y][z].size)))


def chain_limit_nonempty(levels: Sequence[FinSet], transitions: Sequence[FinMap]) -> Optional[int]:
    """A point of the limit of ``levels[0] <- levels[1] <- ...``, or ``None``.

    The point is returned as its last-level element; :func:`compatible_family`
    recovers the whole thread. Transitions need not be surjective.
    """
    if not levels:
        raise ShapeError("empty chain")
    if len(transitions) != len(levels) - 1:
        raise ShapeError("need one transition per consecutive pair of levels")
    for k, t in enumerate(transitions):
        if t.source.size != levels[k + 1].size or t.target.size != levels[k].size:
            raise ShapeError(f"transition {k} has the wrong shape")
    if any(s.size == 0 for s in levels):
        return None
    return 0


def compatible_family(transitions: Sequence[FinMap], e: int) -> tuple[int, ...]:
    fam = [e]
    for t in reversed(transitions):
        fam.append(t.table[fam[-1]])
    return tuple(reversed(fam))
