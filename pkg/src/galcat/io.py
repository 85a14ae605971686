"""JSON interchange documents.

Every document is ``{"version": "1", "kind": ..., "body": ...}`` with kind one
of ``procat``, ``functor``, ``nattrans``, ``strata``, ``presentation``. All
integers are element indices. ``dumps`` writes the canonical form, so
``dumps(parse(dumps(x))) == dumps(x)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .finset import FinMap, FinSet
from .funcat import CtsFunctor, NatTrans
from .galois import GaloisPresentation
from .procat import FinCat, ProCat
from .report import GalcatError, ShapeError
from .strat import ExitSet, Group, StrataSpec, build_strata

FORMAT_VERSION = "1"
KINDS = ("procat", "functor", "nattrans", "strata", "presentation")


class ParseError(GalcatError, ValueError):
    """The document is malformed: bad JSON, unknown kind or version, wrong shapes."""


@dataclass
class Document:
    kind: str
    body: dict
    version: str = FORMAT_VERSION

    def to_json(self) -> dict:
        return {"version": self.version, "kind": self.kind, "body": self.body}


# -- encoders ------------------------------------------------------------------------


def _labels(s: FinSet):
    return list(s.labels) if s.labels is not None else s.size


def encode_fincat(c: FinCat) -> dict:
    return {
        "homs": [[h.size for h in row] for row in c.homs],
        "identities": list(c.identities),
        "composition": [[[[list(r) for r in t] for t in zs] for zs in ys] for ys in c.composition],
    }


def encode_procat(p: ProCat) -> dict:
    return {
        "objects": _labels(p.levels[0].objects),
        "levels": [encode_fincat(c) for c in p.levels],
        "transitions": [[[list(m.table) for m in row] for row in t] for t in p.transitions],
    }


def encode_functor(f: CtsFunctor) -> dict:
    return {
        "procat": encode_procat(f.procat),
        "level": f.level,
        "values": [s.size for s in f.on_objects],
        "arrows": [[[list(t) for t in col] for col in row] for row in f.on_arrows],
    }


def encode_nattrans(t: NatTrans) -> dict:
    return {"source": encode_functor(t.source), "target": encode_functor(t.target), "components": [list(m.table) for m in t.components]}


def encode_strata(spec: StrataSpec) -> dict:
    return {
        "strata": list(spec.strata),
        "groups": [[list(r) for r in g.table] for g in spec.groups],
        "exit_paths": [
            {"source": s, "target": t, "size": ex.size, "left": [list(r) for r in ex.left], "right": [list(r) for r in ex.right]}
            for (s, t), ex in sorted(spec.exit_paths.items())
        ],
        "composition": [{"path": list(k), "table": [list(r) for r in v]} for k, v in sorted(spec.composition_tables.items())],
    }


def encode_presentation(g: GaloisPresentation) -> dict:
    return {
        "procat": encode_procat(g.base),
        "fibre_points": list(g.fibre_points),
        "generator_bound": g.generator_bound,
        "max_members": g.max_members,
    }


_ENCODERS = {
    ProCat: ("procat", encode_procat),
    CtsFunctor: ("functor", encode_functor),
    NatTrans: ("nattrans", encode_nattrans),
    StrataSpec: ("strata", encode_strata),
    GaloisPresentation: ("presentation", encode_presentation),
}


def to_document(obj) -> Document:
    for cls, (kind, enc) in _ENCODERS.items():
        if isinstance(obj, cls):
            return Document(kind, enc(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    doc = obj if isinstance(obj, Document) else to_document(obj)
    return json.dumps(doc.to_json(), indent=1, sort_keys=True) + "\n"


# -- decoders ------------------------------------------------------------------------


def _need(d: Any, key: str, typ=None):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing field {key!r}")
    v = d[key]
    if typ is not None and not isinstance(v, typ):
        raise ParseError(f"field {key!r} should be {typ.__name__ if isinstance(typ, type) else typ}")
    return v


def _objects(v) -> FinSet:
    if isinstance(v, bool):
        raise ParseError("objects must be a count or a list of labels")
    if isinstance(v, int):
        return FinSet(v)
    if isinstance(v, list) and all(isinstance(s, str) for s in v):
        return FinSet(len(v), tuple(v))
    raise ParseError("objects must be a count or a list of labels")


def decode_fincat(d: dict, objects: FinSet) -> FinCat:
    homs = _need(d, "homs", list)
    return FinCat(
        objects,
        tuple(tuple(FinSet(h) for h in row) for row in homs),
        tuple(_need(d, "identities", list)),
        _need(d, "composition", list),
    )


def decode_procat(d: dict) -> ProCat:
    objects = _objects(_need(d, "objects"))
    levels = tuple(decode_fincat(c, objects) for c in _need(d, "levels", list))
    trans = []
    for k, t in enumerate(_need(d, "transitions", list)):
        if k + 1 >= len(levels):
            raise ParseError("more transitions than level pairs")
        lo, hi = levels[k], levels[k + 1]
        n = objects.size
        if len(t) != n or any(len(r) != n for r in t):
            raise ParseError(f"transition {k} must be an {n}x{n} matrix of tables")
        trans.append(tuple(tuple(FinMap(hi.homs[x][y], lo.homs[x][y], tuple(t[x][y])) for y in range(n)) for x in range(n)))
    return ProCat(levels, tuple(trans))


def decode_functor(d: dict) -> CtsFunctor:
    p = decode_procat(_need(d, "procat", dict))
    values = _need(d, "values", list)
    arrows = _need(d, "arrows", list)
    return CtsFunctor(p, _need(d, "level", int), tuple(FinSet(v) for v in values), tuple(tuple(tuple(tuple(t) for t in col) for col in row) for row in arrows))


def decode_nattrans(d: dict) -> NatTrans:
    src = decode_functor(_need(d, "source", dict))
    tgt = decode_functor(_need(d, "target", dict))
    comps = _need(d, "components", list)
    return NatTrans.from_tables(src, tgt, comps)


def decode_strata(d: dict) -> StrataSpec:
    groups = [Group(t) for t in _need(d, "groups", list)]
    exits = {}
    for e in _need(d, "exit_paths", list):
        exits[(_need(e, "source", int), _need(e, "target", int))] = ExitSet(_need(e, "size", int), _need(e, "left", list), _need(e, "right", list))
    comp = {}
    for e in d.get("composition", []):
        path = _need(e, "path", list)
        if len(path) != 3:
            raise ParseError("composition paths have three strata")
        comp[tuple(path)] = _need(e, "table", list)
    return StrataSpec(list(_need(d, "strata", list)), groups, exits, comp)


def decode_presentation(d: dict) -> GaloisPresentation:
    if "procat" in d:
        p = decode_procat(_need(d, "procat", dict))
    else:
        p = build_strata(decode_strata(_need(d, "strata", dict)))
    kw = {k: _need(d, k, int) for k in ("generator_bound", "max_members") if k in d}
    pts = d.get("fibre_points")
    if pts is None:
        return GaloisPresentation.all_points(p, **kw)
    return GaloisPresentation(p, tuple(pts), **kw)


_DECODERS = {
    "procat": decode_procat,
    "functor": decode_functor,
    "nattrans": decode_nattrans,
    "strata": decode_strata,
    "presentation": decode_presentation,
}


def parse_document(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not JSON: {exc}") from None
    kind = _need(raw, "kind", str)
    version = _need(raw, "version", str)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}")
    return Document(kind, _need(raw, "body", dict), version)


def decode(doc: Document):
    """Build the object a document describes; shape problems become :class:`ParseError`."""
    try:
        return _DECODERS[doc.kind](doc.body)
    except ParseError:
        raise
    except (ShapeError, TypeError, IndexError, KeyError) as exc:
        raise ParseError(f"bad {doc.kind} body: {exc}") from None


def loads(text: str):
    doc = parse_document(text)
    return doc.kind, decode(doc)


def load(path: str):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def as_presentation(kind: str, obj, points=None) -> GaloisPresentation:
    """Promote a procat, strata spec or presentation to a presentation."""
    if kind == "presentation":
        g = obj
    elif kind == "procat":
        g = GaloisPresentation.all_points(obj)
    elif kind == "strata":
        g = GaloisPresentation.all_points(build_strata(obj))
    else:
        raise ParseError(f"a {kind} document does not describe a presentation")
    if points is not None:
        g = GaloisPresentation(g.base, tuple(points), g.generator_bound, g.max_members)
    return g
