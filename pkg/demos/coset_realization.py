"""Walk through the realization of S3 acting on three cosets.

    python3 demos/coset_realization.py
"""

from galcat.exodromy import ev, realize
from galcat.funcat import CtsFunctor, find_isomorphism
from galcat.galois import fundamental_category, pi1
from galcat.strat import canned_examples


def coset_action(g):
    pi = pi1(g)
    c = pi.levels[0]
    comp, e = c.composition[0][0][0], c.identities[0]
    t = next(f for f in range(6) if f != e and comp[f][f] == e)
    cosets = []
    for f in range(6):
        k = frozenset((comp[f][e], comp[f][t]))
        if k not in cosets:
            cosets.append(k)
    return CtsFunctor.from_function(pi, 0, [3], lambda x, y, f, a: cosets.index(frozenset(comp[f][s] for s in cosets[a])))


def main():
    g, doc = canned_examples()["bs3"]
    print(f"presentation: {doc}")
    fc = fundamental_category(g)
    print(f"fundamental category: hom sizes {fc.procat.levels[0].hom_sizes()}, cross-validated: {fc.validated}")

    f = coset_action(g)
    print(f"input functor: {list(f.sizes)} elements, arrows act by {[list(t) for t in f.on_arrows[0][0]]}")
    tr = realize(g, f)
    for line in tr.summary():
        print("  " + line)
    iso = find_isomorphism(ev(g, tr.quotient), f)
    print(f"independent isomorphism search agrees: {iso is not None}")


if __name__ == "__main__":
    main()
