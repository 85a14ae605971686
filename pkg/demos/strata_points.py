"""How the choice of fibre points changes what evaluation can see.

On the open-closed example, the closed point alone cannot tell a functor
from its restriction to the closed stratum; both points together can.

    python3 demos/strata_points.py
"""

from galcat.exodromy import ev, subobject_realization
from galcat.funcat import CtsFunctor, Subfunctor, corepresentable
from galcat.galois import GaloisPresentation, faithfulness_check, joint_conservativity_check, pi1
from galcat.strat import canned_procat


def main():
    p = canned_procat("open-closed")
    for pts in ((0, 1), (1,)):
        g = GaloisPresentation(p, pts)
        rep = joint_conservativity_check(g)
        print(f"points {pts}: Π₁ homs {pi1(g).levels[0].hom_sizes()}, jointly conservative: {rep.ok}")

    h_u = corepresentable(p, 0, 0)
    b = CtsFunctor.from_function(p, 0, [2, 1], lambda x, y, f, a: a if x == y else 0)
    for pts in ((0, 1), (1,)):
        g = GaloisPresentation(p, pts)
        rep = faithfulness_check(g, h_u, b)
        print(f"points {pts}: maps h_U -> B told apart by evaluation: {rep.ok}")

    g = GaloisPresentation(p, (1,))
    s = Subfunctor(ev(g, h_u), (frozenset({0}),))
    lifted = subobject_realization(g, h_u, s)
    print(f"lift of the full subobject seen from the closed point: {[sorted(x) for x in lifted.subset]}")


if __name__ == "__main__":
    main()
