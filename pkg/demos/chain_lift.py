"""Lifting a map out of a chain limit to a finite stage.

D(0) = h + h receives D(1) = h by the first insertion. A careless pointwise
lift of the identity on the second copy fails naturality, and the witness
walks up one step to where the failure set is empty.

    python3 demos/chain_lift.py
"""

from galcat.funcat import corepresentable, functor_coproduct, identity_nat
from galcat.opcompact import ChainDiagram, opcompactness_check, pointwise_lift, surjectivity_witness
from galcat.strat import cyclic_chain


def main():
    p = cyclic_chain([2])
    h = corepresentable(p, 0, 0)
    hh, i1, _ = functor_coproduct(h, h)
    d = ChainDiagram([hh, h], [i1])
    alpha = identity_nat(h)

    for planted in ({(0, 2): 0, (0, 3): 0}, {(0, 2): 0, (0, 3): 1}):
        jx, j, lift = pointwise_lift(d, h, alpha, planted)
        e = surjectivity_witness(d, h, alpha, planted=planted)
        print(f"planted {planted}: lift at D({j}) = {list(lift[0])}")
        print(f"  failure set sizes per stage {e.y_sizes}, natural from stage {e.k}, verified {e.ok}")

    w = opcompactness_check(d, h)
    print(f"whole check: {len(w.injectivity)} injectivity entries, {len(w.surjectivity)} lifts, ok {w.ok}")


if __name__ == "__main__":
    main()
