"""Galois categories and constructive exodromy over finite presentations.

Categories enriched in profinite sets are given as chains of finite
categories; continuous functors to finite sets are functors on one level of
the chain. The fundamental category of a finite family of fibre functors is
computed and cross-checked against natural transformations of evaluation
functors, and every continuous functor on it is realized as an honest object.
"""

from .exodromy import (
    RealizationTrace,
    canonical_cover,
    descend,
    ev,
    full_faithfulness_check,
    local_fullness_witness,
    psi_coinitiality_check,
    realize,
    reconstruction_check,
    subobject_realization,
)
from .finset import EquivRelation, FinMap, FinSet
from .funcat import CtsFunctor, NatTrans, Subfunctor, check_functor, check_nat_trans, corepresentable, nat_trans_set
from .galois import GaloisPresentation, fundamental_category, joint_conservativity_check, pi1
from .opcompact import ChainDiagram, opcompactness_check
from .procat import FinCat, ProCat, ProfiniteSet, chain_limit_nonempty, validate_fincat, validate_procat
from .report import GalcatError, ValidationError, ValidationReport
from .strat import StrataSpec, build_bg, build_strata, canned_examples

__all__ = [
    "ChainDiagram",
    "CtsFunctor",
    "EquivRelation",
    "FinCat",
    "FinMap",
    "FinSet",
    "GalcatError",
    "GaloisPresentation",
    "NatTrans",
    "ProCat",
    "ProfiniteSet",
    "RealizationTrace",
    "StrataSpec",
    "Subfunctor",
    "ValidationError",
    "ValidationReport",
    "build_bg",
    "build_strata",
    "canned_examples",
    "canonical_cover",
    "chain_limit_nonempty",
    "check_functor",
    "check_nat_trans",
    "corepresentable",
    "descend",
    "ev",
    "full_faithfulness_check",
    "fundamental_category",
    "joint_conservativity_check",
    "local_fullness_witness",
    "nat_trans_set",
    "opcompactness_check",
    "pi1",
    "psi_coinitiality_check",
    "realize",
    "reconstruction_check",
    "subobject_realization",
    "validate_fincat",
    "validate_procat",
]
