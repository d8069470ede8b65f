"""Symmetric Boolean promise CSPs: polymorphisms, classification, solvers and reductions."""

from .errors import PCSPError
from .relations import (
    NOT,
    SET_ONE,
    SET_ZERO,
    Family,
    Instance,
    PromiseRelation,
    Relation,
    Side,
    Status,
    brute_force_status,
    evaluate,
    flip,
    make_family,
    make_ham,
    make_instance,
    symmetric_profile,
)
from .polymorphisms import BoolFun, FamilyKind, has_family, make_named
from .classify import Classification, classify, classify_explicit
from .solvers import Verdict, solve

__version__ = "0.1.0"

__all__ = [
    "PCSPError",
    "NOT",
    "SET_ONE",
    "SET_ZERO",
    "Family",
    "Instance",
    "PromiseRelation",
    "Relation",
    "Side",
    "Status",
    "brute_force_status",
    "evaluate",
    "flip",
    "make_family",
    "make_ham",
    "make_instance",
    "symmetric_profile",
    "BoolFun",
    "FamilyKind",
    "has_family",
    "make_named",
    "Classification",
    "classify",
    "classify_explicit",
    "Verdict",
    "solve",
]
