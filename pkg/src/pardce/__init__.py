"""Analyses and dead-code elimination for a small parallel pointer language.

The pipeline: ``parse`` a program, ``analyze`` points-to types, compute
``live_pre`` live sets, ``optimize`` away dead assignments, and ``emit`` a
derivation that ``check`` validates independently of the analyses.
"""

from .certificate import Derivation, Judgement, MalformedCertificate, Verdict, check, emit
from .dce import OptResult, eliminate, optimize
from .frontend import GrammarRestrictionError, ParseError, ProgramSyntaxError, parse, pretty
from .lattice import LiveType, Pts, UniverseMismatch, models, models_l, pts_join, pts_leq
from .liveness import LiveAnnotation, live_pre
from .pointsto import PtsAnnotation, addr_of_expr, analyze
from .semantics import ABORT, FUEL_EXHAUSTED, Bounds, State, run
from .syntax import vars_of

__all__ = [
    "ABORT",
    "FUEL_EXHAUSTED",
    "Bounds",
    "Derivation",
    "GrammarRestrictionError",
    "Judgement",
    "LiveAnnotation",
    "LiveType",
    "MalformedCertificate",
    "OptResult",
    "ParseError",
    "ProgramSyntaxError",
    "Pts",
    "PtsAnnotation",
    "State",
    "UniverseMismatch",
    "Verdict",
    "addr_of_expr",
    "analyze",
    "check",
    "eliminate",
    "emit",
    "live_pre",
    "models",
    "models_l",
    "optimize",
    "parse",
    "pretty",
    "pts_join",
    "pts_leq",
    "run",
    "vars_of",
]
