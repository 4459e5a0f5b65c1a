"""Derivation certificates: emission, independent checking and serialization."""

from .checker import MalformedCertificate, Verdict, check
from .derivation import KINDS, RULES, Derivation, Judgement
from .emit import emit, emit_dce, emit_live, emit_pts, weaken
from .serialize import (
    derivation_from_json,
    derivation_to_json,
    dump_certificate,
    load_certificate,
    program_hash,
    read_certificate,
    write_certificate,
)

__all__ = [
    "KINDS",
    "RULES",
    "Derivation",
    "Judgement",
    "MalformedCertificate",
    "Verdict",
    "check",
    "derivation_from_json",
    "derivation_to_json",
    "dump_certificate",
    "emit",
    "emit_dce",
    "emit_live",
    "emit_pts",
    "load_certificate",
    "program_hash",
    "read_certificate",
    "weaken",
    "write_certificate",
]
