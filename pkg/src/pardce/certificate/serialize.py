"""Canonical JSON encoding of derivations and certificate files.

Keys are sorted, sets are written as sorted lists and paths as lists of
steps, so equal derivations always serialize to identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path as FsPath

from ..frontend import ParseError, parse, pretty
from ..lattice import LiveType, Pts
from ..syntax import Stmt
from .checker import MalformedCertificate
from .derivation import KINDS, Derivation, Judgement

VERSION = "1"
_SET_KEYS = ("addrs", "exit")
_PTS_KEYS = ("invariant", "closure")


def program_hash(program: Stmt) -> str:
    return hashlib.sha256(pretty(program).encode("utf-8")).hexdigest()


def _type_to_json(t) -> dict:
    return t.to_json()


def _type_from_json(obj, kind: str):
    try:
        if kind == "pts":
            return _pts_from_json(obj)
        return LiveType(_pts_from_json(obj["pts"]), frozenset(_str_list(obj["live"])))
    except (KeyError, TypeError) as exc:
        raise MalformedCertificate(f"bad {kind} type: {exc}") from None


def _str_list(obj) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise MalformedCertificate(f"expected a list of variable names, got {obj!r}")
    return obj


def _pts_from_json(obj) -> Pts:
    if not isinstance(obj, dict):
        raise MalformedCertificate(f"expected a points-to map, got {obj!r}")
    return Pts({x: _str_list(a) for x, a in obj.items()})


def _side_to_json(side: dict) -> dict:
    out = {}
    for key, value in side.items():
        if key in _SET_KEYS:
            out[key] = sorted(value)
        elif key == "threads":
            out[key] = [_type_to_json(t) for t in value]
        elif isinstance(value, (Pts, LiveType)):
            out[key] = _type_to_json(value)
        else:
            out[key] = value
    return out


def _side_from_json(obj, kind: str) -> dict:
    if not isinstance(obj, dict):
        raise MalformedCertificate("side data must be an object")
    out = {}
    for key, value in obj.items():
        if key in _SET_KEYS:
            out[key] = frozenset(_str_list(value))
        elif key in _PTS_KEYS:
            out[key] = _pts_from_json(value)
        elif key == "threads":
            if not isinstance(value, list):
                raise MalformedCertificate("threads must be a list")
            out[key] = [_type_from_json(t, kind) for t in value]
        else:
            out[key] = value
    return out


def derivation_to_json(d: Derivation) -> dict:
    c = d.conclusion
    conclusion = {
        "kind": c.kind,
        "path": list(c.path),
        "pre": _type_to_json(c.pre),
        "post": _type_to_json(c.post),
    }
    if c.transformed is not None:
        conclusion["transformed"] = pretty(c.transformed, compact=True)
    return {
        "rule": d.rule,
        "conclusion": conclusion,
        "premises": [derivation_to_json(p) for p in d.premises],
        "side": _side_to_json(d.side),
    }


def _path_from_json(obj) -> tuple:
    if not isinstance(obj, list):
        raise MalformedCertificate("path must be a list")
    for k in obj:
        if isinstance(k, bool) or not isinstance(k, (int, str)):
            raise MalformedCertificate(f"bad path step {k!r}")
    return tuple(obj)


def derivation_from_json(obj) -> Derivation:
    if not isinstance(obj, dict):
        raise MalformedCertificate("derivation node must be an object")
    try:
        rule, c = obj["rule"], obj["conclusion"]
        kind = c["kind"]
        if kind not in KINDS:
            raise MalformedCertificate(f"unknown judgement kind {kind!r}")
        if not isinstance(rule, str):
            raise MalformedCertificate("rule name must be a string")
        transformed = None
        if "transformed" in c:
            try:
                transformed = parse(c["transformed"])
            except ParseError as exc:
                raise MalformedCertificate(f"unparsable transformed statement: {exc}") from None
        j = Judgement(
            kind,
            _path_from_json(c["path"]),
            _type_from_json(c["pre"], kind),
            _type_from_json(c["post"], kind),
            transformed,
        )
        premises = obj.get("premises", [])
        if not isinstance(premises, list):
            raise MalformedCertificate("premises must be a list")
        # side data of a live node refers to live types; pts nodes to pts types
        return Derivation(
            rule,
            j,
            tuple(derivation_from_json(p) for p in premises),
            _side_from_json(obj.get("side", {}), kind),
        )
    except KeyError as exc:
        raise MalformedCertificate(f"missing field {exc}") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def certificate_to_json(d: Derivation, program: Stmt) -> dict:
    return {
        "version": VERSION,
        "program-hash": program_hash(program),
        "kind": d.conclusion.kind,
        "derivation": derivation_to_json(d),
    }


def dump_certificate(d: Derivation, program: Stmt) -> str:
    return dumps(certificate_to_json(d, program))


def load_certificate(text: str, program: Stmt | None = None) -> Derivation:
    """Parse a certificate; with ``program`` given, also check its hash."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCertificate(f"not JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedCertificate("certificate must be an object")
    if obj.get("version") != VERSION:
        raise MalformedCertificate(f"unsupported certificate version {obj.get('version')!r}")
    d = derivation_from_json(obj.get("derivation"))
    if obj.get("kind") != d.conclusion.kind:
        raise MalformedCertificate("certificate kind differs from the root judgement")
    if program is not None and obj.get("program-hash") != program_hash(program):
        raise MalformedCertificate("certificate was issued for a different program")
    return d


def write_certificate(path: str | FsPath, d: Derivation, program: Stmt) -> None:
    FsPath(path).write_text(dump_certificate(d, program), encoding="utf-8")


def read_certificate(path: str | FsPath, program: Stmt | None = None) -> Derivation:
    return load_certificate(FsPath(path).read_text(encoding="utf-8"), program)
