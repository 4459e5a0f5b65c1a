"""Command-line interface.

Exit codes: 0 success, 1 parse or input error, 2 analysis error, 3 certificate
rejected.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .certificate import MalformedCertificate, check, read_certificate, write_certificate
from .certificate.serialize import dumps, program_hash
from .dce import optimize
from .frontend import ParseError, parse, pretty
from .lattice import Pts, UniverseMismatch
from .liveness import live_pre
from .pointsto import analyze
from .semantics import Bounds, format_outcomes, run
from .syntax import ATOMIC, Addr, Stmt, ValidationError, vars_of, walk

EXIT_PARSE = 1
EXIT_ANALYSIS = 2
EXIT_REJECT = 3

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _variables(text: str) -> frozenset[str]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    for v in names:
        if not _IDENT.match(v):
            raise argparse.ArgumentTypeError(f"not a variable name: {v!r}")
    return frozenset(names)


def _reps(text: str) -> frozenset[int]:
    try:
        reps = frozenset(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad repetition list: {text!r}") from None
    if not reps or min(reps) < 0:
        raise argparse.ArgumentTypeError("repetitions must be nonnegative integers")
    return reps


def _init(text: str) -> dict:
    env = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not _IDENT.match(name):
            raise argparse.ArgumentTypeError(f"bad binding {item!r}, expected x=3 or x=&y")
        if value.startswith("&") and _IDENT.match(value[1:]):
            env[name] = Addr(value[1:])
        elif re.fullmatch(r"-?\d+", value):
            env[name] = int(value)
        else:
            raise argparse.ArgumentTypeError(f"bad value {value!r} for {name}")
    return env


def _load_program(path: str) -> Stmt:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE) from None
    try:
        return parse(text)
    except ParseError as exc:
        raise CliError(f"{path}:{exc.line}:{exc.column}: {exc.message}", EXIT_PARSE) from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _label(s: Stmt) -> str:
    if isinstance(s, ATOMIC):
        return pretty(s, compact=True)
    return {"Seq": ";", "ParIf": "par-if", "ParFor": "par-for"}.get(
        type(s).__name__, type(s).__name__.lower()
    )


def _fmt_pts(p: Pts) -> str:
    parts = [f"{x}->{{{','.join(sorted(a))}}}" for x, a in sorted(p.items()) if a]
    return "{" + ", ".join(parts) + "}"


def _fmt_set(s) -> str:
    return "{" + ",".join(sorted(s)) + "}"


def _path_key(path) -> str:
    return ".".join(map(str, path)) or "."


def _annotation_text(program: Stmt, rows) -> str:
    lines = []
    for path, s in walk(program):
        pre, post = rows(path)
        lines.append(f"{_path_key(path):<12} {_label(s):<24} {pre}  ->  {post}")
    return "\n".join(lines) + "\n"


def _bounds(args) -> Bounds:
    return Bounds(args.fuel, args.reps)


def cmd_parse(args) -> int:
    program = _load_program(args.file)
    if args.format == "structured":
        _write(
            args.output,
            dumps(
                {
                    "program": pretty(program),
                    "program-hash": program_hash(program),
                    "variables": sorted(vars_of(program)),
                }
            ),
        )
    else:
        _write(args.output, pretty(program, compact=args.compact) + ("\n" if args.compact else ""))
    return 0


def cmd_run(args) -> int:
    program = _load_program(args.file)
    outcomes = run(program, args.init or {}, _bounds(args))
    lines = format_outcomes(outcomes)
    if args.format == "structured":
        _write(args.output, dumps({"outcomes": lines}))
    else:
        _write(args.output, "".join(line + "\n" for line in lines))
    return 0


def cmd_pts(args) -> int:
    program = _load_program(args.file)
    ann = analyze(program)
    if args.format == "structured":
        nodes = {
            _path_key(p): {"pre": n.pre.to_json(), "post": n.post.to_json()}
            for p, n in ann.nodes.items()
        }
        _write(args.output, dumps({"program-hash": program_hash(program), "kind": "pts", "nodes": nodes}))
    else:
        _write(
            args.output,
            _annotation_text(program, lambda p: (_fmt_pts(ann.pre(p)), _fmt_pts(ann.post(p)))),
        )
    return 0


def _live_annotation(program: Stmt, live: frozenset[str]):
    pre = Pts.bottom(vars_of(program) | live)
    return live_pre(program, analyze(program, pre), live)


def cmd_live(args) -> int:
    program = _load_program(args.file)
    ann = _live_annotation(program, args.live)
    if args.format == "structured":
        nodes = {
            _path_key(p): {"pre": ann.pre(p).to_json(), "post": ann.post(p).to_json()}
            for p in ann.nodes
        }
        _write(args.output, dumps({"program-hash": program_hash(program), "kind": "live", "nodes": nodes}))
    else:
        _write(
            args.output,
            _annotation_text(
                program, lambda p: (_fmt_set(ann.nodes[p].pre), _fmt_set(ann.nodes[p].post))
            ),
        )
    return 0


def cmd_optimize(args) -> int:
    program = _load_program(args.file)
    result = optimize(program, args.live)
    cert = args.cert or str(Path(args.file).with_suffix(".cert"))
    write_certificate(cert, result.derivation, program)
    if args.format == "structured":
        _write(
            args.output,
            dumps(
                {
                    "optimized": pretty(result.optimized),
                    "eliminated": [_path_key(p) for p in result.eliminated],
                    "certificate": cert,
                }
            ),
        )
    else:
        _write(args.output, pretty(result.optimized))
    return 0


def cmd_check(args) -> int:
    program = _load_program(args.program)
    try:
        d = read_certificate(args.certificate, program)
    except OSError as exc:
        raise CliError(f"{args.certificate}: {exc.strerror}", EXIT_PARSE) from None
    except MalformedCertificate as exc:
        raise CliError(f"{args.certificate}: malformed certificate: {exc}", EXIT_REJECT) from None
    verdict = check(d, program)
    if verdict and args.optimized:
        optimized = _load_program(args.optimized)
        if d.conclusion.transformed != optimized:
            raise CliError(
                f"{args.certificate}: certificate does not justify {args.optimized}", EXIT_REJECT
            )
    if args.format == "structured":
        _write(
            None,
            dumps(
                {
                    "accepted": verdict.accepted,
                    "path": list(verdict.path) if verdict.path is not None else None,
                    "reason": verdict.reason,
                    "rule": verdict.rule,
                }
            ),
        )
    if not verdict:
        raise CliError(f"{args.certificate}: {verdict}", EXIT_REJECT)
    if args.format != "structured":
        print(f"{args.certificate}: accepted ({d.conclusion.kind}, {d.size()} nodes)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pardce", description="Analyze, optimize and certify parallel pointer programs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_output=True):
        p.add_argument("--format", choices=("text", "structured"), default="text")
        if with_output:
            p.add_argument("-o", "--output", help="write the result here instead of stdout")

    p = sub.add_parser("parse", help="parse and pretty-print a program")
    p.add_argument("file")
    p.add_argument("--compact", action="store_true", help="print on one line")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", help="enumerate every outcome of a program")
    p.add_argument("file")
    p.add_argument("--init", type=_init, help="initial bindings, e.g. x=3,y=&z (default all zero)")
    p.add_argument("--fuel", type=int, default=16, help="loop unrolling bound (default 16)")
    p.add_argument("--reps", type=_reps, default=frozenset({0, 1, 2, 3}), help="par-for copies (default 0,1,2,3)")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pts", help="points-to annotation from the empty pre type")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_pts)

    for name, func, helptext in (
        ("live", cmd_live, "live-variable annotation"),
        ("optimize", cmd_optimize, "eliminate dead code and write a certificate"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("--live", type=_variables, required=True, help="variables live at the end, e.g. x,y")
        common(p)
        if name == "optimize":
            p.add_argument("--cert", help="certificate path (default: input with .cert suffix)")
        p.set_defaults(func=func)

    p = sub.add_parser("check", help="validate a certificate against its program")
    p.add_argument("certificate")
    p.add_argument("--program", required=True)
    p.add_argument("--optimized", help="also require the certificate to justify this program")
    common(p, with_output=False)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pardce: {exc}", file=sys.stderr)
        return exc.code
    except (UniverseMismatch, ValidationError, ValueError) as exc:
        print(f"pardce: {getattr(args, 'file', '')}: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
