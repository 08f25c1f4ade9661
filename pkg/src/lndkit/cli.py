"""Command-line client for the engine.

Thin by design: every subcommand parses flags into the same JSON document
the HTTP service accepts, calls the shared handler in-process, and prints
the response document.  Exit codes: 0 success, 1 domain error (with a
machine-readable error record on stdout), 2 usage errors.

`lndkit serve` starts the FastAPI service for multi-client use.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import LndkitError
from .service import handlers

_USAGE_EXIT = 2


def _read_document(args) -> dict:
    if getattr(args, "infile", None):
        with open(args.infile, "r", encoding="utf-8") as fh:
            return json.load(fh)
    if not sys.stdin.isatty():
        text = sys.stdin.read().strip()
        if text:
            return json.loads(text)
    return {}


def _write_document(args, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if getattr(args, "outfile", None):
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_io_flags(sub) -> None:
    sub.add_argument("--in", dest="infile", help="input JSON document (default: stdin)")
    sub.add_argument("--out", dest="outfile", help="output file (default: stdout)")
    sub.add_argument("--seed", type=int, default=0, help="seed for randomized paths")
    sub.add_argument("--bound", type=int, default=64, help="nilpotency iteration cap")
    sub.add_argument("--budget", type=int, default=None, help="retry/word budget override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lndkit",
        description="Exact engine for locally nilpotent derivations and friends",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    commands = [
        ("lnd-verify", "semi-decide local nilpotency of a derivation"),
        ("lnd-exp", "exponential flow of a certified derivation"),
        ("lnd-replica", "multiply a derivation by a kernel invariant"),
        ("aut-apply", "apply an automorphism word to a point"),
        ("aut-jet", "jet of a word at a fixed point"),
        ("jet-psi", "linearization form of a near-identity jet"),
        ("jet-kappa", "divergence contraction of a form tuple"),
        ("jet-realize", "realize a linear part by replica shears"),
        ("matrix-transport", "certified collective transport of matrices"),
        ("matrix-verify", "re-verify a transport certificate"),
        ("curve-interpolate", "orbit curve through prescribed points"),
        ("gallery", "run a worked example"),
    ]
    for name, help_text in commands:
        p = sub.add_parser(name, help=help_text)
        _add_io_flags(p)
        if name == "lnd-exp":
            p.add_argument("--time", default="1",
                           help='rational flow time, or "t" for symbolic')
        if name == "aut-apply":
            p.add_argument("--point", help="comma-separated rational point")
        if name == "aut-jet":
            p.add_argument("--point", help="comma-separated rational point")
            p.add_argument("--order", type=int, default=1)
        if name == "jet-realize":
            p.add_argument("--order", type=int, default=1,
                           help="identity order at frozen points")
        if name == "gallery":
            p.add_argument("--case", required=True,
                           choices=["nagata", "conter", "nonsep", "sl2"])
            p.add_argument("--p", type=int)
            p.add_argument("--q", type=int)
            p.add_argument("--m", type=int)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


_HANDLERS = {
    "lnd-verify": handlers.lnd_verify,
    "lnd-exp": handlers.lnd_exp,
    "lnd-replica": handlers.lnd_replica,
    "aut-apply": handlers.aut_apply,
    "aut-jet": handlers.aut_jet,
    "jet-psi": handlers.jet_psi,
    "jet-kappa": handlers.jet_kappa,
    "jet-realize": handlers.jet_realize,
    "matrix-transport": handlers.matrix_transport,
    "matrix-verify": handlers.matrix_verify,
    "curve-interpolate": handlers.curve_interpolate,
    "gallery": handlers.gallery,
}


def _document_from_args(args) -> dict:
    doc = _read_document(args)
    doc.setdefault("seed", args.seed)
    doc.setdefault("bound", args.bound)
    if args.budget is not None:
        doc["budget"] = args.budget
    if getattr(args, "time", None) is not None:
        doc.setdefault("time", args.time)
    if getattr(args, "order", None) is not None:
        doc.setdefault("order", args.order)
    if getattr(args, "point", None):
        doc["point"] = [v.strip() for v in args.point.split(",")]
    if args.command == "gallery":
        doc["case"] = args.case
        for key in ("p", "q", "m"):
            value = getattr(args, key)
            if value is not None:
                doc[key] = value
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return _USAGE_EXIT if exc.code not in (0, None) else 0

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    handler = _HANDLERS[args.command]
    try:
        doc = _document_from_args(args)
    except (json.JSONDecodeError, OSError) as exc:
        print(json.dumps({"error": "BadInput", "message": str(exc)}))
        return _USAGE_EXIT
    try:
        result = handler(doc)
    except LndkitError as exc:
        _write_document(args, exc.record())
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        print(json.dumps({"error": "BadInput", "message": str(exc)}))
        return _USAGE_EXIT
    _write_document(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
