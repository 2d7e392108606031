"""Command line driver: `microproof check`, `microproof search`,
`microproof serve`."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checker import check_source
from .errors import MicroProofError
from .prelude import MANIFEST, import_resolve, load_prelude


def _load_env(args, trace_simp=None, trace_module=None):
    prelude_dir = getattr(args, "prelude_path", None) \
        or os.environ.get("MICROPROOF_PRELUDE")
    return load_prelude(prelude_dir)


def cmd_check(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as f:
            source = f.read()
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror}",
              file=sys.stderr)
        return 2
    trace_simp = None
    if args.trace_simp:
        trace_simp = lambda name, before, after: print(
            f"[simp] {name}: {before} ==> {after}", file=sys.stderr)
    trace_module = None
    if args.trace_module:
        trace_module = lambda l, r: print(
            f"[module] normal forms:\n  {l}\n  {r}", file=sys.stderr)
    try:
        env = _load_env(args)
    except MicroProofError as e:
        print(f"error: prelude failed to load: {e.message}", file=sys.stderr)
        return 2
    result = check_source(env, source, module_name="Main",
                          import_resolver=import_resolve,
                          trace_simp=trace_simp, trace_module=trace_module)
    for d in result.diagnostics:
        d.file = args.file
        if args.json:
            print(json.dumps(d.to_json(), ensure_ascii=False))
        else:
            loc = f"{args.file}:{d.span.line}:{d.span.col}"
            print(f"{loc}: {d.severity}: {d.message}")
            if d.goal_render:
                for line in d.goal_render.splitlines():
                    print(f"    {line}")
    has_error = any(d.severity == "error" for d in result.diagnostics)
    has_warning = any(d.severity == "warning" for d in result.diagnostics)
    if has_error or (args.strict and has_warning):
        return 1
    return 0


def cmd_search(args) -> int:
    from .search import name_search

    try:
        env = _load_env(args)
    except MicroProofError as e:
        print(f"error: prelude failed to load: {e.message}", file=sys.stderr)
        return 2
    env = env.with_imports(set(MANIFEST))
    results = name_search(env, args.query)
    width = max((len(n) for n, _ in results), default=0)
    for name, sig in results:
        print(f"{name:<{width}}  {sig}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    try:
        env = _load_env(args)
    except MicroProofError as e:
        print(f"error: prelude failed to load: {e.message}", file=sys.stderr)
        return 2
    serve(env, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="microproof",
        description="A miniature interactive proof assistant")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check a proof file")
    c.add_argument("file")
    c.add_argument("--json", action="store_true",
                   help="emit one JSON diagnostic per line")
    c.add_argument("--strict", action="store_true",
                   help="treat warnings as errors")
    c.add_argument("--trace-simp", action="store_true",
                   help="trace every simp rewrite")
    c.add_argument("--trace-module", action="store_true",
                   help="print module-tactic normal forms on failure")
    c.add_argument("--prelude-path", default=None)
    c.set_defaults(fn=cmd_check)

    s = sub.add_parser("search", help="search declarations by name")
    s.add_argument("query")
    s.add_argument("--prelude-path", default=None)
    s.set_defaults(fn=cmd_search)

    v = sub.add_parser("serve", help="run the interactive session server")
    v.add_argument("--port", type=int, default=None,
                   help="listen on TCP instead of stdio")
    v.add_argument("--prelude-path", default=None)
    v.set_defaults(fn=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    code = args.fn(args)
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
