"""Batch command-line front end: parse, step, trace, check, bisim, encode,
serve.  Exit codes: 0 success, 1 usage/other failure (including
non-bisimilar pairs), 2 property violation."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .encode import EncodingError, print_ccsk, print_rccs, to_ccsk, to_rccs
from .equiv import bf_bisimilar, sbf_bisimilar
from .irlts import (ReplConfig, ReversibleProcess, enumerate_all,
                    initial_state, origin, parse_state, parse_trace,
                    print_state, random_trace, serialize_trace)
from .suites import SuiteReport, run_suite
from .syntax import SyntaxErrorCCS, parse_process, print_process


def _color_enabled() -> bool:
    return os.environ.get("IRCCS_COLOR", "1") != "0" and sys.stdout.isatty()


def _mark(ok: bool) -> str:
    word = "PASS" if ok else "FAIL"
    if _color_enabled():
        return f"\x1b[32m{word}\x1b[0m" if ok else f"\x1b[31m{word}\x1b[0m"
    return word


def _read_process(path: str):
    return parse_process(Path(path).read_text())


def _load_state(path: str, repl=None) -> ReversibleProcess:
    text = Path(path).read_text()
    if path.endswith(".state"):
        return parse_state(text.strip())
    if path.endswith(".trace"):
        return parse_trace(text).target
    return initial_state(parse_process(text))


def _repl_config(args) -> ReplConfig | None:
    if getattr(args, "repl", None):
        return ReplConfig(args.repl, not getattr(args, "no_marks", False))
    return None


def cmd_parse(args) -> int:
    p = _read_process(args.file)
    print(print_process(p))
    return 0


def cmd_step(args) -> int:
    repl = _repl_config(args)
    state = _load_state(args.file, repl)
    while True:
        print(print_state(state))
        moves = enumerate_all(state, repl)
        fwd = [t for t in moves if t.direction == "fwd"]
        for i, t in enumerate(moves):
            if t.direction == "fwd":
                print(f"  [{i}] {t.direction} {t.ident} {t.label}")
        if not moves:
            print("  (stuck)")
        try:
            cmd = input("step> ").strip()
        except EOFError:
            return 0
        if cmd in ("q", "quit", "exit"):
            return 0
        if cmd == "u":
            for i, t in enumerate(moves):
                if t.direction == "bwd":
                    print(f"  [{i}] {t.direction} {t.ident} {t.label}")
            if len(fwd) == len(moves):
                print("  (nothing to undo)")
            continue
        if cmd == "o":
            state = origin(state, repl)
            continue
        if cmd.isdigit() and int(cmd) < len(moves):
            state = moves[int(cmd)].target
            continue
        print("  enter a move number, 'u' for undo moves, 'o' for origin, 'q' to quit")


def cmd_trace(args) -> int:
    repl = _repl_config(args)
    state = _load_state(args.file, repl)
    d = random_trace(state, args.len, args.seed, repl)
    sys.stdout.write(serialize_trace(d))
    return 0


def cmd_check(args) -> int:
    repl = _repl_config(args)
    p = _read_process(args.file)
    names = args.suite.split(",") if args.suite != "all" else \
        ["axioms", "unicity", "causal", "conservativity"]
    bad = False
    for name in names:
        rep: SuiteReport = run_suite(name.strip(), p, depth=args.depth,
                                     repl=repl)
        print(f"{_mark(rep.ok)} {rep.name} ({rep.checked} checks)")
        for v in rep.violations[:10]:
            print(f"    {v}")
        bad = bad or not rep.ok
    return 2 if bad else 0


def cmd_bisim(args) -> int:
    r1 = initial_state(_read_process(args.file1))
    r2 = initial_state(_read_process(args.file2))
    checker = bf_bisimilar if args.mode == "bf" else sbf_bisimilar
    res = checker(r1, r2)
    if res:
        print(f"bisimilar ({args.mode}); witness relation "
              f"({len(res.witness)} triples):")
        print(res.witness_text())
        return 0
    print(f"not bisimilar ({args.mode}); distinguishing play:")
    for line in res.play:
        print("  " + line)
    return 1


def cmd_encode(args) -> int:
    if args.trace:
        state = parse_trace(Path(args.trace).read_text()).target
    else:
        state = _load_state(args.file)
    try:
        if args.target == "rccs":
            print(print_rccs(to_rccs(state)))
        else:
            print(print_ccsk(to_ccsk(state)))
    except EncodingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    serve(port=args.port, ui_dir=args.ui_dir, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="revccs",
        description="workbench for reversible CCS with identified transitions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a .ccs file and echo the term")
    p.add_argument("file")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("step", help="interactive terminal stepper")
    p.add_argument("file")
    p.add_argument("--repl", choices=["A", "B"])
    p.add_argument("--no-marks", action="store_true")
    p.set_defaults(fn=cmd_step)

    p = sub.add_parser("trace", help="emit a random trace")
    p.add_argument("file")
    p.add_argument("--len", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repl", choices=["A", "B"])
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("check", help="run property suites on a term")
    p.add_argument("file")
    p.add_argument("--suite", default="all",
                   help="axioms|unicity|causal|conservativity or a comma list")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--repl", choices=["A", "B"])
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("bisim", help="decide B&F / SB&F bisimilarity")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--mode", choices=["bf", "sbf"], default="bf")
    p.set_defaults(fn=cmd_bisim)

    p = sub.add_parser("encode", help="encode a state into RCCS or CCSK")
    p.add_argument("file", help=".ccs, .state or .trace file")
    p.add_argument("--target", choices=["rccs", "ccsk"], required=True)
    p.add_argument("--trace", help="replay this trace file first")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="static directory for the browser UI")
    p.set_defaults(fn=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SyntaxErrorCCS, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
