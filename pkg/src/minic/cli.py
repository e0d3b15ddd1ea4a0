"""Command-line entry point: ``minic run FILE`` and ``minic check DIR``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import CompileError
from .interpreter import DEFAULT_MAX_DEPTH, DEFAULT_MAX_STEPS, ExecOutcome, compile_source, run_program

EXIT_ABORT = 134
EXIT_FRONTEND = 2
EXIT_IO = 3

ERRNO_NAMES = {"EINVAL": 22}


# -- expectation files ------------------------------------------------------------


class ExpectError(ValueError):
    pass


@dataclass
class Expectation:
    outcome: str  # "exit" or "abort"
    status: int | None = None
    kinds: tuple[str, ...] = ()
    stdout: str = ""
    stdin: bytes = b""
    errno: int | None = None


def _fenced(lines: list[str], i: int, key: str) -> tuple[str, int]:
    if i >= len(lines) or not lines[i].startswith("```"):
        raise ExpectError(f"'{key}:' must be followed by a fenced block")
    body = []
    i += 1
    while i < len(lines) and lines[i].rstrip("\n") != "```":
        body.append(lines[i])
        i += 1
    if i >= len(lines):
        raise ExpectError(f"unterminated fenced block after '{key}:'")
    return "".join(body), i + 1


def parse_expect(text: str) -> Expectation:
    """Parse the line-oriented ``key: value`` format with fenced stdout/stdin blocks.

    The block text keeps its trailing newline; a block whose last line should
    not end in a newline cannot be expressed, which the corpus never needs.
    """
    lines = text.splitlines(keepends=True)
    fields: dict = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ExpectError(f"line {i}: expected 'key: value'")
        if key in fields:
            raise ExpectError(f"line {i}: duplicate key '{key}'")
        if key in ("stdout", "stdin"):
            fields[key], i = _fenced(lines, i, key)
        elif key in ("outcome", "errno"):
            fields[key] = value
        else:
            raise ExpectError(f"line {i}: unknown key '{key}'")
    if "outcome" not in fields:
        raise ExpectError("missing 'outcome:'")
    words = fields["outcome"].split()
    exp = Expectation(outcome=words[0] if words else "")
    if exp.outcome == "exit" and len(words) == 2 and words[1].lstrip("-").isdigit():
        exp.status = int(words[1])
    elif exp.outcome == "abort" and len(words) == 2:
        exp.kinds = tuple(words[1].split("|"))
    else:
        raise ExpectError(f"bad outcome '{fields['outcome']}'")
    exp.stdout = fields.get("stdout", "")
    exp.stdin = fields.get("stdin", "").encode("utf-8")
    if "errno" in fields:
        name = fields["errno"]
        if name not in ERRNO_NAMES:
            raise ExpectError(f"unknown errno name '{name}'")
        exp.errno = ERRNO_NAMES[name]
    return exp


def compare(exp: Expectation, out: ExecOutcome) -> list[str]:
    """Mismatches between an expectation and an outcome; empty means pass."""
    problems = []
    if exp.outcome == "exit":
        if out.kind != "exit" or out.exit_code != exp.status:
            problems.append(f"expected exit {exp.status}, got {describe(out)}")
    elif out.kind != "aborted" or out.aborted_kind not in exp.kinds:
        problems.append(f"expected abort {'|'.join(exp.kinds)}, got {describe(out)}")
    stdout = out.stdout.decode("utf-8", "replace")
    if stdout != exp.stdout:
        problems.append(f"stdout differs: expected {exp.stdout!r}, got {stdout!r}")
    if exp.errno is not None and out.errno != exp.errno:
        problems.append(f"expected errno {exp.errno}, got {out.errno}")
    return problems


def describe(out: ExecOutcome) -> str:
    if out.kind == "aborted":
        return f"abort {out.aborted_kind}"
    return f"exit {out.exit_code}"


# -- verbs ----------------------------------------------------------------------


def _limits(args) -> tuple[int, int]:
    steps = args.max_steps
    if steps is None:
        env = os.environ.get("MINIC_MAX_STEPS")
        steps = int(env) if env and env.strip().isdigit() else DEFAULT_MAX_STEPS
    return steps, args.max_depth


def _report(diag, as_json: bool) -> None:
    if as_json:
        sys.stderr.write(json.dumps(diag.to_json()) + "\n")
    else:
        sys.stderr.write(f"minic: {diag}\n")


def cmd_run(args) -> int:
    try:
        source = Path(args.file).read_text(encoding="utf-8")
        if args.stdin is not None:
            stdin = Path(args.stdin).read_bytes()
        elif sys.stdin is not None and not sys.stdin.isatty():
            stdin = sys.stdin.buffer.read()
        else:
            stdin = b""
    except (OSError, UnicodeDecodeError) as e:
        sys.stderr.write(f"minic: cannot read input: {e}\n")
        return EXIT_IO
    max_steps, max_depth = _limits(args)
    try:
        program = compile_source(source, args.file)
        out = run_program(program, [args.file, *args.args], stdin, max_steps=max_steps, max_depth=max_depth)
    except CompileError as e:
        _report(e.diagnostic, args.json)
        return EXIT_FRONTEND
    sys.stdout.buffer.write(out.stdout)
    sys.stdout.flush()
    sys.stderr.buffer.write(out.stderr)
    if out.kind == "aborted":
        _report(out.diagnostic, args.json)
        return EXIT_ABORT
    if out.note and not args.json:
        sys.stderr.write(f"minic: {out.note}\n")
    return out.exit_code


@dataclass
class CheckResult:
    name: str
    ok: bool
    problems: list[str]


def check_one(c_file: Path, max_steps: int, max_depth: int) -> CheckResult:
    expect_file = c_file.with_suffix(".expect")
    name = c_file.name
    try:
        exp = parse_expect(expect_file.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return CheckResult(name, False, [f"missing {expect_file.name}"])
    except (OSError, ExpectError) as e:
        return CheckResult(name, False, [f"bad {expect_file.name}: {e}"])
    try:
        program = compile_source(c_file.read_text(encoding="utf-8"), str(c_file))
        out = run_program(program, [str(c_file)], exp.stdin, max_steps=max_steps, max_depth=max_depth)
    except CompileError as e:
        return CheckResult(name, False, [f"front-end error: {e.diagnostic}"])
    except OSError as e:
        return CheckResult(name, False, [f"cannot read: {e}"])
    problems = compare(exp, out)
    return CheckResult(name, not problems, problems)


def run_check(directory: Path, max_steps: int, max_depth: int, jobs: int = 1) -> list[CheckResult]:
    files = sorted(directory.glob("*.c"))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(check_one, files, [max_steps] * len(files), [max_depth] * len(files)))
    return [check_one(f, max_steps, max_depth) for f in files]


def cmd_check(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        sys.stderr.write(f"minic: not a directory: {directory}\n")
        return EXIT_IO
    max_steps, max_depth = _limits(args)
    results = run_check(directory, max_steps, max_depth, args.jobs)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}")
        for p in r.problems:
            print(f"    {p}")
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)}")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minic", description="MiniC interpreter with introspection")
    sub = parser.add_subparsers(dest="verb", required=True)

    def limits(p):
        p.add_argument("--max-steps", type=int, default=None, help="statement budget (env MINIC_MAX_STEPS)")
        p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH, help="guest call depth limit")

    run = sub.add_parser("run", help="run one program")
    run.add_argument("file")
    run.add_argument("args", nargs="*", help="guest argv[1:]")
    run.add_argument("--json", action="store_true", help="diagnostics as one JSON object on stderr")
    run.add_argument("--stdin", metavar="FILE", help="read guest stdin from FILE")
    limits(run)
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="run every *.c against its *.expect")
    check.add_argument("dir")
    check.add_argument("--jobs", type=int, default=1)
    limits(check)
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
