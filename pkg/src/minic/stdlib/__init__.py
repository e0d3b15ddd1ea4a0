"""The robust libc prelude, written in MiniC and loaded once per process."""
from __future__ import annotations

import functools
from importlib import resources

from ..frontend.parser import parse
from ..frontend.sema import analyze

PRELUDE_FILE = "<prelude>"


def prelude_source() -> str:
    return resources.files(__package__).joinpath("prelude.c").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=1)
def prelude():
    """The analyzed prelude program; its ``info`` is the base scope for user code."""
    program = parse(prelude_source(), PRELUDE_FILE)
    return analyze(program, None, prelude=True)
