"""Shared test utilities: run guest source, and drive library functions from the host."""
from __future__ import annotations

from minic.interpreter import Interpreter, compile_source, run_program
from minic.runtime import GuestPointer, LocationKind
from minic.types import CHAR_T, INT_T

EINVAL = 22
MINIMAL = "int main(void) { return 0; }\n"


def run(source: str, stdin: bytes = b"", **kw):
    return run_program(compile_source(source, "<test>"), stdin=stdin, **kw)


def out(source: str, stdin: bytes = b"", **kw) -> str:
    """stdout of a program that must exit normally."""
    res = run(source, stdin, **kw)
    assert res.kind == "exit", res.diagnostic
    return res.stdout.decode()


def main_body(body: str, prefix: str = "") -> str:
    return f"{prefix}\nint main(void) {{\n{body}\n    return 0;\n}}\n"


class Host:
    """An interpreter instance whose library functions are called directly from Python."""

    def __init__(self, source: str = MINIMAL, stdin: bytes = b""):
        self.interp = Interpreter(compile_source(source, "<host>"), stdin=stdin)
        self.interp.boot()
        self.mem = self.interp.memory
        self.intro = self.interp.intro

    def call(self, name: str, *args, extra_types=None):
        return self.interp.call_function(name, list(args), extra_types)

    def buffer(self, data: bytes, loc: LocationKind = LocationKind.DYNAMIC) -> GuestPointer:
        p = self.mem.allocate(CHAR_T, max(len(data), 1), loc)
        for i, b in enumerate(data):
            self.mem.store(GuestPointer(p.pointee, i), CHAR_T, b - 256 if b >= 128 else b)
        return p

    def ints(self, values, loc: LocationKind = LocationKind.DYNAMIC) -> GuestPointer:
        p = self.mem.allocate(INT_T, max(len(values), 1), loc)
        for i, v in enumerate(values):
            self.mem.store(GuestPointer(p.pointee, 4 * i), INT_T, v)
        return p

    def read_ints(self, p: GuestPointer, n: int) -> list[int]:
        return [self.mem.load(GuestPointer(p.pointee, p.offset + 4 * i), INT_T) for i in range(n)]

    def read_bytes(self, p: GuestPointer, n: int) -> bytes:
        return bytes(self.mem.load(GuestPointer(p.pointee, p.offset + i), CHAR_T) & 0xFF for i in range(n))

    def fn(self, name: str) -> GuestPointer:
        return self.interp.function_pointer(self.interp.find_function(name))

    @property
    def errno(self) -> int:
        return self.interp.errno()

    @errno.setter
    def errno(self, value: int) -> None:
        sym = self.interp.prelude.info.scope["errno"]
        self.interp.globals[sym].cells[0] = value

    @property
    def stdout(self) -> bytes:
        return bytes(self.interp.stdout)
