"""Closure-compiling evaluator for analyzed MiniC programs.

Every function body is compiled once (lazily, on first call) into nested
Python closures. Expression closures take the current :class:`Frame` and
return a guest value; lvalue closures return a :class:`GuestPointer`;
statement closures return a control signal or ``None``.
"""
from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field

from . import stdlib
from .diagnostics import CompileError, Diagnostic, DiagnosticKind, RuntimeFault, SourceSpan
from .frontend import ast as A
from .frontend.parser import parse
from .frontend.sema import ConstSym, FuncSym, VarSym, analyze
from .introspection import Introspection, TypeExpr, VarargsView, va_arg
from .runtime.memory import (
    DEFAULT_MAX_ALLOC,
    NULL,
    AggValue,
    Frame,
    GuestPointer,
    LocationKind,
    Memory,
    MemoryStats,
)
from .types import (
    ARRAY,
    CHAR,
    CHAR_T,
    DOUBLE,
    FUNCTION,
    INT,
    LONG,
    POINTER,
    STRUCT,
    TYPE_T,
    VOID,
    GuestType,
    sizeof,
    wrap_int,
    zero_value,
)

K = DiagnosticKind
AUTO = LocationKind.AUTOMATIC
STATIC = LocationKind.STATIC

DEFAULT_MAX_STEPS = 50_000_000
DEFAULT_MAX_DEPTH = 10_000

BREAK, CONTINUE, RETURN = 1, 2, 3

_BITS = {CHAR: 8, INT: 32, LONG: 64}


class GuestExit(Exception):
    def __init__(self, status: int, note: str | None = None):
        super().__init__(status)
        self.status = status
        self.note = note


@dataclass
class ExecOutcome:
    kind: str  # "exit" or "aborted"
    status: int | None = None
    diagnostic: Diagnostic | None = None
    stdout: bytes = b""
    stderr: bytes = b""
    note: str | None = None
    errno: int = 0
    steps: int = 0
    stats: MemoryStats = field(default_factory=MemoryStats)

    @property
    def exit_code(self) -> int:
        if self.kind == "aborted":
            return 134
        return self.status & 0xFF

    @property
    def aborted_kind(self) -> str | None:
        return self.diagnostic.kind.value if self.diagnostic else None


# -- integer helpers ----------------------------------------------------------


def int_wrapper(ty: GuestType):
    bits = _BITS[ty.kind]
    mask = (1 << bits) - 1
    if ty.unsigned:
        return lambda v: v & mask
    half = 1 << (bits - 1)
    return lambda v: ((v + half) & mask) - half


def _tdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _fdiv(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a != a or a == 0:
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _to_int(wrap):
    def conv(v: float) -> int:
        if not math.isfinite(v):
            raise RuntimeFault(K.ArithmeticError, f"conversion of non-finite double {v} to an integer")
        return wrap(int(v))

    return conv


def _fits(src: GuestType, dst: GuestType) -> bool:
    """Every value of integer type ``src`` is representable in ``dst``."""
    sb, db = _BITS[src.kind], _BITS[dst.kind]
    if src.unsigned == dst.unsigned:
        return db >= sb
    if src.unsigned:
        return db > sb
    return False


def _signature_kinds(ty: GuestType):
    return (ty.elem.kind, tuple(p.kind for p in ty.params), ty.variadic)


def _char_value(b: int) -> int:
    return b - 256 if b > 127 else b


def _run_with_stack(fn):
    """Run ``fn`` on a thread with a deep stack so guest recursion cannot exhaust the host's."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as e:  # re-raised in the caller's thread
            box["error"] = e

    old = threading.stack_size()
    threading.stack_size(512 * 1024 * 1024)
    try:
        t = threading.Thread(target=target, name="minic-guest")
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


if sys.getrecursionlimit() < 1_000_000:
    sys.setrecursionlimit(1_000_000)


# -- program preparation --------------------------------------------------------


def compile_source(source: str, file_name: str = "<input>") -> A.Program:
    """Parse and analyze a user program against the library prelude."""
    prelude = stdlib.prelude()
    program = parse(source, file_name)
    return analyze(program, prelude.info)


def check_main(program: A.Program) -> A.FuncDef:
    main = program.info.functions.get("main")
    if main is None or main.is_prelude:
        span = program.span or SourceSpan(program.file, 1, 1)
        raise CompileError(Diagnostic(K.SemaError, span, "program has no 'main' function"))
    ty = main.ty
    ok = ty.elem.kind == INT and not ty.variadic and (
        not ty.params
        or (
            len(ty.params) == 2
            and ty.params[0].kind == INT
            and ty.params[1].kind == POINTER
            and ty.params[1].elem.kind == POINTER
            and ty.params[1].elem.elem.kind == CHAR
        )
    )
    if not ok:
        raise CompileError(Diagnostic(K.SemaError, main.span, "main must be 'int main(void)' or 'int main(int, char **)'"))
    return main


class Interpreter:
    """One guest process: memory, globals, I/O buffers and compiled code."""

    def __init__(
        self,
        program: A.Program,
        *,
        stdin: bytes = b"",
        argv: list[str] | None = None,
        max_steps: int = DEFAULT_MAX_STEPS,
        max_depth: int = DEFAULT_MAX_DEPTH,
        max_alloc: int = DEFAULT_MAX_ALLOC,
    ):
        self.program = program
        self.prelude = stdlib.prelude()
        self.memory = Memory(max_alloc)
        self.intro = Introspection(self.memory)
        self.stdin = bytes(stdin)
        self.stdin_pos = 0
        self.stdout = bytearray()
        self.stderr = bytearray()
        self.argv = list(argv or [program.file])
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.steps = [0]
        self.stack: list[Frame] = []
        self.globals: dict = {}
        self.statics: dict = {}
        self.code: dict = {}
        self.fn_objects: dict = {}
        self.type_objects: dict = {}
        self.string_objects: dict = {}
        self.booted = False
        self._builtins = self._make_builtins()

    # -- setup ---------------------------------------------------------
    def boot(self) -> None:
        """Allocate and initialize globals (library first, then the program)."""
        if self.booted:
            return
        self.booted = True
        decls = list(self.prelude.info.globals) + list(self.program.info.globals)
        for d in decls:
            self.globals[d.sym] = self.new_object(d.sym.ty, STATIC, d.name)
        init_frame = Frame("<init>")
        self.stack.append(init_frame)
        try:
            for d in decls:
                if d.init is not None:
                    init = self.compile_init(d.init, d.sym.ty)
                    init(init_frame, self.globals[d.sym], 0)
        finally:
            self.stack.pop()

    def new_object(self, ty: GuestType, loc: LocationKind, label: str | None = None):
        if ty.kind == ARRAY:
            return self.memory.allocate(ty.elem, ty.length, loc, label=label).pointee
        return self.memory.allocate(ty, 1, loc, label=label).pointee

    def function_pointer(self, fdef: A.FuncDef) -> GuestPointer:
        p = self.fn_objects.get(id(fdef))
        if p is None:
            p = self.memory.allocate(fdef.ty, 1, STATIC, meta=fdef, label=fdef.name)
            self.fn_objects[id(fdef)] = p
        return p

    def type_pointer(self, node: A.TypeOf) -> GuestPointer:
        p = self.type_objects.get(id(node))
        if p is None:
            p = self.memory.allocate(TYPE_T, 1, STATIC, meta=node.type_expr, label="type")
            self.type_objects[id(node)] = p
        return p

    def string_pointer(self, node: A.StrLit) -> GuestPointer:
        p = self.string_objects.get(id(node))
        if p is None:
            data = node.value
            p = self.memory.allocate(CHAR_T, len(data) + 1, STATIC, label="string")
            obj = p.pointee
            for i, b in enumerate(data):
                if b:
                    obj.cells[i] = _char_value(b)
            self.string_objects[id(node)] = p
        return p

    def global_symbol(self, name: str):
        sym = self.program.info.scope.get(name)
        return sym

    def find_function(self, name: str) -> A.FuncDef:
        fdef = self.program.info.functions.get(name) or self.prelude.info.functions.get(name)
        if fdef is None:
            raise KeyError(f"no function named {name!r}")
        return fdef

    # -- execution -------------------------------------------------------
    def run_main(self) -> ExecOutcome:
        main = check_main(self.program)
        status = None
        note = None
        diag = None
        try:
            self.boot()
            args = []
            if main.ty.params:
                args = [len(self.argv), self._argv_pointer()]
            status = self.invoke(main, args, [])
        except GuestExit as e:
            status, note = e.status, e.note
        except RuntimeFault as e:
            diag = e.to_diagnostic()
        except RecursionError:
            diag = Diagnostic(K.InternalLimit, None, "host recursion limit reached", [f.name for f in self.stack])
        self.stack.clear()
        out = ExecOutcome(
            "aborted" if diag else "exit",
            status=None if diag else int(status),
            diagnostic=diag,
            stdout=bytes(self.stdout),
            stderr=bytes(self.stderr),
            note=note,
            errno=self.errno(),
            steps=self.steps[0],
            stats=self.memory.stats,
        )
        return out

    def errno(self) -> int:
        sym = self.prelude.info.scope.get("errno")
        obj = self.globals.get(sym)
        if obj is None or obj.location == LocationKind.INVALID:
            return 0
        return obj.cells.get(0, 0)

    def _argv_pointer(self) -> GuestPointer:
        arr = self.memory.allocate(CHAR_T.pointer_to(), len(self.argv) + 1, STATIC, label="argv")
        for i, a in enumerate(self.argv):
            data = a.encode("utf-8")
            s = self.memory.allocate(CHAR_T, len(data) + 1, STATIC, label="argv string")
            for j, b in enumerate(data):
                s.pointee.cells[j] = _char_value(b)
            arr.pointee.cells[i] = s
        return arr

    def call_function(self, fn, args: list, extra_types: list[GuestType] | None = None):
        """Host entry point: call a guest function with already-converted guest values.

        ``fn`` is a function name, a FuncDef or a pointer to a function object.
        ``args`` may contain ManagedObjects, in which case their (first) element
        is passed by value and, beyond the fixed parameters, boxed with the
        object's element type.
        """
        self.boot()
        if isinstance(fn, str):
            fdef = self.find_function(fn)
        elif isinstance(fn, GuestPointer):
            obj = fn.pointee
            if obj is None or not obj.is_function:
                raise RuntimeFault(K.TypeViolation, "call_function on a non-function pointer")
            fdef = obj.meta
        else:
            fdef = fn
        values = []
        types = list(extra_types or [])
        nfixed = len(fdef.ty.params)
        for i, a in enumerate(args):
            if hasattr(a, "elem_type") and hasattr(a, "cells"):
                ty = a.elem_type
                values.append(self.memory.load_agg(GuestPointer(a, 0), ty) if ty.kind == STRUCT else self.memory.load_at(a, 0, ty))
                if i >= nfixed and len(types) < i - nfixed + 1:
                    types.append(ty)
            else:
                values.append(a)
        if len(values) < nfixed or (len(values) > nfixed and not fdef.ty.variadic):
            raise RuntimeFault(K.TypeViolation, f"'{fdef.name}' called with {len(values)} argument(s)")
        if len(types) != len(values) - nfixed:
            raise ValueError("extra_types must describe every variadic argument")
        # the implicit conversions a guest call would apply to fixed arguments
        for i, pty in enumerate(fdef.ty.params):
            v = values[i]
            if pty.kind in (CHAR, INT, LONG) and isinstance(v, int):
                values[i] = wrap_int(pty, v)
            elif pty.kind == DOUBLE and isinstance(v, int):
                values[i] = float(v)
        return self.invoke(fdef, values, types)

    def invoke(self, fdef: A.FuncDef, args: list, extra_types: list):
        stack = self.stack
        if len(stack) >= self.max_depth:
            raise RuntimeFault(K.InternalLimit, f"call depth exceeds the limit of {self.max_depth}")
        code = self.code.get(id(fdef))
        if code is None:
            code = self.compile_function(fdef)
        frame = Frame(fdef.name, len(fdef.params), [None] * fdef.nslots)
        mem = self.memory
        argobjs = []
        for sym, v in zip(fdef.param_syms, args):
            obj = mem.allocate(sym.ty, 1, AUTO, label=sym.name).pointee
            if sym.ty.kind == STRUCT:
                mem.store_agg(GuestPointer(obj, 0), sym.ty, v)
            else:
                mem.store_at(obj, 0, sym.ty, v)
            frame.slots[sym.slot] = obj
            argobjs.append(obj)
        if extra_types:
            for v, t in zip(args[len(fdef.params):], extra_types):
                obj = mem.allocate(t, 1, AUTO, label="vararg").pointee
                if t.kind == STRUCT:
                    mem.store_agg(GuestPointer(obj, 0), t, v)
                else:
                    mem.store_at(obj, 0, t, v)
                frame.varargs.append(obj)
        frame.argument_objects = argobjs + frame.varargs
        stack.append(frame)
        try:
            code(frame)
        except RuntimeFault as e:
            if e.stack is None:
                e.stack = [f.name for f in stack if f.name != "<init>"] or [fdef.name]
            raise
        finally:
            stack.pop()
            mem.end_scope(frame)
        if frame.ret is None and fdef.ty.elem.kind != VOID:
            return zero_value(fdef.ty.elem) if fdef.ty.elem.kind != STRUCT else AggValue(fdef.ty.elem)
        return frame.ret

    def resolve_indirect(self, p: GuestPointer, fty: GuestType) -> A.FuncDef:
        obj = p.pointee
        if obj is None:
            raise RuntimeFault(K.NullDereference, "call through NULL function pointer")
        if obj.location == LocationKind.INVALID:
            raise RuntimeFault(K.UseAfterFree, f"call through dangling pointer to object #{obj.oid}")
        if not obj.is_function:
            what = "untyped memory" if obj.elem_type is None else str(obj.elem_type)
            raise RuntimeFault(K.TypeViolation, f"call through pointer to {what} (object #{obj.oid})")
        if p.offset != 0:
            raise RuntimeFault(K.TypeViolation, f"call through pointer into the middle of function '{obj.meta.name}'")
        if _signature_kinds(obj.elem_type) != _signature_kinds(fty):
            raise RuntimeFault(
                K.TypeViolation,
                f"call of '{obj.meta.name}' of type {obj.elem_type} through a pointer of type {fty.pointer_to()}",
            )
        return obj.meta

    # -- builtins ----------------------------------------------------------
    def _type_expr(self, t: GuestPointer) -> TypeExpr | None:
        obj = t.pointee if isinstance(t, GuestPointer) else None
        if obj is None or not isinstance(obj.meta, TypeExpr):
            return None
        return obj.meta

    def _make_builtins(self) -> dict:
        intro = self.intro
        mem = self.memory

        def try_cast(f, p, t):
            return intro.try_cast(p, self._type_expr(t))

        def get_vararg_raw(f, i):
            if 0 <= i < len(f.varargs):
                return GuestPointer(f.varargs[i], 0)
            return NULL

        def get_vararg(f, i, t):
            return intro.try_cast(get_vararg_raw(f, i), self._type_expr(t))

        def va_count(f, ap):
            return ap.count if isinstance(ap, VarargsView) else 0

        def va_get(f, ap, i, t):
            if not isinstance(ap, VarargsView):
                return NULL
            return intro.try_cast(ap.pointer(i), self._type_expr(t))

        def exit_(f, status):
            raise GuestExit(status)

        def abort_(f):
            raise GuestExit(134, "abort() called by the program")

        def host_write(f, fd, c):
            (self.stderr if fd == 2 else self.stdout).append(c & 0xFF)
            return c & 0xFF

        def host_getchar(f):
            if self.stdin_pos >= len(self.stdin):
                return -1
            c = self.stdin[self.stdin_pos]
            self.stdin_pos += 1
            return c

        def host_alloc(f, n, zero):
            if n < 0 or n > mem.max_alloc:
                return NULL
            return mem.allocate_untyped(n)

        def host_free(f, p):
            mem.free_object(p)

        def host_memmove(f, dst, src, n):
            try:
                mem.copy_region(dst, src, n)
            except RuntimeFault:
                return -1
            return 0

        def host_memset(f, dst, c, n):
            try:
                mem.fill_region(dst, c, n)
            except RuntimeFault:
                return -1
            return 0

        def host_fmt_double(f, buf, cap, v, prec):
            prec = min(max(prec, 0), 60)
            if math.isnan(v):
                text = "-nan" if math.copysign(1.0, v) < 0 else "nan"
            elif math.isinf(v):
                text = "-inf" if v < 0 else "inf"
            else:
                text = f"{v:.{prec}f}"
            data = text.encode()
            for i, b in enumerate(data[: max(cap, 0)]):
                mem.store(GuestPointer(buf.pointee, buf.offset + i), CHAR_T, b)
            return len(data)

        return {
            "_size_right": lambda f, p: intro._size_right(p),
            "_size_left": lambda f, p: intro._size_left(p),
            "location": lambda f, p: int(intro.location(p)),
            "try_cast": try_cast,
            "count_varargs": lambda f: len(f.varargs),
            "_get_vararg": get_vararg_raw,
            "get_vararg": get_vararg,
            "__va_count": va_count,
            "__va_get": va_get,
            "exit": exit_,
            "abort": abort_,
            "__host_write": host_write,
            "__host_getchar": host_getchar,
            "__host_alloc": host_alloc,
            "__host_free": host_free,
            "__host_memmove": host_memmove,
            "__host_memset": host_memset,
            "__host_fmt_double": host_fmt_double,
        }

    # -- compilation: functions and statements -------------------------------
    def compile_function(self, fdef: A.FuncDef):
        body = self.stmt(fdef.body)
        self.code[id(fdef)] = body
        return body

    def stmt(self, s: A.Stmt):
        run = self._stmt(s)
        counter = self.steps
        limit = self.max_steps
        span = s.span

        def step(f):
            counter[0] += 1
            if counter[0] > limit:
                raise RuntimeFault(K.InternalLimit, f"step limit of {limit} exceeded")
            try:
                return run(f)
            except RuntimeFault as e:
                if e.span is None:
                    e.span = span
                raise

        return step

    def _stmt(self, s: A.Stmt):
        if isinstance(s, A.Block):
            items = [self.stmt(x) for x in s.items]
            if len(items) == 1:
                return items[0]

            def block(f):
                for item in items:
                    r = item(f)
                    if r:
                        return r
                return None

            return block
        if isinstance(s, A.ExprStmt):
            ev = self.expr(s.expr)

            def expr_stmt(f):
                ev(f)

            return expr_stmt
        if isinstance(s, A.DeclStmt):
            runs = [self.local_decl(d) for d in s.decls]
            if len(runs) == 1:
                return runs[0]

            def decls(f):
                for r in runs:
                    r(f)

            return decls
        if isinstance(s, A.If):
            cond = self.expr(s.cond)
            then = self.stmt(s.then)
            other = self.stmt(s.other) if s.other is not None else None
            if other is None:
                return lambda f: then(f) if cond(f) else None
            return lambda f: then(f) if cond(f) else other(f)
        if isinstance(s, A.While):
            cond = self.expr(s.cond)
            body = self.stmt(s.body)

            def while_(f):
                while cond(f):
                    r = body(f)
                    if r:
                        if r == BREAK:
                            break
                        if r == RETURN:
                            return r
                return None

            return while_
        if isinstance(s, A.DoWhile):
            cond = self.expr(s.cond)
            body = self.stmt(s.body)

            def do_while(f):
                while True:
                    r = body(f)
                    if r:
                        if r == BREAK:
                            break
                        if r == RETURN:
                            return r
                    if not cond(f):
                        break
                return None

            return do_while
        if isinstance(s, A.For):
            init = self.stmt(s.init) if s.init is not None else None
            cond = self.expr(s.cond) if s.cond is not None else (lambda f: 1)
            step = self.expr(s.step) if s.step is not None else None
            body = self.stmt(s.body)

            def for_(f):
                if init is not None:
                    init(f)
                while cond(f):
                    r = body(f)
                    if r:
                        if r == BREAK:
                            break
                        if r == RETURN:
                            return r
                    if step is not None:
                        step(f)
                return None

            return for_
        if isinstance(s, A.Return):
            if s.value is None:
                return lambda f: RETURN
            ev = self.expr(s.value)

            def ret(f):
                f.ret = ev(f)
                return RETURN

            return ret
        if isinstance(s, A.Break):
            return lambda f: BREAK
        if isinstance(s, A.Continue):
            return lambda f: CONTINUE
        if isinstance(s, A.Empty):
            return lambda f: None
        raise TypeError(f"cannot compile {type(s).__name__}")

    def local_decl(self, d: A.VarDecl):
        sym = d.sym
        ty = sym.ty
        init = self.compile_init(d.init, ty) if d.init is not None else None
        new_object = self.new_object
        if sym.storage == "static":
            statics = self.statics

            def static_decl(f):
                if sym not in statics:
                    obj = new_object(ty, STATIC, d.name)
                    statics[sym] = obj
                    if init is not None:
                        init(f, obj, 0)

            return static_decl
        slot = sym.slot
        invalidate = self.memory.invalidate
        name = d.name

        def local(f):
            old = f.slots[slot]
            if old is not None:
                invalidate(old)
            obj = new_object(ty, AUTO, name)
            f.slots[slot] = obj
            if init is not None:
                init(f, obj, 0)

        return local

    def compile_init(self, init: A.Expr, ty: GuestType):
        """Closure storing ``init`` into (object, byte offset)."""
        mem = self.memory
        if isinstance(init, A.InitList):
            parts = []
            if ty.kind == ARRAY:
                step = sizeof(ty.elem)
                for i, item in enumerate(init.items):
                    parts.append((i * step, self.compile_init(item, ty.elem)))
            else:
                for item, (fname, fty) in zip(init.items, ty.struct.fields):
                    parts.append((ty.struct.offsets[fname], self.compile_init(item, fty)))

            def init_list(f, obj, off):
                for rel, part in parts:
                    part(f, obj, off + rel)

            return init_list
        if ty.kind == ARRAY and isinstance(init, A.StrLit):
            data = init.value + b"\0"
            data = data[: ty.length]

            def init_string(f, obj, off):
                for i, b in enumerate(data):
                    mem.store_at(obj, off + i, CHAR_T, _char_value(b))

            return init_string
        ev = self.expr(init)
        if ty.kind == STRUCT:
            return lambda f, obj, off: mem.store_agg(GuestPointer(obj, off), ty, ev(f))
        store_at = mem.store_at
        return lambda f, obj, off: store_at(obj, off, ty, ev(f))

    # -- compilation: expressions ------------------------------------------------
    def expr(self, e: A.Expr):
        """Closure computing the rvalue of ``e`` (arrays and functions decay to pointers)."""
        ty = e.ty
        if ty is not None and ty.kind == ARRAY:
            return self.lvalue(e)
        method = getattr(self, "x_" + type(e).__name__)
        return method(e)

    def load_from(self, lv, ty: GuestType):
        mem = self.memory
        if ty.kind == STRUCT:
            load_agg = mem.load_agg
            return lambda f: load_agg(lv(f), ty)
        if ty.kind == FUNCTION:
            return lv
        load = mem.load
        return lambda f: load(lv(f), ty)

    def x_IntLit(self, e):
        v = e.value
        if e.ty.kind != LONG or not e.ty.unsigned:
            v = int_wrapper(e.ty)(v)
        return lambda f: v

    def x_FloatLit(self, e):
        v = float(e.value)
        return lambda f: v

    def x_CharLit(self, e):
        v = e.value
        return lambda f: v

    def x_StrLit(self, e):
        return self.lvalue(e)

    def x_Name(self, e: A.Name):
        sym = e.sym
        ty = e.ty
        if isinstance(sym, ConstSym):
            v = NULL if ty.kind == POINTER else sym.value
            return lambda f: v
        if isinstance(sym, FuncSym):
            p = self.function_pointer(sym.decl)
            return lambda f: p
        if ty.kind == STRUCT:
            return self.load_from(self.lvalue(e), ty)
        load_at = self.memory.load_at
        if sym.storage == "local":
            slot = sym.slot
            return lambda f: load_at(f.slots[slot], 0, ty)
        if sym.storage == "static":
            statics = self.statics
            return lambda f: load_at(statics[sym], 0, ty)
        obj = self.globals[sym]
        return lambda f: load_at(obj, 0, ty)

    def x_TypeOf(self, e):
        p = self.type_pointer(e)
        return lambda f: p

    def x_SizeofType(self, e):
        v = sizeof(e.target)
        return lambda f: v

    def x_SizeofExpr(self, e):
        v = sizeof(e.operand.ty)
        return lambda f: v

    def converter(self, src: GuestType, dst: GuestType):
        """Value conversion function, or None when the representation is unchanged."""
        if dst.kind == VOID or src.kind in (ARRAY, FUNCTION):
            return None
        if dst.is_integer and src.is_integer:
            if src.kind == dst.kind and src.unsigned == dst.unsigned:
                return None
            if _fits(src, dst):
                return None
            return int_wrapper(dst)
        if dst.kind == DOUBLE and src.is_integer:
            return float
        if dst.is_integer and src.kind == DOUBLE:
            return _to_int(int_wrapper(dst))
        if dst.kind == POINTER and src.is_integer:
            return lambda v: NULL
        return None

    def x_Cast(self, e: A.Cast):
        inner = self.expr(e.operand)
        if e.target.kind == VOID:

            def discard(f):
                inner(f)

            return discard
        conv = self.converter(e.operand.ty, e.target)
        if conv is None:
            return inner
        return lambda f: conv(inner(f))

    def x_Unary(self, e: A.Unary):
        op = e.op
        if op == "&":
            if e.operand.ty.kind == FUNCTION:
                return self.expr(e.operand)
            return self.lvalue(e.operand)
        if op == "*":
            return self.load_from(self.lvalue(e), e.ty)
        if op in ("++", "--"):
            return self.incdec(e, prefix=True)
        v = self.expr(e.operand)
        if op == "!":
            return lambda f: 0 if v(f) else 1
        if op == "+":
            return v
        if op == "-":
            if e.ty.kind == DOUBLE:
                return lambda f: -v(f)
            wrap = int_wrapper(e.ty)
            return lambda f: wrap(-v(f))
        if op == "~":
            wrap = int_wrapper(e.ty)
            return lambda f: wrap(~v(f))
        raise TypeError(op)

    def x_Postfix(self, e):
        return self.incdec(e, prefix=False)

    def incdec(self, e, prefix: bool):
        lv = self.lvalue(e.operand)
        ty = e.operand.ty
        sign = 1 if e.op == "++" else -1
        mem = self.memory
        load, store = mem.load, mem.store
        if ty.kind == POINTER:
            delta = sign * (sizeof(ty.elem) if ty.elem.kind != VOID else 1)

            def bump(v):
                return GuestPointer(v.pointee, v.offset + delta) if v.pointee is not None else v

        elif ty.kind == DOUBLE:

            def bump(v):
                return v + sign

        else:
            wrap = int_wrapper(ty)

            def bump(v):
                return wrap(v + sign)

        if prefix:

            def pre(f):
                p = lv(f)
                v = bump(load(p, ty))
                store(p, ty, v)
                return v

            return pre

        def post(f):
            p = lv(f)
            old = load(p, ty)
            store(p, ty, bump(old))
            return old

        return post

    def arith(self, op: str, ty: GuestType):
        """Binary operation on two values already converted to ``ty``."""
        if ty.kind == DOUBLE:
            return {
                "+": lambda a, b: a + b,
                "-": lambda a, b: a - b,
                "*": lambda a, b: a * b,
                "/": _fdiv,
            }[op]
        wrap = int_wrapper(ty)
        bits = _BITS[ty.kind]

        def div(a, b):
            if b == 0:
                raise RuntimeFault(K.ArithmeticError, "integer division by zero")
            return wrap(_tdiv(a, b))

        def mod(a, b):
            if b == 0:
                raise RuntimeFault(K.ArithmeticError, "integer remainder by zero")
            return wrap(a - b * _tdiv(a, b))

        return {
            "+": lambda a, b: wrap(a + b),
            "-": lambda a, b: wrap(a - b),
            "*": lambda a, b: wrap(a * b),
            "/": div,
            "%": mod,
            "&": lambda a, b: wrap(a & b),
            "|": lambda a, b: wrap(a | b),
            "^": lambda a, b: wrap(a ^ b),
            "<<": lambda a, b: wrap(a << (b % bits)),
            ">>": lambda a, b: a >> (b % bits),
        }[op]

    def x_Binary(self, e: A.Binary):
        op = e.op
        left = self.expr(e.left)
        right = self.expr(e.right)
        if op == "&&":
            return lambda f: 1 if left(f) and right(f) else 0
        if op == "||":
            return lambda f: 1 if left(f) or right(f) else 0
        lt, rt = e.left.ty, e.right.ty
        if lt.kind == POINTER or rt.kind == POINTER:
            return self.pointer_binary(e, left, right)
        if op in ("==", "!=", "<", ">", "<=", ">="):
            cmp = {
                "==": lambda a, b: 1 if a == b else 0,
                "!=": lambda a, b: 1 if a != b else 0,
                "<": lambda a, b: 1 if a < b else 0,
                ">": lambda a, b: 1 if a > b else 0,
                "<=": lambda a, b: 1 if a <= b else 0,
                ">=": lambda a, b: 1 if a >= b else 0,
            }[op]
            return lambda f: cmp(left(f), right(f))
        fn = self.arith(op, e.calc_ty)
        return lambda f: fn(left(f), right(f))

    def pointer_binary(self, e: A.Binary, left, right):
        op = e.op
        lt, rt = e.left.ty, e.right.ty
        if op in ("==", "!="):
            if op == "==":
                return lambda f: 1 if left(f) == right(f) else 0
            return lambda f: 0 if left(f) == right(f) else 1
        if op in ("<", ">", "<=", ">="):
            cmp = {
                "<": lambda a, b: a < b,
                ">": lambda a, b: a > b,
                "<=": lambda a, b: a <= b,
                ">=": lambda a, b: a >= b,
            }[op]

            def rel(f):
                a, b = left(f), right(f)
                if a.pointee is not b.pointee:
                    raise RuntimeFault(K.TypeViolation, "relational comparison of pointers into different objects")
                return 1 if cmp(a.offset, b.offset) else 0

            return rel
        if lt.kind == POINTER and rt.kind == POINTER:
            size = sizeof(lt.elem) if lt.elem.kind != VOID else 1

            def diff(f):
                a, b = left(f), right(f)
                if a.pointee is not b.pointee:
                    raise RuntimeFault(K.TypeViolation, "subtraction of pointers into different objects")
                return _tdiv(a.offset - b.offset, size) if size > 1 else a.offset - b.offset

            return diff
        size = sizeof(lt.elem) if lt.elem.kind != VOID else 1
        if op == "-":
            size = -size

        def add(f):
            p = left(f)
            n = right(f)
            if p.pointee is None:
                return p
            return GuestPointer(p.pointee, p.offset + n * size)

        return add

    def x_Assign(self, e: A.Assign):
        lv = self.lvalue(e.target)
        val = self.expr(e.value)
        ty = e.target.ty
        mem = self.memory
        if e.op == "=":
            if ty.kind == STRUCT:
                store_agg = mem.store_agg

                def assign_struct(f):
                    p = lv(f)
                    v = val(f)
                    store_agg(p, ty, v)
                    return v

                return assign_struct
            store = mem.store

            def assign(f):
                p = lv(f)
                v = val(f)
                store(p, ty, v)
                return v

            return assign
        op = e.op[:-1]
        load, store = mem.load, mem.store
        if ty.kind == POINTER:
            size = sizeof(ty.elem) if ty.elem.kind != VOID else 1
            if op == "-":
                size = -size

            def ptr_compound(f):
                p = lv(f)
                old = load(p, ty)
                n = val(f)
                new = GuestPointer(old.pointee, old.offset + n * size) if old.pointee is not None else old
                store(p, ty, new)
                return new

            return ptr_compound
        calc = e.calc_ty
        fn = self.arith(op, calc)
        up = self.converter(ty, calc) or (lambda v: v)
        down = self.converter(calc, ty) or (lambda v: v)

        def compound(f):
            p = lv(f)
            old = load(p, ty)
            new = down(fn(up(old), val(f)))
            store(p, ty, new)
            return new

        return compound

    def x_Cond(self, e: A.Cond):
        c = self.expr(e.cond)
        t = self.expr(e.then)
        o = self.expr(e.other)
        return lambda f: t(f) if c(f) else o(f)

    def x_Comma(self, e: A.Comma):
        left = self.expr(e.left)
        right = self.expr(e.right)

        def comma(f):
            left(f)
            return right(f)

        return comma

    def x_Index(self, e: A.Index):
        return self.load_from(self.lvalue(e), e.ty)

    def x_Member(self, e: A.Member):
        if e.arrow or self.is_lvalue(e.base):
            return self.load_from(self.lvalue(e), e.ty)
        # member of a struct rvalue (call result, conditional, assignment)
        base = self.expr(e.base)
        sdef = e.base.ty.struct
        off = sdef.offsets[e.name]
        fty = e.ty
        if fty.kind == STRUCT:
            size = sizeof(fty)

            def sub(f):
                agg = base(f)
                return AggValue(fty, {k - off: v for k, v in agg.cells.items() if off <= k < off + size})

            return sub
        zero = zero_value(fty)
        return lambda f: base(f).cells.get(off, zero)

    def x_Call(self, e: A.Call):
        args = [self.expr(a) for a in e.args]
        if e.builtin is not None:
            fn = self._builtins[e.builtin]
            if len(args) == 0:
                return lambda f: fn(f)
            if len(args) == 1:
                a0 = args[0]
                return lambda f: fn(f, a0(f))
            if len(args) == 2:
                a0, a1 = args
                return lambda f: fn(f, a0(f), a1(f))
            return lambda f: fn(f, *[a(f) for a in args])
        invoke = self.invoke
        callee = e.func
        sym = callee.sym if isinstance(callee, A.Name) else None
        if isinstance(sym, FuncSym):
            fty = sym.ty
            fdef = sym.decl
            extra = [a.ty for a in e.args[len(fty.params):]]
            return lambda f: invoke(fdef, [a(f) for a in args], extra)
        fptr = self.expr(callee)
        fty = callee.ty.elem
        extra = [a.ty for a in e.args[len(fty.params):]]
        resolve = self.resolve_indirect

        def indirect(f):
            target = resolve(fptr(f), fty)
            return invoke(target, [a(f) for a in args], extra)

        return indirect

    def x_VaStart(self, e: A.VaStart):
        lv = self.lvalue(e.ap)
        store = self.memory.store
        ty = e.ap.ty

        def va_start(f):
            store(lv(f), ty, VarargsView(list(f.varargs)))

        return va_start

    def x_VaArg(self, e: A.VaArg):
        ap = self.expr(e.ap)
        target = e.target
        intro = self.intro
        load = self.memory.load

        def va_arg_(f):
            p = va_arg(intro, ap(f), target)
            return load(p, target)

        return va_arg_

    def x_VaEnd(self, e: A.VaEnd):
        ap = self.expr(e.ap)

        def va_end(f):
            view = ap(f)
            if isinstance(view, VarargsView):
                view.cursor = 0

        return va_end

    def x_InitList(self, e):  # pragma: no cover - rejected by analysis
        raise TypeError("brace list outside an initializer")

    # -- lvalues -------------------------------------------------------------------
    @staticmethod
    def is_lvalue(e: A.Expr) -> bool:
        if isinstance(e, A.Name):
            return isinstance(e.sym, VarSym)
        if isinstance(e, (A.Index, A.StrLit)):
            return True
        if isinstance(e, A.Unary):
            return e.op == "*"
        if isinstance(e, A.Member):
            return e.arrow or Interpreter.is_lvalue(e.base)
        return False

    def lvalue(self, e: A.Expr):
        if isinstance(e, A.Name):
            sym = e.sym
            if sym.storage == "local":
                slot = sym.slot
                return lambda f: GuestPointer(f.slots[slot], 0)
            if sym.storage == "static":
                statics = self.statics
                return lambda f: GuestPointer(statics[sym], 0)
            p = GuestPointer(self.globals[sym], 0)
            return lambda f: p
        if isinstance(e, A.StrLit):
            p = self.string_pointer(e)
            return lambda f: p
        if isinstance(e, A.Unary) and e.op == "*":
            inner = self.expr(e.operand)
            return self._adopting(inner, e.ty)
        if isinstance(e, A.Index):
            base = self.expr(e.base)
            idx = self.expr(e.index)
            size = sizeof(e.ty)

            def index(f):
                p = base(f)
                i = idx(f)
                if p.pointee is None:
                    return p
                return GuestPointer(p.pointee, p.offset + i * size)

            return self._adopting(index, e.ty)
        if isinstance(e, A.Member):
            if e.arrow:
                base = self._adopting(self.expr(e.base), e.base.ty.elem)
                sdef = e.base.ty.elem.struct
            else:
                base = self.lvalue(e.base)
                sdef = e.base.ty.struct
            off = sdef.offsets[e.name]
            if off == 0:
                return base

            def member(f):
                p = base(f)
                if p.pointee is None:
                    return p
                return GuestPointer(p.pointee, p.offset + off)

            return member
        if isinstance(e, A.Cast) and e.implicit and e.operand.ty.kind in (ARRAY, FUNCTION):
            return self.lvalue(e.operand)
        raise TypeError(f"{type(e).__name__} is not an lvalue")

    def _adopting(self, ptr_fn, ty: GuestType):
        """Struct (or array-of-struct) access through untyped heap memory types the region."""
        inner = ty
        while inner.kind == ARRAY:
            inner = inner.elem
        if inner.kind != STRUCT:
            return ptr_fn
        adopt = self.memory.adopt_type

        def adopting(f):
            p = ptr_fn(f)
            obj = p.pointee
            if obj is not None and obj.elem_type is None and obj.location != LocationKind.INVALID:
                adopt(obj, inner)
            return p

        return adopting


def run_program(
    program: A.Program,
    argv: list[str] | None = None,
    stdin: bytes = b"",
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_alloc: int = DEFAULT_MAX_ALLOC,
) -> ExecOutcome:
    """Execute ``main`` of an analyzed program; raises CompileError when there is no usable main."""
    check_main(program)
    interp = Interpreter(program, stdin=stdin, argv=argv, max_steps=max_steps, max_depth=max_depth, max_alloc=max_alloc)
    return _run_with_stack(interp.run_main)


def run_source(source: str, file_name: str = "<input>", stdin: bytes = b"", **kw) -> ExecOutcome:
    return run_program(compile_source(source, file_name), stdin=stdin, **kw)


__all__ = [
    "ExecOutcome",
    "GuestExit",
    "Interpreter",
    "compile_source",
    "run_program",
    "run_source",
]
