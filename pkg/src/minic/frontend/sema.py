"""Semantic analysis: name resolution, typing, implicit conversions."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..builtins import BUILTIN_FUNCTIONS, CONSTANTS, PRELUDE_ONLY_PREFIX, RESERVED_NAMES, TYPE_PTR
from ..diagnostics import CompileError, Diagnostic, DiagnosticKind, SourceSpan
from ..introspection import lower_type_operator
from ..types import (
    ARRAY,
    CHAR,
    CHAR_T,
    DOUBLE,
    DOUBLE_T,
    FUNCTION,
    INT,
    INT_T,
    LONG,
    LONG_T,
    POINTER,
    SIZE_T,
    STRUCT,
    VALIST,
    VOID,
    VOID_PTR,
    GuestType,
)
from . import ast as A


@dataclass(eq=False)
class VarSym:
    name: str
    ty: GuestType
    storage: str  # 'global' | 'local' | 'static'
    slot: int | None = None
    decl: A.VarDecl | None = None


@dataclass(eq=False)
class FuncSym:
    name: str
    ty: GuestType
    decl: A.FuncDef | None = None
    builtin: bool = False
    prelude: bool = False


@dataclass(eq=False)
class ConstSym:
    name: str
    ty: GuestType
    value: object


@dataclass
class ProgramInfo:
    globals: list[A.VarDecl] = field(default_factory=list)
    functions: dict[str, A.FuncDef] = field(default_factory=dict)
    scope: dict = field(default_factory=dict)
    struct_tags: dict = field(default_factory=dict)


_RANK = {CHAR: 1, INT: 2, LONG: 3}


def promote(ty: GuestType) -> GuestType:
    if ty.kind == CHAR:
        return INT_T
    return ty


def usual_conversion(a: GuestType, b: GuestType) -> GuestType:
    if a.kind == DOUBLE or b.kind == DOUBLE:
        return DOUBLE_T
    a, b = promote(a), promote(b)
    if a == b:
        return a
    if a.unsigned == b.unsigned:
        return a if _RANK[a.kind] >= _RANK[b.kind] else b
    u, s = (a, b) if a.unsigned else (b, a)
    if _RANK[u.kind] >= _RANK[s.kind]:
        return u
    if _RANK[s.kind] > _RANK[u.kind]:
        return s
    return GuestType(s.kind, unsigned=True)


def is_null_constant(e: A.Expr) -> bool:
    while isinstance(e, A.Cast) and (e.target.is_integer or e.target.is_void_pointer):
        e = e.operand
    if isinstance(e, A.IntLit):
        return e.value == 0
    if isinstance(e, A.Name) and isinstance(e.sym, ConstSym) and e.name == "NULL":
        return True
    return False


def _complete(ty: GuestType) -> bool:
    if ty.kind == STRUCT:
        return ty.struct.complete
    if ty.kind == ARRAY:
        return ty.length is not None and _complete(ty.elem)
    return ty.kind not in (VOID, FUNCTION)


class Analyzer:
    def __init__(self, program: A.Program, base: ProgramInfo | None = None, prelude: bool = False):
        self.program = program
        self.prelude = prelude
        self.base = base
        self.info = ProgramInfo()
        self.globals: dict = dict(base.scope) if base else {}
        if base is None:
            for name, fty in BUILTIN_FUNCTIONS.items():
                self.globals[name] = FuncSym(name, fty, builtin=True)
            for name, (ty, value) in CONSTANTS.items():
                self.globals[name] = ConstSym(name, ty, value)
        self.scopes: list[dict] = []
        self.func: A.FuncDef | None = None
        self.nslots = 0
        self.loop_depth = 0
        self.typeof_ok = False
        self.defined_here: set[str] = set()

    def error(self, msg: str, span: SourceSpan | None):
        raise CompileError(Diagnostic(DiagnosticKind.SemaError, span, msg))

    # -- scopes ---------------------------------------------------------
    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.globals.get(name)

    def declare_local(self, name: str, sym, span) -> None:
        scope = self.scopes[-1]
        if name in scope:
            self.error(f"redeclaration of '{name}'", span)
        if name in RESERVED_NAMES:
            self.error(f"'{name}' is reserved", span)
        scope[name] = sym

    # -- program -----------------------------------------------------------
    def run(self) -> A.Program:
        for d in self.program.decls:
            if isinstance(d, A.FuncDef):
                self.declare_function(d)
            elif isinstance(d, A.VarDecl):
                self.global_var(d)
            elif isinstance(d, A.StructDecl):
                pass
        for d in self.program.decls:
            if isinstance(d, A.FuncDef) and d.body is not None:
                self.function_body(d)
        self.info.scope = self.globals
        self.program.info = self.info
        self.program.analyzed = True
        return self.program

    def declare_function(self, d: A.FuncDef) -> None:
        if d.name in RESERVED_NAMES:
            self.error(f"'{d.name}' is reserved and cannot be declared", d.span)
        d.is_prelude = self.prelude
        prev = self.globals.get(d.name)
        if isinstance(prev, (VarSym, ConstSym)):
            self.error(f"'{d.name}' redeclared as a function", d.span)
        if d.body is None:
            # a prototype never replaces an existing declaration
            if prev is None:
                self.globals[d.name] = FuncSym(d.name, d.ty, None, prelude=self.prelude)
            return
        if d.name in self.defined_here:
            self.error(f"redefinition of function '{d.name}'", d.span)
        self.defined_here.add(d.name)
        ret = d.ty.elem
        if ret.kind in (ARRAY, FUNCTION) or (ret.kind == STRUCT and not ret.struct.complete):
            self.error(f"invalid return type for '{d.name}'", d.span)
        # a user definition overrides a library function of the same name
        self.globals[d.name] = FuncSym(d.name, d.ty, d, prelude=self.prelude)
        self.info.functions[d.name] = d

    def global_var(self, d: A.VarDecl) -> None:
        if d.name in RESERVED_NAMES:
            self.error(f"'{d.name}' is reserved", d.span)
        prev = self.globals.get(d.name)
        if isinstance(prev, (FuncSym, ConstSym)):
            self.error(f"'{d.name}' redeclared as a variable", d.span)
        if isinstance(prev, VarSym):
            # tentative definitions and extern declarations name the existing object
            if d.init is None or d.storage == "extern":
                d.sym = prev
                return
            if prev.decl is not None and prev.decl.init is not None:
                self.error(f"redefinition of '{d.name}'", d.span)
        self.check_var_type(d)
        if d.init is not None:
            self.typeof_ok = True
            d.init = self.initializer(d.init, d.ty, d.span)
            d.ty = self.fix_array_length(d)
        if isinstance(prev, VarSym) and prev.decl in self.info.globals:
            # a definition completing an earlier tentative one keeps its symbol
            self.info.globals[self.info.globals.index(prev.decl)] = d
            prev.ty, prev.decl = d.ty, d
            d.sym = prev
            return
        sym = VarSym(d.name, d.ty, "global", decl=d)
        d.sym = sym
        self.globals[d.name] = sym
        self.info.globals.append(d)

    def check_var_type(self, d: A.VarDecl) -> None:
        ty = d.ty
        if ty.kind == VOID:
            self.error(f"variable '{d.name}' has type void", d.span)
        if ty.kind == FUNCTION:
            self.error(f"'{d.name}' declared with function type", d.span)
        if ty.kind == ARRAY and ty.length is None and d.init is None:
            self.error(f"array '{d.name}' needs a size or an initializer", d.span)
        inner = ty.elem if ty.kind == ARRAY else ty
        if not _complete(inner) or (ty.kind == STRUCT and not ty.struct.complete):
            self.error(f"variable '{d.name}' has incomplete type {ty}", d.span)
        if ty.kind == STRUCT and ty.struct.opaque:
            self.error(f"cannot declare an object of opaque type {ty}", d.span)

    def fix_array_length(self, d: A.VarDecl) -> GuestType:
        ty = d.ty
        if ty.kind == ARRAY and ty.length is None:
            init = d.init
            if isinstance(init, A.StrLit):
                n = len(init.value) + 1
            elif isinstance(init, A.InitList):
                n = len(init.items)
            else:
                self.error("array initializer must be a list or string", d.span)
            if n == 0:
                self.error("array must have at least one element", d.span)
            ty = GuestType(ARRAY, elem=ty.elem, length=n)
            d.init.ty = ty if isinstance(d.init, A.InitList) else d.init.ty
        return ty

    # -- functions -----------------------------------------------------------
    def function_body(self, d: A.FuncDef) -> None:
        self.func = d
        self.nslots = 0
        self.scopes = [{}]
        d.param_syms = []
        for pname, pty in zip(d.params, d.ty.params):
            if pty.kind == STRUCT and not pty.struct.complete:
                self.error(f"parameter '{pname}' has incomplete type", d.span)
            sym = VarSym(pname, pty, "local", slot=self.nslots)
            self.nslots += 1
            self.declare_local(pname, sym, d.span)
            d.param_syms.append(sym)
        self.block(d.body, new_scope=False)
        d.nslots = self.nslots
        self.scopes = []
        self.func = None

    # -- statements ------------------------------------------------------------
    def block(self, b: A.Block, new_scope: bool = True) -> None:
        if new_scope:
            self.scopes.append({})
        for item in b.items:
            self.stmt(item)
        if new_scope:
            self.scopes.pop()

    def stmt(self, s: A.Stmt) -> None:
        if isinstance(s, A.Block):
            self.block(s)
        elif isinstance(s, A.DeclStmt):
            for d in s.decls:
                self.local_var(d)
        elif isinstance(s, A.ExprStmt):
            s.expr = self.expr(s.expr)
        elif isinstance(s, A.If):
            s.cond = self.condition(s.cond)
            self.substmt(s.then)
            if s.other is not None:
                self.substmt(s.other)
        elif isinstance(s, A.While):
            s.cond = self.condition(s.cond)
            self.loop_body(s.body)
        elif isinstance(s, A.DoWhile):
            self.loop_body(s.body)
            s.cond = self.condition(s.cond)
        elif isinstance(s, A.For):
            self.scopes.append({})
            if s.init is not None:
                self.stmt(s.init)
            if s.cond is not None:
                s.cond = self.condition(s.cond)
            if s.step is not None:
                s.step = self.expr(s.step)
            self.loop_body(s.body)
            self.scopes.pop()
        elif isinstance(s, A.Return):
            ret = self.func.ty.elem
            if s.value is None:
                if ret.kind != VOID:
                    self.error(f"'{self.func.name}' must return a value", s.span)
            else:
                if ret.kind == VOID:
                    self.error(f"void function '{self.func.name}' returns a value", s.span)
                s.value = self.convert(self.rvalue(s.value), ret, s.span, "return")
        elif isinstance(s, (A.Break, A.Continue)):
            if self.loop_depth == 0:
                self.error(f"'{'break' if isinstance(s, A.Break) else 'continue'}' outside a loop", s.span)
        elif isinstance(s, A.Empty):
            pass
        else:  # pragma: no cover - parser produces no other statements
            self.error(f"unsupported statement {type(s).__name__}", s.span)

    def substmt(self, s: A.Stmt) -> None:
        self.scopes.append({})
        self.stmt(s)
        self.scopes.pop()

    def loop_body(self, s: A.Stmt) -> None:
        self.loop_depth += 1
        self.substmt(s)
        self.loop_depth -= 1

    def local_var(self, d: A.VarDecl) -> None:
        if d.storage == "extern":
            self.error("extern declarations are only allowed at file scope", d.span)
        self.check_var_type(d)
        if d.storage == "static":
            sym = VarSym(d.name, d.ty, "static", decl=d)
        else:
            sym = VarSym(d.name, d.ty, "local", slot=self.nslots, decl=d)
            self.nslots += 1
        if d.init is not None:
            self.typeof_ok = True
            d.init = self.initializer(d.init, d.ty, d.span)
            d.ty = self.fix_array_length(d)
            sym.ty = d.ty
        self.declare_local(d.name, sym, d.span)
        d.sym = sym

    def initializer(self, init: A.Expr, ty: GuestType, span) -> A.Expr:
        if isinstance(init, A.InitList):
            init.ty = ty
            if ty.kind == ARRAY:
                if ty.length is not None and len(init.items) > ty.length:
                    self.error("too many initializers for array", init.span)
                init.items = [self._init_item(x, ty.elem, span) for x in init.items]
                return init
            if ty.kind == STRUCT:
                if len(init.items) > len(ty.struct.fields):
                    self.error("too many initializers for struct", init.span)
                init.items = [self._init_item(x, fty, span) for x, (_, fty) in zip(init.items, ty.struct.fields)]
                return init
            if len(init.items) != 1:
                self.error("scalar initializer must have exactly one element", init.span)
            return self.initializer(init.items[0], ty, span)
        if ty.kind == ARRAY:
            if isinstance(init, A.StrLit) and ty.elem.kind == CHAR:
                init.ty = GuestType(ARRAY, elem=CHAR_T, length=len(init.value) + 1)
                if ty.length is not None and len(init.value) > ty.length:
                    self.error("string initializer is longer than the array", init.span)
                return init
            self.error("array must be initialized with a brace list", init.span)
        return self.convert(self.rvalue(init), ty, span, "initialization")

    def _init_item(self, x: A.Expr, ty: GuestType, span) -> A.Expr:
        self.typeof_ok = True
        return self.initializer(x, ty, span)

    # -- expressions --------------------------------------------------------
    def condition(self, e: A.Expr) -> A.Expr:
        e = self.rvalue(e)
        if not e.ty.is_scalar or e.ty.kind == VALIST:
            self.error(f"condition has non-scalar type {e.ty}", e.span)
        return e

    def rvalue(self, e: A.Expr) -> A.Expr:
        """Analyze ``e`` and apply array/function decay."""
        e = self.expr(e)
        if e.ty.kind == ARRAY:
            return A.Cast(e.ty.elem.pointer_to(), e, implicit=True, span=e.span, ty=e.ty.elem.pointer_to())
        if e.ty.kind == FUNCTION:
            return A.Cast(e.ty.pointer_to(), e, implicit=True, span=e.span, ty=e.ty.pointer_to())
        return e

    def convert(self, e: A.Expr, ty: GuestType, span, what: str) -> A.Expr:
        src = e.ty
        if src == ty:
            return e
        ok = False
        if src.is_arithmetic and ty.is_arithmetic:
            ok = True
        elif ty.kind == POINTER and src.kind == POINTER:
            ok = True
        elif ty.kind == POINTER and src.is_integer and is_null_constant(e):
            ok = True
        elif ty.kind == STRUCT and src.kind == STRUCT and ty.struct is src.struct:
            return e
        elif ty.kind == VALIST and src.kind == VALIST:
            return e
        if not ok:
            self.error(f"incompatible types in {what}: cannot convert {src} to {ty}", span or e.span)
        return A.Cast(ty, e, implicit=True, span=e.span, ty=ty)

    def is_lvalue(self, e: A.Expr) -> bool:
        if isinstance(e, A.Name):
            return isinstance(e.sym, VarSym)
        if isinstance(e, A.Unary) and e.op == "*":
            return True
        if isinstance(e, A.Index):
            return True
        if isinstance(e, A.Member):
            return e.arrow or self.is_lvalue(e.base)
        if isinstance(e, A.StrLit):
            return True
        return False

    def expr(self, e: A.Expr) -> A.Expr:
        typeof_ok = self.typeof_ok
        self.typeof_ok = False
        method = getattr(self, "e_" + type(e).__name__, None)
        if method is None:
            self.error(f"unsupported expression {type(e).__name__}", e.span)
        if isinstance(e, A.TypeOf):
            out = self.e_TypeOf(e, typeof_ok)
        else:
            out = method(e)
        assert out.ty is not None, e
        return out

    def e_IntLit(self, e: A.IntLit) -> A.Expr:
        v = e.value
        unsigned = "u" in e.suffix
        long_ = "l" in e.suffix
        if not long_ and (v <= 0x7FFFFFFF or (unsigned and v <= 0xFFFFFFFF)):
            e.ty = GuestType(INT, unsigned=unsigned)
        elif v <= 0x7FFFFFFFFFFFFFFF and not unsigned:
            e.ty = LONG_T
        elif v <= 0xFFFFFFFFFFFFFFFF:
            e.ty = GuestType(LONG, unsigned=True)
        else:
            self.error("integer literal is too large", e.span)
        return e

    def e_FloatLit(self, e):
        e.ty = DOUBLE_T
        return e

    def e_CharLit(self, e):
        e.ty = INT_T
        return e

    def e_StrLit(self, e):
        e.ty = GuestType(ARRAY, elem=CHAR_T, length=len(e.value) + 1)
        return e

    def e_Name(self, e: A.Name) -> A.Expr:
        sym = self.lookup(e.name)
        if sym is None:
            self.error(f"use of undeclared identifier '{e.name}'", e.span)
        if isinstance(sym, FuncSym):
            if sym.builtin:
                self.error(f"builtin '{e.name}' can only be called, not referenced", e.span)
            self.check_defined(sym, e.span)
        e.sym = sym
        e.ty = sym.ty
        return e

    def check_defined(self, sym: FuncSym, span) -> None:
        if sym.decl is None:
            self.error(f"function '{sym.name}' is declared but never defined", span)

    def e_TypeOf(self, e: A.TypeOf, allowed: bool) -> A.Expr:
        if not allowed:
            self.error("type() may only appear as a call argument or an initializer", e.span)
        e.operand = self.expr(e.operand)
        e.type_expr = lower_type_operator(e.operand.ty)
        e.ty = TYPE_PTR
        return e

    def e_SizeofType(self, e):
        if not _complete(e.target):
            self.error(f"sizeof applied to incomplete type {e.target}", e.span)
        e.ty = SIZE_T
        return e

    def e_SizeofExpr(self, e):
        e.operand = self.expr(e.operand)
        if e.operand.ty.kind == FUNCTION or not _complete(e.operand.ty):
            self.error(f"sizeof applied to incomplete type {e.operand.ty}", e.span)
        e.ty = SIZE_T
        return e

    def e_Cast(self, e: A.Cast) -> A.Expr:
        e.operand = self.rvalue(e.operand)
        src, dst = e.operand.ty, e.target
        if dst.kind == VOID:
            e.ty = dst
            return e
        ok = (
            (src.is_arithmetic and dst.is_arithmetic)
            or (src.kind == POINTER and dst.kind == POINTER)
            or (dst.kind == POINTER and src.is_integer and is_null_constant(e.operand))
            or (src.kind == VALIST and dst.kind == VALIST)
        )
        if not ok:
            if dst.kind == POINTER and src.is_integer:
                self.error("integer-to-pointer casts are not supported", e.span)
            if dst.is_integer and src.kind == POINTER:
                self.error("pointer-to-integer casts are not supported", e.span)
            self.error(f"invalid cast from {src} to {dst}", e.span)
        e.ty = dst
        return e

    def e_Unary(self, e: A.Unary) -> A.Expr:
        op = e.op
        if op == "&":
            e.operand = self.expr(e.operand)
            o = e.operand
            if o.ty.kind == FUNCTION:
                e.ty = o.ty.pointer_to()
                return e
            if not self.is_lvalue(o):
                self.error("cannot take the address of an rvalue", e.span)
            e.ty = o.ty.pointer_to()
            return e
        if op == "*":
            e.operand = self.rvalue(e.operand)
            t = e.operand.ty
            if t.kind != POINTER:
                self.error(f"cannot dereference non-pointer type {t}", e.span)
            if t.elem.kind == VOID:
                self.error("cannot dereference void*", e.span)
            e.ty = t.elem
            return e
        if op in ("++", "--"):
            return self.incdec(e)
        e.operand = self.rvalue(e.operand)
        t = e.operand.ty
        if op == "!":
            if not t.is_scalar or t.kind == VALIST:
                self.error(f"invalid operand to '!': {t}", e.span)
            e.ty = INT_T
            return e
        if op == "~":
            if not t.is_integer:
                self.error(f"invalid operand to '~': {t}", e.span)
            e.ty = promote(t)
            e.operand = self.convert(e.operand, e.ty, e.span, "operand")
            return e
        if not t.is_arithmetic:
            self.error(f"invalid operand to unary '{op}': {t}", e.span)
        e.ty = promote(t)
        e.operand = self.convert(e.operand, e.ty, e.span, "operand")
        return e

    def incdec(self, e):
        e.operand = self.expr(e.operand)
        t = e.operand.ty
        if not self.is_lvalue(e.operand) or t.kind == ARRAY:
            self.error(f"'{e.op}' needs a modifiable lvalue", e.span)
        if not (t.is_arithmetic or t.kind == POINTER):
            self.error(f"invalid operand to '{e.op}': {t}", e.span)
        if t.kind == POINTER and not _complete(t.elem) and t.elem.kind != VOID:
            self.error("arithmetic on pointer to incomplete type", e.span)
        e.ty = t
        return e

    def e_Postfix(self, e):
        return self.incdec(e)

    def e_Binary(self, e: A.Binary) -> A.Expr:
        op = e.op
        e.left = self.rvalue(e.left)
        e.right = self.rvalue(e.right)
        lt, rt = e.left.ty, e.right.ty
        if op in ("&&", "||"):
            for side in (e.left, e.right):
                if not side.ty.is_scalar or side.ty.kind == VALIST:
                    self.error(f"invalid operand to '{op}': {side.ty}", e.span)
            e.ty = INT_T
            return e
        if op in ("+", "-") and (lt.kind == POINTER or rt.kind == POINTER):
            return self.pointer_arith(e)
        if op in ("==", "!=", "<", ">", "<=", ">=") and (lt.kind == POINTER or rt.kind == POINTER):
            if lt.kind == POINTER and rt.kind == POINTER:
                pass
            elif lt.kind == POINTER and is_null_constant(e.right):
                e.right = self.convert(e.right, lt, e.span, "comparison")
            elif rt.kind == POINTER and is_null_constant(e.left):
                e.left = self.convert(e.left, rt, e.span, "comparison")
            else:
                self.error(f"comparison between {lt} and {rt}", e.span)
            e.calc_ty = VOID_PTR
            e.ty = INT_T
            return e
        if not (lt.is_arithmetic and rt.is_arithmetic):
            self.error(f"invalid operands to '{op}': {lt} and {rt}", e.span)
        if op in ("%", "&", "|", "^", "<<", ">>") and not (lt.is_integer and rt.is_integer):
            self.error(f"invalid operands to '{op}': {lt} and {rt}", e.span)
        if op in ("<<", ">>"):
            e.calc_ty = promote(lt)
            e.left = self.convert(e.left, e.calc_ty, e.span, "operand")
            e.right = self.convert(e.right, promote(rt), e.span, "operand")
            e.ty = e.calc_ty
            return e
        calc = usual_conversion(lt, rt)
        e.calc_ty = calc
        e.left = self.convert(e.left, calc, e.span, "operand")
        e.right = self.convert(e.right, calc, e.span, "operand")
        e.ty = INT_T if op in ("==", "!=", "<", ">", "<=", ">=") else calc
        return e

    def pointer_arith(self, e: A.Binary) -> A.Expr:
        lt, rt = e.left.ty, e.right.ty
        if lt.kind == POINTER and rt.kind == POINTER:
            if e.op != "-":
                self.error("cannot add two pointers", e.span)
            e.ty = LONG_T
            e.calc_ty = lt
            return e
        if e.op == "+" and rt.kind == POINTER:
            e.left, e.right = e.right, e.left
            lt, rt = rt, lt
        if rt.kind == POINTER or not rt.is_integer:
            self.error(f"invalid operands to '{e.op}': {lt} and {rt}", e.span)
        if lt.elem.kind == FUNCTION or (not _complete(lt.elem) and lt.elem.kind != VOID):
            self.error("arithmetic on pointer to incomplete or function type", e.span)
        e.right = self.convert(e.right, LONG_T, e.span, "operand")
        e.ty = lt
        e.calc_ty = lt
        return e

    def e_Assign(self, e: A.Assign) -> A.Expr:
        e.target = self.expr(e.target)
        t = e.target.ty
        if not self.is_lvalue(e.target) or t.kind in (ARRAY, FUNCTION):
            self.error("assignment needs a modifiable lvalue", e.span)
        if isinstance(e.target, A.StrLit):
            self.error("cannot assign to a string literal", e.span)
        if e.op == "=":
            e.value = self.convert(self.rvalue(e.value), t, e.span, "assignment")
            e.ty = t
            return e
        binop = e.op[:-1]
        e.value = self.rvalue(e.value)
        vt = e.value.ty
        if t.kind == POINTER:
            if binop not in ("+", "-") or not vt.is_integer:
                self.error(f"invalid compound assignment '{e.op}' on pointer", e.span)
            e.value = self.convert(e.value, LONG_T, e.span, "operand")
            e.calc_ty = t
        else:
            if not (t.is_arithmetic and vt.is_arithmetic):
                self.error(f"invalid operands to '{e.op}': {t} and {vt}", e.span)
            if binop in ("%", "&", "|", "^", "<<", ">>") and not (t.is_integer and vt.is_integer):
                self.error(f"invalid operands to '{e.op}': {t} and {vt}", e.span)
            if binop in ("<<", ">>"):
                e.calc_ty = promote(t)
                e.value = self.convert(e.value, promote(vt), e.span, "operand")
            else:
                e.calc_ty = usual_conversion(t, vt)
                e.value = self.convert(e.value, e.calc_ty, e.span, "operand")
        e.ty = t
        return e

    def e_Cond(self, e: A.Cond) -> A.Expr:
        e.cond = self.condition(e.cond)
        e.then = self.rvalue(e.then)
        e.other = self.rvalue(e.other)
        a, b = e.then.ty, e.other.ty
        if a.is_arithmetic and b.is_arithmetic:
            ty = usual_conversion(a, b)
        elif a.kind == POINTER and b.kind == POINTER:
            ty = a if a == b or b.is_void_pointer else (b if a.is_void_pointer else a)
        elif a.kind == POINTER and is_null_constant(e.other):
            ty = a
        elif b.kind == POINTER and is_null_constant(e.then):
            ty = b
        elif a.kind == STRUCT and b.kind == STRUCT and a.struct is b.struct:
            ty = a
        elif a.kind == VOID and b.kind == VOID:
            ty = a
        else:
            self.error(f"incompatible operand types {a} and {b} in conditional", e.span)
        if ty.kind != VOID:
            e.then = self.convert(e.then, ty, e.span, "conditional")
            e.other = self.convert(e.other, ty, e.span, "conditional")
        e.ty = ty
        return e

    def e_Comma(self, e):
        e.left = self.expr(e.left)
        e.right = self.rvalue(e.right)
        e.ty = e.right.ty
        return e

    def e_Index(self, e: A.Index) -> A.Expr:
        e.base = self.rvalue(e.base)
        e.index = self.rvalue(e.index)
        if e.base.ty.kind != POINTER and e.index.ty.kind == POINTER:
            e.base, e.index = e.index, e.base
        bt = e.base.ty
        if bt.kind != POINTER or not e.index.ty.is_integer:
            self.error(f"cannot index {bt} with {e.index.ty}", e.span)
        if not _complete(bt.elem):
            self.error(f"cannot index pointer to incomplete type {bt.elem}", e.span)
        e.index = self.convert(e.index, LONG_T, e.span, "index")
        e.ty = bt.elem
        return e

    def e_Member(self, e: A.Member) -> A.Expr:
        if e.arrow:
            e.base = self.rvalue(e.base)
            bt = e.base.ty
            if bt.kind != POINTER or bt.elem.kind != STRUCT:
                self.error(f"'->' applied to non-struct-pointer type {bt}", e.span)
            sty = bt.elem
        else:
            e.base = self.expr(e.base)
            sty = e.base.ty
            if sty.kind != STRUCT:
                self.error(f"'.' applied to non-struct type {sty}", e.span)
        if not sty.struct.complete:
            self.error(f"member access into incomplete {sty}", e.span)
        fty = sty.struct.field_type(e.name)
        if fty is None:
            self.error(f"{sty} has no member named '{e.name}'", e.span)
        e.ty = fty
        return e

    def e_InitList(self, e):
        self.error("brace list is only allowed in an initializer", e.span)

    def e_VaStart(self, e: A.VaStart) -> A.Expr:
        if self.func is None or not self.func.ty.variadic:
            self.error("va_start used in a function without variadic parameters", e.span)
        e.ap = self.expr(e.ap)
        if e.ap.ty.kind != VALIST or not self.is_lvalue(e.ap):
            self.error("va_start needs a va_list variable", e.span)
        if e.last is not None:
            e.last = self.expr(e.last)
        e.ty = GuestType(VOID)
        return e

    def e_VaArg(self, e: A.VaArg) -> A.Expr:
        e.ap = self.rvalue(e.ap)
        if e.ap.ty.kind != VALIST:
            self.error("va_arg needs a va_list", e.span)
        t = e.target
        if not t.is_scalar or t.kind == VALIST:
            self.error(f"va_arg of unsupported type {t}", e.span)
        e.ty = t
        return e

    def e_VaEnd(self, e: A.VaEnd) -> A.Expr:
        e.ap = self.expr(e.ap)
        if e.ap.ty.kind != VALIST or not self.is_lvalue(e.ap):
            self.error("va_end needs a va_list variable", e.span)
        e.ty = GuestType(VOID)
        return e

    def e_Call(self, e: A.Call) -> A.Expr:
        f = e.func
        fsym = None
        if isinstance(f, A.Name):
            sym = self.lookup(f.name)
            if sym is None:
                self.error(f"call to undeclared function '{f.name}'", f.span)
            if isinstance(sym, FuncSym):
                fsym = sym
                f.sym = sym
                f.ty = sym.ty
                if not sym.builtin:
                    self.check_defined(sym, f.span)
        if fsym is not None:
            fty = fsym.ty
            if fsym.builtin:
                if f.name.startswith(PRELUDE_ONLY_PREFIX) and not self.prelude:
                    self.error(f"'{f.name}' is internal to the standard library", f.span)
                e.builtin = f.name
        else:
            e.func = self.rvalue(f)
            ft = e.func.ty
            if not ft.is_function_pointer:
                self.error(f"called object of type {ft} is not a function", e.span)
            fty = ft.elem
        nfixed = len(fty.params)
        if len(e.args) < nfixed or (len(e.args) > nfixed and not fty.variadic):
            name = f.name if isinstance(f, A.Name) else "function pointer"
            self.error(f"'{name}' expects {nfixed} argument(s) but {len(e.args)} were given", e.span)
        args = []
        for i, a in enumerate(e.args):
            self.typeof_ok = True
            a = self.rvalue(a)
            if a.ty.kind == VOID:
                self.error("void value used as an argument", a.span)
            if i < nfixed:
                a = self.convert(a, fty.params[i], a.span, "argument")
            else:
                pt = promote(a.ty) if a.ty.is_integer else a.ty
                if pt != a.ty:
                    a = self.convert(a, pt, a.span, "argument")
            args.append(a)
        e.args = args
        e.ty = fty.elem
        return e


def analyze(program: A.Program, base: ProgramInfo | None = None, prelude: bool = False) -> A.Program:
    """Resolve names and types in place; raises CompileError(SemaError)."""
    return Analyzer(program, base, prelude).run()
