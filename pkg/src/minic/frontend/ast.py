"""MiniC syntax tree.

Spans and analysis results are excluded from equality, so ``==`` on two trees
is structural comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..diagnostics import SourceSpan
from ..types import GuestType


def _meta(default=None):
    return field(default=default, compare=False, repr=False, kw_only=True)


@dataclass
class Node:
    span: SourceSpan | None = _meta()


@dataclass
class Expr(Node):
    ty: GuestType | None = _meta()


@dataclass
class IntLit(Expr):
    value: int
    suffix: str = ""


@dataclass
class FloatLit(Expr):
    value: float


@dataclass
class CharLit(Expr):
    value: int


@dataclass
class StrLit(Expr):
    value: bytes


@dataclass
class Name(Expr):
    name: str
    sym: Any = _meta()


@dataclass
class Unary(Expr):
    op: str  # - + ! ~ * & ++ --  (prefix)
    operand: Expr
    calc_ty: GuestType | None = _meta()


@dataclass
class Postfix(Expr):
    op: str  # ++ --
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    calc_ty: GuestType | None = _meta()  # operand type after the usual conversions


@dataclass
class Assign(Expr):
    op: str  # '=' or compound like '+='
    target: Expr
    value: Expr
    calc_ty: GuestType | None = _meta()  # operation type of a compound assignment


@dataclass
class Cond(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class Call(Expr):
    func: Expr
    args: list[Expr]
    builtin: str | None = _meta()


@dataclass
class Index(Expr):
    base: Expr
    index: Expr


@dataclass
class Member(Expr):
    base: Expr
    name: str
    arrow: bool


@dataclass
class Cast(Expr):
    target: GuestType
    operand: Expr
    implicit: bool = False


@dataclass
class SizeofType(Expr):
    target: GuestType


@dataclass
class SizeofExpr(Expr):
    operand: Expr


@dataclass
class TypeOf(Expr):
    """The type() operator: a compile-time TypeExpr constant."""

    operand: Expr
    type_expr: Any = _meta()


@dataclass
class VaStart(Expr):
    ap: Expr
    last: Expr | None


@dataclass
class VaArg(Expr):
    ap: Expr
    target: GuestType


@dataclass
class VaEnd(Expr):
    ap: Expr


@dataclass
class Comma(Expr):
    left: Expr
    right: Expr


@dataclass
class InitList(Expr):
    items: list[Expr]


# -- statements ---------------------------------------------------------


@dataclass
class Stmt(Node):
    pass


@dataclass
class VarDecl(Stmt):
    name: str
    ty: GuestType
    init: Expr | None = None
    storage: str | None = None  # 'static', 'extern' or None
    sym: Any = _meta()


@dataclass
class DeclStmt(Stmt):
    decls: list[VarDecl]


@dataclass
class Block(Stmt):
    items: list[Stmt]


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Stmt | None = None


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass
class DoWhile(Stmt):
    body: Stmt
    cond: Expr


@dataclass
class For(Stmt):
    init: Stmt | None
    cond: Expr | None
    step: Expr | None
    body: Stmt


@dataclass
class Return(Stmt):
    value: Expr | None = None


@dataclass
class Break(Stmt):
    pass


@dataclass
class Continue(Stmt):
    pass


@dataclass
class Empty(Stmt):
    pass


# -- top level ------------------------------------------------------------


@dataclass
class StructDecl(Node):
    ty: GuestType  # kind == struct


@dataclass
class FuncDef(Node):
    name: str
    ty: GuestType  # kind == function
    params: list[str]
    body: Block | None = None
    storage: str | None = None
    # filled by analysis
    nslots: int = _meta(0)
    param_syms: list = _meta()
    is_prelude: bool = _meta(False)


@dataclass
class Program(Node):
    decls: list  # VarDecl | FuncDef | StructDecl
    file: str = "<input>"
    analyzed: bool = _meta(False)
    info: Any = _meta()

    def functions(self) -> dict[str, FuncDef]:
        return {d.name: d for d in self.decls if isinstance(d, FuncDef) and d.body is not None}


def walk(node):
    """Pre-order traversal over every node of a tree."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        for child in reversed(list(children(n))):
            stack.append(child)


def children(node):
    for name in getattr(node, "__dataclass_fields__", {}):
        f = node.__dataclass_fields__[name]
        if not f.compare:
            continue
        v = getattr(node, name)
        if isinstance(v, Node):
            yield v
        elif isinstance(v, list):
            for x in v:
                if isinstance(x, Node):
                    yield x
