"""Render a parsed (not yet analyzed) syntax tree back to MiniC source.

Every compound expression is parenthesized, so the output re-parses to a
structurally identical tree without any precedence reasoning.
"""
from __future__ import annotations

from ..types import STRUCT, base_name, render_decl, render_type
from . import ast as A

_PRINTABLE = {c for c in range(32, 127)} - {ord("\\"), ord("'"), ord('"')}


def _escape(data: bytes) -> str:
    return "".join(chr(b) if b in _PRINTABLE else f"\\{b:03o}" for b in data)


def expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return f"{e.value}{e.suffix}"
    if isinstance(e, A.FloatLit):
        text = repr(e.value)
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(e, A.CharLit):
        return f"'{_escape(bytes([e.value & 0xFF]))}'"
    if isinstance(e, A.StrLit):
        return f'"{_escape(e.value)}"'
    if isinstance(e, A.Name):
        return e.name
    if isinstance(e, A.Unary):
        return f"({e.op}{expr(e.operand)})"
    if isinstance(e, A.Postfix):
        return f"({expr(e.operand)}{e.op})"
    if isinstance(e, A.Binary):
        return f"({expr(e.left)} {e.op} {expr(e.right)})"
    if isinstance(e, A.Assign):
        return f"({expr(e.target)} {e.op} {expr(e.value)})"
    if isinstance(e, A.Cond):
        return f"({expr(e.cond)} ? {expr(e.then)} : {expr(e.other)})"
    if isinstance(e, A.Call):
        return f"{expr(e.func)}({', '.join(expr(a) for a in e.args)})"
    if isinstance(e, A.Index):
        return f"{expr(e.base)}[{expr(e.index)}]"
    if isinstance(e, A.Member):
        return f"{expr(e.base)}{'->' if e.arrow else '.'}{e.name}"
    if isinstance(e, A.Cast):
        if e.implicit:
            return expr(e.operand)
        return f"(({render_type(e.target)}) {expr(e.operand)})"
    if isinstance(e, A.SizeofType):
        return f"(sizeof({render_type(e.target)}))"
    if isinstance(e, A.SizeofExpr):
        # wrapped so a following postfix operator cannot bind to the operand
        return f"(sizeof({expr(e.operand)}))"
    if isinstance(e, A.TypeOf):
        return f"type({expr(e.operand)})"
    if isinstance(e, A.VaStart):
        return f"va_start({expr(e.ap)}, {expr(e.last)})" if e.last is not None else f"va_start({expr(e.ap)})"
    if isinstance(e, A.VaArg):
        return f"va_arg({expr(e.ap)}, {render_type(e.target)})"
    if isinstance(e, A.VaEnd):
        return f"va_end({expr(e.ap)})"
    if isinstance(e, A.Comma):
        return f"({expr(e.left)}, {expr(e.right)})"
    if isinstance(e, A.InitList):
        return "{" + ", ".join(expr(x) for x in e.items) + "}"
    raise TypeError(f"cannot print {type(e).__name__}")


def _innermost(ty):
    while ty.kind in ("pointer", "array", "function"):
        ty = ty.elem
    return ty


def declaration(decls: list[A.VarDecl]) -> str:
    """One declaration statement; all declarators share their base type."""
    first = decls[0]
    base = base_name(_innermost(first.ty))
    parts = []
    for d in decls:
        text = render_decl(d.ty, d.name)[len(base) :].strip()
        if d.init is not None:
            text += f" = {expr(d.init)}"
        parts.append(text)
    storage = f"{first.storage} " if first.storage else ""
    return f"{storage}{base} {', '.join(parts)};"


def stmt(s: A.Stmt, depth: int = 1) -> str:
    pad = "    " * depth
    if isinstance(s, A.Block):
        inner = "".join(stmt(x, depth + 1) for x in s.items)
        return f"{pad}{{\n{inner}{pad}}}\n"
    if isinstance(s, A.DeclStmt):
        return pad + declaration(s.decls) + "\n"
    if isinstance(s, A.ExprStmt):
        return f"{pad}{expr(s.expr)};\n"
    if isinstance(s, A.If):
        out = f"{pad}if ({expr(s.cond)})\n{stmt(s.then, depth + 1)}"
        if s.other is not None:
            out += f"{pad}else\n{stmt(s.other, depth + 1)}"
        return out
    if isinstance(s, A.While):
        return f"{pad}while ({expr(s.cond)})\n{stmt(s.body, depth + 1)}"
    if isinstance(s, A.DoWhile):
        return f"{pad}do\n{stmt(s.body, depth + 1)}{pad}while ({expr(s.cond)});\n"
    if isinstance(s, A.For):
        if s.init is None:
            init = ";"
        else:
            init = stmt(s.init, 0).strip()
        cond = expr(s.cond) if s.cond is not None else ""
        step = expr(s.step) if s.step is not None else ""
        return f"{pad}for ({init} {cond}; {step})\n{stmt(s.body, depth + 1)}"
    if isinstance(s, A.Return):
        return f"{pad}return {expr(s.value)};\n" if s.value is not None else f"{pad}return;\n"
    if isinstance(s, A.Break):
        return f"{pad}break;\n"
    if isinstance(s, A.Continue):
        return f"{pad}continue;\n"
    if isinstance(s, A.Empty):
        return f"{pad};\n"
    raise TypeError(f"cannot print {type(s).__name__}")


def _function(d: A.FuncDef) -> str:
    ty = d.ty
    params = [render_decl(p, n or "") for p, n in zip(ty.params, d.params or [""] * len(ty.params))]
    if ty.variadic:
        params.append("...")
    head = render_decl(ty.elem, f"{d.name}({', '.join(params) if params else 'void'})")
    if d.storage:
        head = f"{d.storage} {head}"
    if d.body is None:
        return head + ";\n"
    return head + "\n" + stmt(d.body, 0)


def program(p: A.Program) -> str:
    out = []
    for d in p.decls:
        if isinstance(d, A.StructDecl):
            sdef = d.ty.struct
            assert d.ty.kind == STRUCT
            fields = "".join(f"    {render_decl(t, n)};\n" for n, t in sdef.fields)
            out.append(f"struct {sdef.name} {{\n{fields}}};\n")
        elif isinstance(d, A.VarDecl):
            out.append(declaration([d]) + "\n")
        else:
            out.append(_function(d))
    return "\n".join(out)
