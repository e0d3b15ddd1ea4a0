"""Recursive-descent parser producing an untyped :mod:`minic.frontend.ast` tree."""
from __future__ import annotations

from ..diagnostics import CompileError, Diagnostic, DiagnosticKind, SourceSpan
from ..types import (
    ARRAY,
    CHAR,
    DOUBLE,
    FILE_DEF,
    FUNCTION,
    INT,
    LONG,
    STRUCT,
    TYPE_DEF,
    VOID,
    GuestType,
    StructDef,
    function_type,
    sizeof,
)
from . import ast as A
from .lexer import TYPE_NAMES, Token, tokenize

TYPE_KEYWORDS = {"char", "int", "long", "double", "void", "unsigned", "signed", "const", "struct"}

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}

BUILTIN_STRUCTS = {"Type": TYPE_DEF, "FILE": FILE_DEF}


class Parser:
    def __init__(self, tokens: list[Token], file: str, struct_tags: dict[str, StructDef] | None = None):
        self.toks = tokens
        self.pos = 0
        self.file = file
        self.tags: dict[str, StructDef] = dict(struct_tags or {})

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "keyword") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected '{text}' but found {self.describe(self.tok)}")
        t = self.tok
        self.pos += 1
        return t

    def expect_ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier but found {self.describe(t)}")
        self.pos += 1
        return t

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else f"'{t.text}'"

    def error(self, msg: str, span: SourceSpan | None = None):
        raise CompileError(Diagnostic(DiagnosticKind.ParseError, span or self.tok.span, msg))

    def starts_type(self, t: Token | None = None) -> bool:
        t = t or self.tok
        if t.kind == "keyword" and t.text in TYPE_KEYWORDS:
            return True
        return t.kind == "ident" and t.text in TYPE_NAMES

    # -- top level ------------------------------------------------------
    def parse_program(self) -> A.Program:
        decls = []
        span = self.tok.span
        while self.tok.kind != "eof":
            decls.extend(self.external_declaration())
        return A.Program(decls, self.file, span=span)

    def external_declaration(self) -> list:
        span = self.tok.span
        storage = self.storage_class()
        base, struct_defined = self.type_specifier()
        if self.accept(";"):
            if struct_defined is None:
                self.error("declaration declares nothing", span)
            return [A.StructDecl(base, span=span)]
        out: list = []
        if struct_defined is not None:
            out.append(A.StructDecl(base, span=span))
        first = True
        while True:
            dspan = self.tok.span
            name, ty, pnames = self.declarator(base)
            if name is None:
                self.error("expected a declarator name", dspan)
            if ty.kind == FUNCTION:
                if first and self.at("{"):
                    if pnames is None or len(pnames) != len(ty.params) or any(p is None for p in pnames):
                        self.error(f"function '{name}' definition needs named parameters", dspan)
                    body = self.block()
                    out.append(A.FuncDef(name, ty, list(pnames), body, storage, span=dspan))
                    return out
                out.append(A.FuncDef(name, ty, list(pnames or []), None, storage, span=dspan))
            else:
                init = self.initializer() if self.accept("=") else None
                out.append(A.VarDecl(name, ty, init, storage, span=dspan))
            first = False
            if self.accept(","):
                continue
            self.expect(";")
            return out

    def storage_class(self) -> str | None:
        storage = None
        while self.tok.kind == "keyword" and self.tok.text in ("static", "extern", "const"):
            if self.tok.text != "const":
                storage = self.tok.text
            self.pos += 1
        return storage

    # -- types -----------------------------------------------------------
    def type_specifier(self) -> tuple[GuestType, StructDef | None]:
        """Parse declaration specifiers; returns the base type and any struct defined here."""
        span = self.tok.span
        words: list[str] = []
        result: GuestType | None = None
        defined = None
        while True:
            t = self.tok
            if t.kind == "keyword" and t.text == "const":
                self.pos += 1
                continue
            if t.kind == "keyword" and t.text in ("char", "int", "long", "double", "void", "unsigned", "signed"):
                words.append(t.text)
                self.pos += 1
                continue
            if t.kind == "keyword" and t.text == "struct" and result is None and not words:
                result, defined = self.struct_specifier()
                continue
            if t.kind == "ident" and t.text in TYPE_NAMES and result is None and not words:
                self.pos += 1
                result = _builtin_type_name(t.text)
                continue
            break
        if result is not None:
            if words:
                self.error("invalid combination of type specifiers", span)
            return result, defined
        if not words:
            self.error(f"expected a type but found {self.describe(self.tok)}", span)
        return _combine_words(words, span, self), None

    def struct_specifier(self) -> tuple[GuestType, StructDef | None]:
        self.expect("struct")
        span = self.tok.span
        name = self.expect_ident().text
        if name in BUILTIN_STRUCTS:
            if self.at("{"):
                self.error(f"struct {name} is builtin", span)
            return GuestType(STRUCT, struct=BUILTIN_STRUCTS[name]), None
        sdef = self.tags.get(name)
        if sdef is None:
            sdef = StructDef(name)
            self.tags[name] = sdef
        if not self.accept("{"):
            return GuestType(STRUCT, struct=sdef), None
        if sdef.complete:
            # a fresh definition in this translation unit replaces an inherited one
            sdef = StructDef(name)
            self.tags[name] = sdef
        fields: list[tuple[str, GuestType]] = []
        while not self.accept("}"):
            fspan = self.tok.span
            base, _ = self.type_specifier()
            while True:
                fname, fty, _ = self.declarator(base)
                if fname is None:
                    self.error("expected field name", fspan)
                if fty.kind == FUNCTION:
                    self.error("struct field cannot have function type", fspan)
                if not _complete(fty):
                    self.error(f"field '{fname}' has incomplete type", fspan)
                fields.append((fname, fty))
                if not self.accept(","):
                    break
            self.expect(";")
        try:
            sdef.define(fields)
        except ValueError as e:
            self.error(str(e), span)
        return GuestType(STRUCT, struct=sdef), sdef

    def declarator(self, base: GuestType, abstract: bool = False):
        """Returns (name or None, type, parameter names of the innermost function suffix)."""
        name, build, pnames = self._declarator()
        return name, build(base), pnames

    def _declarator(self):
        if self.accept("*"):
            while self.accept("const"):
                pass
            name, inner, pnames = self._declarator()
            return name, (lambda t: inner(t.pointer_to())), pnames
        return self._direct_declarator()

    def _direct_declarator(self):
        name = None
        inner = lambda t: t  # noqa: E731
        pnames = None
        if self.at("(") and (self.peek().text in ("*", "(") and self.peek().kind == "punct"
                             or (self.peek().kind == "ident" and self.peek().text not in TYPE_NAMES)):
            self.pos += 1
            name, inner, pnames = self._declarator()
            self.expect(")")
        elif self.tok.kind == "ident" and self.tok.text not in TYPE_NAMES:
            name = self.tok.text
            self.pos += 1
        suffixes = []
        while True:
            if self.accept("["):
                if self.accept("]"):
                    suffixes.append(("arr", None))
                else:
                    sspan = self.tok.span
                    n = self.const_eval(self.conditional())
                    if n <= 0:
                        self.error("array size must be positive", sspan)
                    self.expect("]")
                    suffixes.append(("arr", n))
            elif self.at("("):
                self.pos += 1
                params, names, variadic = self.parameter_list()
                if name is not None and pnames is None and not suffixes:
                    pnames = names
                suffixes.append(("fn", params, variadic))
            else:
                break

        def build(t: GuestType) -> GuestType:
            for s in reversed(suffixes):
                if s[0] == "arr":
                    if t.kind == FUNCTION:
                        raise ValueError("array of functions")
                    t = GuestType(ARRAY, elem=t, length=s[1])
                else:
                    if t.kind in (ARRAY, FUNCTION):
                        raise ValueError("function returning array or function")
                    t = function_type(t, s[1], s[2])
            return inner(t)

        def checked(t: GuestType) -> GuestType:
            try:
                return build(t)
            except ValueError as e:
                self.error(str(e))

        return name, checked, pnames

    def parameter_list(self):
        params: list[GuestType] = []
        names: list[str | None] = []
        variadic = False
        if self.accept(")"):
            return params, names, variadic
        if self.at("void") and self.peek().text == ")":
            self.pos += 2
            return params, names, variadic
        while True:
            if self.accept("..."):
                variadic = True
                break
            pspan = self.tok.span
            self.storage_class()
            base, _ = self.type_specifier()
            pname, pty, _ = self.declarator(base)
            if pty.kind == VOID:
                self.error("parameter cannot have type void", pspan)
            params.append(adjust_param(pty))
            names.append(pname)
            if not self.accept(","):
                break
        self.expect(")")
        return params, names, variadic

    def type_name(self) -> GuestType:
        base, _ = self.type_specifier()
        name, ty, _ = self.declarator(base)
        if name is not None:
            self.error("unexpected identifier in type name")
        return ty

    # -- statements ---------------------------------------------------------
    def block(self) -> A.Block:
        span = self.expect("{").span
        items = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("expected '}' before end of input")
            items.append(self.statement())
        return A.Block(items, span=span)

    def statement(self) -> A.Stmt:
        t = self.tok
        span = t.span
        if self.at("{"):
            return self.block()
        if self.starts_type() or (t.kind == "keyword" and t.text in ("static", "extern")):
            return self.local_declaration()
        if self.accept(";"):
            return A.Empty(span=span)
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            other = self.statement() if self.accept("else") else None
            return A.If(cond, then, other, span=span)
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return A.While(cond, self.statement(), span=span)
        if self.accept("do"):
            body = self.statement()
            self.expect("while")
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            self.expect(";")
            return A.DoWhile(body, cond, span=span)
        if self.accept("for"):
            self.expect("(")
            if self.accept(";"):
                init = None
            elif self.starts_type():
                init = self.local_declaration()
            else:
                e = self.expression()
                self.expect(";")
                init = A.ExprStmt(e, span=e.span)
            cond = None if self.at(";") else self.expression()
            self.expect(";")
            step = None if self.at(")") else self.expression()
            self.expect(")")
            return A.For(init, cond, step, self.statement(), span=span)
        if self.accept("return"):
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return A.Return(value, span=span)
        if self.accept("break"):
            self.expect(";")
            return A.Break(span=span)
        if self.accept("continue"):
            self.expect(";")
            return A.Continue(span=span)
        if t.kind == "ident" and t.text in ("switch", "goto", "union", "typedef", "case", "default"):
            self.error(f"'{t.text}' is not supported in MiniC")
        e = self.expression()
        self.expect(";")
        return A.ExprStmt(e, span=span)

    def local_declaration(self) -> A.DeclStmt:
        span = self.tok.span
        storage = self.storage_class()
        base, sdef = self.type_specifier()
        decls = []
        if self.accept(";"):
            if sdef is None:
                self.error("declaration declares nothing", span)
            return A.DeclStmt([], span=span)
        while True:
            dspan = self.tok.span
            name, ty, _ = self.declarator(base)
            if name is None:
                self.error("expected a declarator name", dspan)
            init = self.initializer() if self.accept("=") else None
            decls.append(A.VarDecl(name, ty, init, storage, span=dspan))
            if not self.accept(","):
                break
        self.expect(";")
        return A.DeclStmt(decls, span=span)

    def initializer(self) -> A.Expr:
        if self.at("{"):
            span = self.expect("{").span
            items = []
            while not self.accept("}"):
                items.append(self.initializer())
                if not self.accept(","):
                    self.expect("}")
                    break
            return A.InitList(items, span=span)
        return self.assignment()

    # -- expressions ------------------------------------------------------
    def expression(self) -> A.Expr:
        e = self.assignment()
        while self.at(","):
            span = self.tok.span
            self.pos += 1
            e = A.Comma(e, self.assignment(), span=span)
        return e

    def assignment(self) -> A.Expr:
        left = self.conditional()
        t = self.tok
        if t.kind == "punct" and t.text in ASSIGN_OPS:
            self.pos += 1
            right = self.assignment()
            return A.Assign(t.text, left, right, span=t.span)
        return left

    def conditional(self) -> A.Expr:
        cond = self.binary(1)
        if self.at("?"):
            span = self.tok.span
            self.pos += 1
            then = self.expression()
            self.expect(":")
            other = self.conditional()
            return A.Cond(cond, then, other, span=span)
        return cond

    def binary(self, min_prec: int) -> A.Expr:
        left = self.unary()
        while True:
            t = self.tok
            prec = BINARY_PRECEDENCE.get(t.text) if t.kind == "punct" else None
            if prec is None or prec < min_prec:
                return left
            self.pos += 1
            right = self.binary(prec + 1)
            left = A.Binary(t.text, left, right, span=t.span)

    def unary(self) -> A.Expr:
        t = self.tok
        span = t.span
        if t.kind == "punct" and t.text in ("-", "+", "!", "~", "*", "&"):
            self.pos += 1
            return A.Unary(t.text, self.unary(), span=span)
        if t.kind == "punct" and t.text in ("++", "--"):
            self.pos += 1
            return A.Unary(t.text, self.unary(), span=span)
        if self.accept("sizeof"):
            if self.at("(") and self.starts_type(self.peek()):
                self.pos += 1
                ty = self.type_name()
                self.expect(")")
                return A.SizeofType(ty, span=span)
            return A.SizeofExpr(self.unary(), span=span)
        if self.at("(") and self.starts_type(self.peek()):
            self.pos += 1
            ty = self.type_name()
            self.expect(")")
            return A.Cast(ty, self.unary(), span=span)
        return self.postfix()

    def postfix(self) -> A.Expr:
        e = self.primary()
        while True:
            t = self.tok
            if self.accept("["):
                idx = self.expression()
                self.expect("]")
                e = A.Index(e, idx, span=t.span)
            elif self.accept("("):
                args = []
                if not self.accept(")"):
                    while True:
                        args.append(self.assignment())
                        if self.accept(")"):
                            break
                        self.expect(",")
                e = A.Call(e, args, span=e.span)
            elif self.accept("."):
                e = A.Member(e, self.expect_ident().text, False, span=t.span)
            elif self.accept("->"):
                e = A.Member(e, self.expect_ident().text, True, span=t.span)
            elif t.kind == "punct" and t.text in ("++", "--"):
                self.pos += 1
                e = A.Postfix(t.text, e, span=t.span)
            else:
                return e

    def primary(self) -> A.Expr:
        t = self.tok
        span = t.span
        if t.kind == "int":
            self.pos += 1
            value, suffix = t.value
            return A.IntLit(value, suffix, span=span)
        if t.kind == "float":
            self.pos += 1
            return A.FloatLit(t.value, span=span)
        if t.kind == "char":
            self.pos += 1
            return A.CharLit(t.value, span=span)
        if t.kind == "string":
            data = b""
            while self.tok.kind == "string":
                data += self.tok.value
                self.pos += 1
            return A.StrLit(data, span=span)
        if t.kind == "ident":
            if t.text == "type" and self.peek().text == "(":
                self.pos += 2
                operand = self.expression()
                self.expect(")")
                return A.TypeOf(operand, span=span)
            if t.text == "va_arg" and self.peek().text == "(":
                self.pos += 2
                ap = self.assignment()
                self.expect(",")
                ty = self.type_name()
                self.expect(")")
                return A.VaArg(ap, ty, span=span)
            if t.text == "va_start" and self.peek().text == "(":
                self.pos += 2
                ap = self.assignment()
                last = self.assignment() if self.accept(",") else None
                self.expect(")")
                return A.VaStart(ap, last, span=span)
            if t.text == "va_end" and self.peek().text == "(":
                self.pos += 2
                ap = self.assignment()
                self.expect(")")
                return A.VaEnd(ap, span=span)
            self.pos += 1
            return A.Name(t.text, span=span)
        if self.accept("("):
            e = self.expression()
            self.expect(")")
            return e
        self.error(f"expected an expression but found {self.describe(t)}")

    # -- constant expressions ---------------------------------------------
    def const_eval(self, e: A.Expr) -> int:
        v = _const_eval(e)
        if v is None:
            self.error("expected an integer constant expression", e.span)
        return v


def _const_eval(e: A.Expr):
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.CharLit):
        return e.value
    if isinstance(e, A.SizeofType):
        if not _complete(e.target):
            return None
        return sizeof(e.target)
    if isinstance(e, A.Unary) and e.op in ("-", "+", "~"):
        v = _const_eval(e.operand)
        if v is None:
            return None
        return {"-": -v, "+": v, "~": ~v}[e.op]
    if isinstance(e, A.Cast) and e.target.is_integer:
        return _const_eval(e.operand)
    if isinstance(e, A.Binary):
        a, b = _const_eval(e.left), _const_eval(e.right)
        if a is None or b is None:
            return None
        op = e.op
        if op in ("/", "%") and b == 0:
            return None
        if op == "/":
            return int(a / b)
        if op == "%":
            return a - int(a / b) * b
        ops = {
            "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
            "<<": lambda: a << b, ">>": lambda: a >> b, "&": lambda: a & b,
            "|": lambda: a | b, "^": lambda: a ^ b,
        }
        if op in ops:
            return ops[op]()
    return None


def _complete(ty: GuestType) -> bool:
    if ty.kind == STRUCT:
        return ty.struct.complete
    if ty.kind == ARRAY:
        return ty.length is not None and _complete(ty.elem)
    return ty.kind not in (VOID, FUNCTION)


def adjust_param(ty: GuestType) -> GuestType:
    if ty.kind == ARRAY:
        return ty.elem.pointer_to()
    if ty.kind == FUNCTION:
        return ty.pointer_to()
    return ty


def _builtin_type_name(name: str) -> GuestType:
    from ..types import FILE_T, INT_T, LONG_T, SIZE_T, TYPE_T, VALIST_T

    return {
        "bool": INT_T,
        "size_t": SIZE_T,
        "rsize_t": SIZE_T,
        "ssize_t": LONG_T,
        "va_list": VALIST_T,
        "Type": TYPE_T,
        "FILE": FILE_T,
    }[name]


def _combine_words(words: list[str], span: SourceSpan, parser: Parser) -> GuestType:
    unsigned = "unsigned" in words
    if unsigned and "signed" in words:
        parser.error("both signed and unsigned", span)
    core = [w for w in words if w not in ("unsigned", "signed")]
    if core in ([], ["int"]):
        return GuestType(INT, unsigned=unsigned)
    if core == ["char"]:
        return GuestType(CHAR, unsigned=unsigned)
    if core in (["long"], ["long", "int"], ["int", "long"], ["long", "long"], ["long", "long", "int"]):
        return GuestType(LONG, unsigned=unsigned)
    if core == ["double"] and not unsigned and "signed" not in words:
        return GuestType(DOUBLE)
    if core == ["void"] and len(words) == 1:
        return GuestType(VOID)
    parser.error(f"unsupported type '{' '.join(words)}'", span)


def parse(source: str, file_name: str = "<input>", struct_tags: dict[str, StructDef] | None = None) -> A.Program:
    """Parse MiniC source text; raises CompileError(ParseError) on malformed input."""
    tokens = tokenize(source, file_name)
    return Parser(tokens, file_name, struct_tags).parse_program()
