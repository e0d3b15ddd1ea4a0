"""Tokenizer for MiniC."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import CompileError, Diagnostic, DiagnosticKind, SourceSpan

KEYWORDS = {
    "char", "int", "long", "double", "void", "unsigned", "signed", "const",
    "static", "extern", "struct", "sizeof", "if", "else", "while", "do", "for",
    "return", "break", "continue",
}

# builtin type names (no typedef in MiniC)
TYPE_NAMES = {"size_t", "rsize_t", "va_list", "Type", "FILE", "ssize_t", "bool"}

PUNCTUATORS = sorted(
    """... <<= >>= -> ++ -- << >> <= >= == != && || += -= *= /= %= &= |= ^=
    ( ) [ ] { } . , ; : ? + - * / % & | ^ ! ~ < > =""".split(),
    key=len,
    reverse=True,
)

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34, "a": 7, "b": 8, "f": 12, "v": 11, "?": 63}


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'keyword', 'int', 'float', 'char', 'string', 'punct', 'eof'
    text: str
    value: object
    span: SourceSpan

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.span.line}:{self.span.column})"


_NUMBER = re.compile(
    r"""(?:
        0[xX][0-9a-fA-F]+(?P<hexsuf>[uUlL]*)
      | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)[fFlL]?
      | \d+(?P<decsuf>[uUlL]*)
    )""",
    re.VERBOSE,
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _error(msg: str, span: SourceSpan) -> CompileError:
    return CompileError(Diagnostic(DiagnosticKind.ParseError, span, msg))


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in source[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = source[i]
        if ch in " \t\r\n\f\v":
            advance(1)
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise _error("unterminated comment", SourceSpan(file, line, col))
            advance(j + 2 - i)
            continue
        if ch == "#":
            raise _error("preprocessor directives are not supported", SourceSpan(file, line, col))
        span = SourceSpan(file, line, col)
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER.match(source, i)
            text = m.group(0)
            if m.group("float") is not None:
                tokens.append(Token("float", text, float(text.rstrip("fFlL")), span))
            else:
                suffix = (m.group("hexsuf") or m.group("decsuf") or "").lower()
                digits = text[: len(text) - len(suffix)] if suffix else text
                if digits.startswith(("0x", "0X")):
                    value = int(digits, 16)
                elif len(digits) > 1 and digits.startswith("0"):
                    if any(c in "89" for c in digits):
                        raise _error(f"invalid octal literal {text}", span)
                    value = int(digits, 8)
                else:
                    value = int(digits)
                tokens.append(Token("int", text, (value, suffix), span))
            if m.end() < n and (source[m.end()].isalnum() or source[m.end()] == "_"):
                raise _error(f"invalid numeric literal near {source[i:m.end() + 1]!r}", span)
            advance(len(text))
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT.match(source, i)
            text = m.group(0)
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, text, span))
            advance(len(text))
            continue
        if ch == "'":
            j = i + 1
            chars, j = _read_quoted(source, j, "'", span)
            if len(chars) != 1:
                raise _error("character literal must contain exactly one character", span)
            tokens.append(Token("char", source[i:j], chars[0], span))
            advance(j - i)
            continue
        if ch == '"':
            j = i + 1
            chars, j = _read_quoted(source, j, '"', span)
            tokens.append(Token("string", source[i:j], bytes(chars), span))
            advance(j - i)
            continue
        for p in PUNCTUATORS:
            if source.startswith(p, i):
                tokens.append(Token("punct", p, p, span))
                advance(len(p))
                break
        else:
            raise _error(f"unexpected character {ch!r}", span)
    tokens.append(Token("eof", "", None, SourceSpan(file, line, col)))
    return tokens


def _read_quoted(source: str, j: int, quote: str, span: SourceSpan) -> tuple[list[int], int]:
    out: list[int] = []
    n = len(source)
    while True:
        if j >= n or source[j] == "\n":
            raise _error("unterminated literal", span)
        c = source[j]
        if c == quote:
            return out, j + 1
        if c == "\\":
            j += 1
            if j >= n:
                raise _error("unterminated literal", span)
            e = source[j]
            if e == "x":
                m = re.match(r"[0-9a-fA-F]{1,2}", source[j + 1 :])
                if not m:
                    raise _error("invalid \\x escape", span)
                out.append(int(m.group(0), 16))
                j += 1 + len(m.group(0))
                continue
            if e in "01234567":
                m = re.match(r"[0-7]{1,3}", source[j:])
                out.append(int(m.group(0), 8) & 0xFF)
                j += len(m.group(0))
                continue
            if e not in _ESCAPES:
                raise _error(f"unknown escape \\{e}", span)
            out.append(_ESCAPES[e])
            j += 1
            continue
        out.extend(c.encode("utf-8"))
        j += 1
