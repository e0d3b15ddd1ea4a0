"""Structured diagnostics shared by the front end, the runtime and the CLI."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class DiagnosticKind(str, enum.Enum):
    ParseError = "ParseError"
    SemaError = "SemaError"
    OutOfBounds = "OutOfBounds"
    UseAfterFree = "UseAfterFree"
    InvalidFree = "InvalidFree"
    TypeViolation = "TypeViolation"
    VarargViolation = "VarargViolation"
    NullDereference = "NullDereference"
    ArithmeticError = "ArithmeticError"
    InternalLimit = "InternalLimit"

    @property
    def is_frontend(self) -> bool:
        return self in (DiagnosticKind.ParseError, DiagnosticKind.SemaError)


@dataclass
class Diagnostic:
    kind: DiagnosticKind
    span: SourceSpan | None
    message: str
    stack: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "file": self.span.file if self.span else None,
            "line": self.span.line if self.span else None,
            "column": self.span.column if self.span else None,
            "message": self.message,
            "stack": list(self.stack),
        }

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        text = f"{where}{self.kind.value}: {self.message}"
        if self.stack:
            frames = list(reversed(self.stack))
            if len(frames) > 16:
                frames = frames[:10] + [f"... {len(frames) - 15} more ..."] + frames[-5:]
            text += "\n  guest stack: " + " <- ".join(frames)
        return text


class CompileError(Exception):
    """Raised by parse/analyze; carries a ParseError or SemaError diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class RuntimeFault(Exception):
    """A runtime-detected violation. The interpreter attaches span and stack."""

    def __init__(self, kind: DiagnosticKind, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span: SourceSpan | None = None
        self.stack: list[str] | None = None

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic(self.kind, self.span, self.message, list(self.stack or []))
