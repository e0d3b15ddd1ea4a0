"""Lexer, parser and semantic analysis for MiniC."""
from .parser import parse
from .sema import analyze

__all__ = ["parse", "analyze"]
