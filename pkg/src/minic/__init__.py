"""MiniC: a small C interpreter with an introspection interface and a hardened libc."""
from .interpreter import ExecOutcome, compile_source, run_program, run_source

__all__ = ["ExecOutcome", "compile_source", "run_program", "run_source"]
__version__ = "0.1.0"
