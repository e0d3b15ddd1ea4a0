"""Names the front end knows without a declaration: builtins and constants."""
from __future__ import annotations

from .types import (
    CHAR_PTR,
    DOUBLE_T,
    INT_T,
    LONG_T,
    SIZE_T,
    TYPE_T,
    UINT_T,
    VALIST_T,
    VOID_PTR,
    VOID_T,
    function_type,
)

TYPE_PTR = TYPE_T.pointer_to()

# Host-implemented functions with their guest signatures.
BUILTIN_FUNCTIONS = {
    # introspection primitives
    "_size_right": function_type(LONG_T, [VOID_PTR]),
    "_size_left": function_type(LONG_T, [VOID_PTR]),
    "location": function_type(INT_T, [VOID_PTR]),
    "try_cast": function_type(VOID_PTR, [VOID_PTR, TYPE_PTR]),
    # these read the calling function's own frame
    "count_varargs": function_type(INT_T, []),
    "_get_vararg": function_type(VOID_PTR, [INT_T]),
    "get_vararg": function_type(VOID_PTR, [INT_T, TYPE_PTR]),
    # va_list access for v*printf-style internals
    "__va_count": function_type(INT_T, [VALIST_T]),
    "__va_get": function_type(VOID_PTR, [VALIST_T, INT_T, TYPE_PTR]),
    # process control
    "exit": function_type(VOID_T, [INT_T]),
    "abort": function_type(VOID_T, []),
    # raw host services, reserved for the prelude
    "__host_write": function_type(INT_T, [INT_T, INT_T]),
    "__host_getchar": function_type(INT_T, []),
    "__host_alloc": function_type(VOID_PTR, [SIZE_T, INT_T]),
    "__host_free": function_type(VOID_T, [VOID_PTR]),
    "__host_memmove": function_type(INT_T, [VOID_PTR, VOID_PTR, SIZE_T]),
    "__host_memset": function_type(INT_T, [VOID_PTR, INT_T, SIZE_T]),
    "__host_fmt_double": function_type(INT_T, [CHAR_PTR, LONG_T, DOUBLE_T, INT_T]),
}

# Neither definable nor addressable by guest code.
RESERVED_NAMES = {"type", "va_start", "va_arg", "va_end"} | set(BUILTIN_FUNCTIONS)

PRELUDE_ONLY_PREFIX = "__host_"

CONSTANTS = {
    "NULL": (VOID_PTR, 0),
    "EOF": (INT_T, -1),
    "EINVAL": (INT_T, 22),
    "INVALID": (INT_T, 0),
    "AUTOMATIC": (INT_T, 1),
    "DYNAMIC": (INT_T, 2),
    "STATIC": (INT_T, 3),
    "true": (INT_T, 1),
    "false": (INT_T, 0),
    "INT_MAX": (INT_T, 2**31 - 1),
    "INT_MIN": (INT_T, -(2**31)),
    "UINT_MAX": (UINT_T, 2**32 - 1),
    "LONG_MAX": (LONG_T, 2**63 - 1),
    "LONG_MIN": (LONG_T, -(2**63)),
    "SIZE_MAX": (SIZE_T, 2**64 - 1),
}
