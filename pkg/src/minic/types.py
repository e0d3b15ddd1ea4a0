"""Guest (MiniC) types: the declared-type model, sizes, and cell layouts."""
from __future__ import annotations

from dataclasses import dataclass, field

CHAR = "char"
INT = "int"
LONG = "long"
DOUBLE = "double"
VOID = "void"
POINTER = "pointer"
ARRAY = "array"
STRUCT = "struct"
FUNCTION = "function"
VALIST = "va_list"

SCALAR_KINDS = (CHAR, INT, LONG, DOUBLE, POINTER, VALIST)
INTEGER_KINDS = (CHAR, INT, LONG)

_SIZES = {CHAR: 1, INT: 4, LONG: 8, DOUBLE: 8, POINTER: 8, VALIST: 8, VOID: 1, FUNCTION: 1}


class StructDef:
    """A struct definition, compared by tag."""

    def __init__(self, name: str):
        self.name = name
        self.fields: list[tuple[str, GuestType]] = []
        self.offsets: dict[str, int] = {}
        self.size = 0
        self.align = 1
        self.complete = False
        self.opaque = False

    def define(self, fields: list[tuple[str, "GuestType"]]) -> None:
        names = [n for n, _ in fields]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate field in struct {self.name}")
        offset = 0
        align = 1
        offsets = {}
        for fname, fty in fields:
            a = alignof(fty)
            offset = (offset + a - 1) // a * a
            offsets[fname] = offset
            offset += sizeof(fty)
            align = max(align, a)
        self.fields = list(fields)
        self.offsets = offsets
        self.align = align
        self.size = (offset + align - 1) // align * align
        self.complete = True

    def field_type(self, name: str) -> "GuestType | None":
        for fname, fty in self.fields:
            if fname == name:
                return fty
        return None

    # struct tags live in one global namespace, so the tag identifies the type
    def __eq__(self, other) -> bool:
        return isinstance(other, StructDef) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("struct", self.name))

    def __repr__(self) -> str:
        return f"<struct {self.name}>"


@dataclass(frozen=True)
class GuestType:
    kind: str
    unsigned: bool = False
    elem: GuestType | None = None  # pointer target, array element, function return
    length: int | None = None
    params: tuple[GuestType, ...] = ()
    variadic: bool = False
    struct: StructDef | None = field(default=None, compare=True)

    # -- constructors -------------------------------------------------
    def pointer_to(self) -> GuestType:
        return GuestType(POINTER, elem=self)

    def array_of(self, n: int) -> GuestType:
        return GuestType(ARRAY, elem=self, length=n)

    # -- predicates ---------------------------------------------------
    @property
    def is_integer(self) -> bool:
        return self.kind in INTEGER_KINDS

    @property
    def is_arithmetic(self) -> bool:
        return self.kind in INTEGER_KINDS or self.kind == DOUBLE

    @property
    def is_scalar(self) -> bool:
        return self.kind in SCALAR_KINDS

    @property
    def is_pointer(self) -> bool:
        return self.kind == POINTER

    @property
    def is_function_pointer(self) -> bool:
        return self.kind == POINTER and self.elem is not None and self.elem.kind == FUNCTION

    @property
    def is_void_pointer(self) -> bool:
        return self.kind == POINTER and self.elem is not None and self.elem.kind == VOID

    def __str__(self) -> str:
        return render_type(self)


VOID_T = GuestType(VOID)
CHAR_T = GuestType(CHAR)
INT_T = GuestType(INT)
UINT_T = GuestType(INT, unsigned=True)
LONG_T = GuestType(LONG)
ULONG_T = GuestType(LONG, unsigned=True)
DOUBLE_T = GuestType(DOUBLE)
VALIST_T = GuestType(VALIST)
SIZE_T = ULONG_T
VOID_PTR = VOID_T.pointer_to()
CHAR_PTR = CHAR_T.pointer_to()


def function_type(ret: GuestType, params, variadic: bool = False) -> GuestType:
    return GuestType(FUNCTION, elem=ret, params=tuple(params), variadic=variadic)


def sizeof(ty: GuestType) -> int:
    if ty.kind == ARRAY:
        return sizeof(ty.elem) * (ty.length or 0)
    if ty.kind == STRUCT:
        return ty.struct.size
    return _SIZES[ty.kind]


def alignof(ty: GuestType) -> int:
    if ty.kind == ARRAY:
        return alignof(ty.elem)
    if ty.kind == STRUCT:
        return ty.struct.align
    return min(_SIZES[ty.kind], 8)


# Opaque runtime type descriptor produced by type(); guest code only passes pointers to it.
TYPE_DEF = StructDef("Type")
TYPE_DEF.define([])
TYPE_DEF.opaque = True
TYPE_T = GuestType(STRUCT, struct=TYPE_DEF)

FILE_DEF = StructDef("FILE")
FILE_DEF.define([("fd", INT_T)])
FILE_T = GuestType(STRUCT, struct=FILE_DEF)


def storage_class(ty: GuestType) -> str:
    """The cell class a scalar is stored as; loads/stores must agree on it."""
    if ty.kind == CHAR:
        return "i8"
    if ty.kind == INT:
        return "i32"
    if ty.kind == LONG:
        return "i64"
    if ty.kind == DOUBLE:
        return "f64"
    if ty.kind == POINTER:
        return "ptr"
    if ty.kind == VALIST:
        return "va"
    raise TypeError(f"{ty} has no scalar storage class")


_BITS = {CHAR: 8, INT: 32, LONG: 64}


def wrap_int(ty: GuestType, value: int) -> int:
    """Two's-complement wraparound to the width and signedness of ``ty``."""
    bits = _BITS[ty.kind]
    value &= (1 << bits) - 1
    if not ty.unsigned and value >> (bits - 1):
        value -= 1 << bits
    return value


def int_range(ty: GuestType) -> tuple[int, int]:
    bits = _BITS[ty.kind]
    if ty.unsigned:
        return 0, (1 << bits) - 1
    return -(1 << (bits - 1)), (1 << (bits - 1)) - 1


class Layout:
    """Flattened scalar cells of one element of a type: (byte offset, scalar type)."""

    __slots__ = ("size", "offsets", "types", "classes", "index", "ncells", "uniform")

    def __init__(self, ty: GuestType):
        cells: list[tuple[int, GuestType]] = []
        _collect_cells(ty, 0, cells)
        self.size = sizeof(ty)
        self.offsets = tuple(o for o, _ in cells)
        self.types = tuple(t for _, t in cells)
        self.classes = tuple(storage_class(t) for t in self.types)
        self.index = {o: i for i, o in enumerate(self.offsets)}
        self.ncells = len(cells)
        # single scalar filling the whole element: offset arithmetic is a divmod
        self.uniform = self.ncells == 1 and sizeof(self.types[0]) == self.size


def _collect_cells(ty: GuestType, base: int, out: list) -> None:
    if ty.is_scalar:
        out.append((base, ty))
    elif ty.kind == ARRAY:
        step = sizeof(ty.elem)
        for i in range(ty.length or 0):
            _collect_cells(ty.elem, base + i * step, out)
    elif ty.kind == STRUCT:
        for fname, fty in ty.struct.fields:
            _collect_cells(fty, base + ty.struct.offsets[fname], out)


_LAYOUTS: dict = {}


def layout_of(ty: GuestType) -> Layout:
    # struct defs compare by tag, yet separate programs may reuse a tag with
    # different fields, so cached layouts are checked against the def identity
    inner = ty
    while inner.kind == ARRAY:
        inner = inner.elem
    owner = inner.struct if inner.kind == STRUCT else None
    hit = _LAYOUTS.get(ty)
    if hit is not None and hit[0] is owner:
        return hit[1]
    lay = Layout(ty)
    _LAYOUTS[ty] = (owner, lay)
    return lay


def zero_value(ty: GuestType):
    if ty.kind == DOUBLE:
        return 0.0
    if ty.kind == POINTER:
        from .runtime.memory import NULL

        return NULL
    if ty.kind == VALIST:
        return None
    return 0


def same_shape(a: GuestType, b: GuestType) -> bool:
    """Structural type equality that tolerates distinct-but-identical struct defs."""
    if a.kind != b.kind or a.unsigned != b.unsigned or a.length != b.length or a.variadic != b.variadic:
        return False
    if a.kind == STRUCT:
        return a.struct == b.struct
    if (a.elem is None) != (b.elem is None):
        return False
    if a.elem is not None and not same_shape(a.elem, b.elem):
        return False
    if len(a.params) != len(b.params):
        return False
    return all(same_shape(x, y) for x, y in zip(a.params, b.params))


def base_name(ty: GuestType) -> str:
    if ty.kind == STRUCT:
        if ty.struct is TYPE_DEF:
            return "Type"
        if ty.struct is FILE_DEF:
            return "FILE"
        return f"struct {ty.struct.name}"
    if ty.kind == VALIST:
        return "va_list"
    if ty.kind == LONG and ty.unsigned:
        return "unsigned long"
    if ty.kind == INT and ty.unsigned:
        return "unsigned"
    if ty.kind == CHAR and ty.unsigned:
        return "unsigned char"
    return ty.kind


def render_decl(ty: GuestType, name: str = "") -> str:
    """Render a C declaration of ``name`` with type ``ty`` (inside-out declarator)."""
    inner = name
    t = ty
    while True:
        if t.kind == POINTER:
            inner = f"*{inner}"
            t = t.elem
            if t.kind in (ARRAY, FUNCTION):
                inner = f"({inner})"
        elif t.kind == ARRAY:
            inner = f"{inner}[{'' if t.length is None else t.length}]"
            t = t.elem
        elif t.kind == FUNCTION:
            ps = [render_decl(p) for p in t.params]
            if t.variadic:
                ps.append("...")
            inner = f"{inner}({', '.join(ps) if ps else 'void'})"
            t = t.elem
        else:
            break
    base = base_name(t)
    return f"{base} {inner}".rstrip() if inner else base


def render_type(ty: GuestType) -> str:
    return render_decl(ty, "")
