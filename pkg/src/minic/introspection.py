"""The introspection interface: object bounds, memory location, type, varargs.

The primitives here read runtime metadata straight from managed objects. The
guest-visible composites (``size_left``, ``size_right``, ``freeable``) are
written in MiniC in the prelude; :class:`Introspection` also provides host
versions of them, which the test-suite uses as an independent second route.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import DiagnosticKind as K
from .diagnostics import RuntimeFault
from .runtime.memory import NULL, GuestPointer, LocationKind, ManagedObject, Memory
from .types import (
    ARRAY,
    CHAR,
    DOUBLE,
    FUNCTION,
    INT,
    LONG,
    POINTER,
    STRUCT,
    VALIST,
    VOID,
    GuestType,
    StructDef,
    sizeof,
)


@dataclass(frozen=True)
class TypeExpr:
    """Run-time description of a declared type (a tree; never cyclic)."""

    kind: str
    children: tuple[TypeExpr, ...] = ()
    array_length: int | None = None
    variadic: bool = False
    unsigned: bool = False
    struct_name: str | None = None
    struct: StructDef | None = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        if self.kind == ARRAY:
            return self.children[0].size * (self.array_length or 0)
        if self.kind == STRUCT:
            return self.struct.size if self.struct is not None else 0
        return {CHAR: 1, INT: 4, LONG: 8, DOUBLE: 8, POINTER: 8, VALIST: 8}.get(self.kind, 1)

    @property
    def target(self) -> TypeExpr | None:
        return self.children[0] if self.kind in (POINTER, ARRAY) and self.children else None

    def __str__(self) -> str:
        if self.kind == POINTER:
            return f"{self.children[0]}*"
        if self.kind == ARRAY:
            return f"{self.children[0]}[{self.array_length}]"
        if self.kind == FUNCTION:
            ps = [str(c) for c in self.children[1:]] + (["..."] if self.variadic else [])
            return f"{self.children[0]}({', '.join(ps)})"
        if self.kind == STRUCT:
            return f"struct {self.struct_name}"
        return ("unsigned " if self.unsigned else "") + self.kind


def type_expr_of(ty: GuestType, _expand_struct: bool = True) -> TypeExpr:
    """Mirror a declared GuestType as a TypeExpr."""
    if ty.kind == POINTER:
        # pointed-to structs are referenced by name only, which keeps the tree finite
        return TypeExpr(POINTER, (type_expr_of(ty.elem, False),))
    if ty.kind == ARRAY:
        return TypeExpr(ARRAY, (type_expr_of(ty.elem, _expand_struct),), array_length=ty.length)
    if ty.kind == FUNCTION:
        kids = (type_expr_of(ty.elem, False),) + tuple(type_expr_of(p, False) for p in ty.params)
        return TypeExpr(FUNCTION, kids, variadic=ty.variadic)
    if ty.kind == STRUCT:
        kids = ()
        if _expand_struct and ty.struct.complete:
            kids = tuple(type_expr_of(fty, False) for _, fty in ty.struct.fields)
        return TypeExpr(STRUCT, kids, struct_name=ty.struct.name, struct=ty.struct)
    return TypeExpr(ty.kind, unsigned=ty.unsigned)


def lower_type_operator(ty: GuestType) -> TypeExpr:
    """The TypeExpr constant for ``type(e)`` where ``e`` has declared type ``ty``.

    A function pointer lowers to the function's signature: that is what a
    ``try_cast`` against it has to check.
    """
    if ty.kind == POINTER and ty.elem.kind == FUNCTION:
        return type_expr_of(ty.elem)
    return type_expr_of(ty)


def _signature_matches(fn_ty: GuestType, t: TypeExpr) -> bool:
    if len(t.children) != len(fn_ty.params) + 1 or t.variadic != fn_ty.variadic:
        return False
    kinds = [fn_ty.elem.kind] + [p.kind for p in fn_ty.params]
    return all(c.kind == k for c, k in zip(t.children, kinds))


def _scalar_cell(obj: ManagedObject, offset: int) -> GuestType | None:
    """Declared scalar type of the cell starting exactly at ``offset``."""
    lay = obj.layout
    if lay is None or lay.size == 0:
        return None
    q, r = divmod(offset, lay.size)
    if q < 0 or q >= obj.count:
        return None
    i = lay.index.get(r)
    return None if i is None else lay.types[i]


def _scalar_compatible(cell: GuestType, want: TypeExpr) -> bool:
    if cell.kind != want.kind:
        return False
    if cell.kind != POINTER:
        return True
    # pointer cells: pointee kinds must agree unless either side is void*
    a, b = cell.elem, want.children[0]
    if a.kind == VOID or b.kind == VOID:
        return True
    if a.kind != b.kind:
        return False
    if a.kind == STRUCT:
        return a.struct.name == b.struct_name
    if a.kind == FUNCTION:
        return _signature_matches(a, b)
    return True


class Introspection:
    """Introspection primitives and host-side composites over one Memory."""

    def __init__(self, memory: Memory):
        self.memory = memory

    # -- object bounds ------------------------------------------------------
    @staticmethod
    def _size_right(p: GuestPointer) -> int:
        if p.pointee is None:
            return -1
        return p.pointee.byte_size - p.offset

    @staticmethod
    def _size_left(p: GuestPointer) -> int:
        if p.pointee is None:
            return -1
        return p.offset

    def size_right(self, p: GuestPointer) -> int:
        if self.location(p) == LocationKind.INVALID:
            return -1
        if self._size_right(p) < 0 or self._size_left(p) < 0:
            return -1
        return self._size_right(p)

    def size_left(self, p: GuestPointer) -> int:
        if self.location(p) == LocationKind.INVALID:
            return -1
        if self._size_right(p) < 0 or self._size_left(p) < 0:
            return -1
        return self._size_left(p)

    # -- memory location -----------------------------------------------------
    @staticmethod
    def location(p: GuestPointer) -> LocationKind:
        if p.pointee is None:
            return LocationKind.INVALID
        return p.pointee.location

    def freeable(self, p: GuestPointer) -> bool:
        return self.location(p) == LocationKind.DYNAMIC and self._size_left(p) == 0

    # -- type -------------------------------------------------------------------
    def try_cast(self, p: GuestPointer, t: TypeExpr | None) -> GuestPointer:
        return p if t is not None and self.compatible(p, t) else NULL

    def compatible(self, p: GuestPointer, t: TypeExpr) -> bool:
        obj = p.pointee
        if obj is None or obj.location == LocationKind.INVALID:
            return False
        if t.kind == FUNCTION:
            if obj.is_function:
                return p.offset == 0 and _signature_matches(obj.elem_type, t)
            # a slot holding a function pointer: check the function it designates
            cell = None if obj.untyped else _scalar_cell(obj, p.offset)
            if cell is None or cell.kind != POINTER or self.size_right(p) < sizeof(cell):
                return False
            target = self.memory.load(p, cell)
            fobj = target.pointee
            return (
                fobj is not None
                and fobj.is_function
                and fobj.location != LocationKind.INVALID
                and target.offset == 0
                and _signature_matches(fobj.elem_type, t)
            )
        if t.kind != POINTER or not t.children:
            return False
        want = t.children[0]
        if obj.is_function or (obj.layout is None and not obj.untyped):
            return want.kind == FUNCTION and obj.is_function and p.offset == 0 and _signature_matches(obj.elem_type, want)
        room = self.size_right(p)
        if want.kind == FUNCTION:
            return False
        if want.kind == VOID:
            return room >= 0
        if want.kind == STRUCT:
            if obj.untyped:
                return False
            return (
                obj.elem_type.kind == STRUCT
                and obj.elem_type.struct is want.struct
                and p.offset % obj.layout.size == 0
                and room >= obj.layout.size
            )
        if want.kind == ARRAY:
            elem = want.children[0]
            n = want.array_length or 0
            if elem.kind in (ARRAY, STRUCT, FUNCTION, VOID):
                return False
            return self._scalar_ok(obj, p.offset, elem, room) and room >= n * elem.size
        if want.kind in (CHAR, INT, LONG, DOUBLE, POINTER, VALIST):
            return self._scalar_ok(obj, p.offset, want, room)
        return False

    @staticmethod
    def _scalar_ok(obj: ManagedObject, offset: int, want: TypeExpr, room: int) -> bool:
        if room < want.size:
            return False
        if obj.untyped:
            return offset % want.size == 0
        cell = _scalar_cell(obj, offset)
        return cell is not None and _scalar_compatible(cell, want)


@dataclass
class VarargsView:
    """The state va_start materializes: argument slots plus a cursor."""

    slots: list[ManagedObject]
    cursor: int = 0

    @property
    def count(self) -> int:
        return len(self.slots)

    def pointer(self, i: int) -> GuestPointer:
        if i < 0 or i >= len(self.slots):
            return NULL
        return GuestPointer(self.slots[i], 0)


def va_arg(intro: Introspection, view: VarargsView | None, declared: GuestType) -> GuestPointer:
    """Hardened va_arg: bounds-checks the cursor and type-checks the slot."""
    if view is None:
        raise RuntimeFault(K.VarargViolation, "va_arg on a va_list that was not started")
    if view.cursor >= view.count:
        raise RuntimeFault(
            K.VarargViolation,
            f"va_arg requested argument {view.cursor + 1} but only {view.count} variadic argument(s) were passed",
        )
    p = intro.try_cast(view.pointer(view.cursor), type_expr_of(declared.pointer_to()))
    if p.is_null:
        slot = view.slots[view.cursor]
        raise RuntimeFault(
            K.VarargViolation,
            f"va_arg argument {view.cursor + 1} has type {slot.elem_type}, not {declared}",
        )
    view.cursor += 1
    return p
