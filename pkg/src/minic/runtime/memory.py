"""Managed guest memory.

Every guest allocation is a :class:`ManagedObject`; guest code reaches memory
only through :class:`GuestPointer` values (pointee + byte offset). Loads and
stores check liveness, bounds and element typing before touching a payload.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from ..diagnostics import DiagnosticKind as K
from ..diagnostics import RuntimeFault
from ..types import (
    FUNCTION,
    STRUCT,
    GuestType,
    Layout,
    layout_of,
    sizeof,
    storage_class,
    zero_value,
)

DEFAULT_MAX_ALLOC = 1 << 30


class LocationKind(enum.IntEnum):
    INVALID = 0
    AUTOMATIC = 1
    DYNAMIC = 2
    STATIC = 3


class ManagedObject:
    __slots__ = ("oid", "elem_type", "count", "byte_size", "location", "layout", "cells", "meta", "label")

    def __init__(self, oid, elem_type, count, byte_size, location, meta=None, label=None):
        self.oid = oid
        self.elem_type: GuestType | None = elem_type
        self.count = count
        self.byte_size = byte_size
        self.location = location
        self.layout: Layout | None = layout_of(elem_type) if _has_cells(elem_type) else None
        # flat cell index -> value; absent cells read as zero
        self.cells: dict = {}
        self.meta = meta
        self.label = label

    @property
    def untyped(self) -> bool:
        return self.elem_type is None

    @property
    def is_function(self) -> bool:
        return self.elem_type is not None and self.elem_type.kind == FUNCTION

    def __repr__(self) -> str:
        ty = "untyped" if self.elem_type is None else str(self.elem_type)
        return f"<obj#{self.oid} {ty} x{self.count} {self.byte_size}B {self.location.name}>"


def _has_cells(ty: GuestType | None) -> bool:
    return ty is not None and ty.kind != FUNCTION and not (ty.kind == STRUCT and ty.struct.opaque)


class GuestPointer:
    __slots__ = ("pointee", "offset")

    def __init__(self, pointee: ManagedObject | None, offset: int = 0):
        self.pointee = pointee
        self.offset = offset

    @property
    def is_null(self) -> bool:
        return self.pointee is None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GuestPointer)
            and self.pointee is other.pointee
            and self.offset == other.offset
        )

    def __hash__(self) -> int:
        return hash((id(self.pointee), self.offset))

    def __bool__(self) -> bool:
        return self.pointee is not None

    def __repr__(self) -> str:
        if self.pointee is None:
            return "NULL"
        return f"&obj#{self.pointee.oid}+{self.offset}"


NULL = GuestPointer(None, 0)


@dataclass
class AggValue:
    """A struct value in flight (assignment, argument, return)."""

    ty: GuestType
    cells: dict[int, object] = field(default_factory=dict)  # relative offset -> value


@dataclass
class Frame:
    name: str
    fixed_param_count: int = 0
    slots: list = field(default_factory=list)
    argument_objects: list = field(default_factory=list)
    varargs: list = field(default_factory=list)
    extra: list = field(default_factory=list)
    ret: object = None

    @property
    def locals(self) -> list[ManagedObject]:
        return [o for o in self.slots if o is not None] + self.extra


@dataclass
class MemoryStats:
    loads: int = 0
    stores: int = 0
    rejected: int = 0
    out_of_extent: int = 0
    extent_violations: int = 0


class Memory:
    """Owner of all guest objects of one interpreter instance."""

    def __init__(self, max_alloc: int = DEFAULT_MAX_ALLOC):
        self._ids = itertools.count(1)
        self.max_alloc = max_alloc
        self.stats = MemoryStats()

    # -- allocation ----------------------------------------------------
    def allocate(self, elem_type: GuestType, count: int, loc: LocationKind, *, meta=None, label=None) -> GuestPointer:
        if count < 1:
            raise ValueError("allocate requires count >= 1")
        if loc == LocationKind.INVALID:
            raise ValueError("cannot allocate INVALID memory")
        size = sizeof(elem_type) * count
        if size > self.max_alloc:
            raise RuntimeFault(K.InternalLimit, f"allocation of {size} bytes exceeds the {self.max_alloc} byte cap")
        obj = ManagedObject(next(self._ids), elem_type, count, size, loc, meta=meta, label=label)
        return GuestPointer(obj, 0)

    def allocate_untyped(self, nbytes: int, loc: LocationKind = LocationKind.DYNAMIC) -> GuestPointer:
        """A byte region without element type (malloc); typed by its first store."""
        if nbytes < 0 or nbytes > self.max_alloc:
            raise RuntimeFault(K.InternalLimit, f"allocation of {nbytes} bytes exceeds the {self.max_alloc} byte cap")
        obj = ManagedObject(next(self._ids), None, 0, nbytes, loc)
        return GuestPointer(obj, 0)

    def adopt_type(self, obj: ManagedObject, elem_type: GuestType) -> None:
        """Lock an untyped region to ``elem_type``; byteSize is kept as allocated."""
        if obj.elem_type is not None:
            return
        obj.elem_type = elem_type
        obj.layout = layout_of(elem_type)
        obj.count = obj.byte_size // max(obj.layout.size, 1)

    # -- lifetime ------------------------------------------------------
    def free_object(self, p: GuestPointer) -> None:
        obj = p.pointee
        if obj is None:
            return
        if obj.location == LocationKind.INVALID:
            raise RuntimeFault(K.InvalidFree, f"double free of object #{obj.oid}")
        if obj.location != LocationKind.DYNAMIC:
            raise RuntimeFault(K.InvalidFree, f"free of {obj.location.name} object #{obj.oid}")
        if p.offset != 0:
            raise RuntimeFault(K.InvalidFree, f"free of interior pointer (offset {p.offset}) into object #{obj.oid}")
        self.invalidate(obj)

    @staticmethod
    def invalidate(obj: ManagedObject) -> None:
        if obj.location == LocationKind.STATIC:
            return
        obj.location = LocationKind.INVALID
        obj.cells = {}

    def end_scope(self, frame: Frame) -> None:
        for obj in frame.slots:
            if obj is not None and obj.location == LocationKind.AUTOMATIC:
                self.invalidate(obj)
        for obj in itertools.chain(frame.argument_objects, frame.varargs, frame.extra):
            if obj.location == LocationKind.AUTOMATIC:
                self.invalidate(obj)

    # -- pointer arithmetic --------------------------------------------
    @staticmethod
    def offset_pointer(p: GuestPointer, delta: int) -> GuestPointer:
        if delta == 0:
            return p
        return GuestPointer(p.pointee, p.offset + delta)

    # -- checked access --------------------------------------------------
    def _check(self, obj: ManagedObject | None, offset: int, size: int, what: str) -> None:
        if obj is None:
            raise RuntimeFault(K.NullDereference, f"{what} through NULL pointer")
        if obj.location == LocationKind.INVALID:
            raise RuntimeFault(K.UseAfterFree, f"{what} of deallocated object #{obj.oid}")
        if obj.layout is None and obj.elem_type is not None:
            raise RuntimeFault(K.TypeViolation, f"{what} of {obj.elem_type} object #{obj.oid}")
        if offset < 0 or offset + size > obj.byte_size:
            self.stats.rejected += 1
            self.stats.out_of_extent += 1
            raise RuntimeFault(
                K.OutOfBounds,
                f"{what} of {size} bytes at offset {offset} of {obj.byte_size}-byte object #{obj.oid}",
            )

    def _cell(self, obj: ManagedObject, offset: int, ty: GuestType, what: str) -> int:
        lay = obj.layout
        if lay.uniform:
            q, r = divmod(offset, lay.size)
            if r == 0 and lay.classes[0] == storage_class(ty):
                return q
        else:
            q, r = divmod(offset, lay.size)
            i = lay.index.get(r)
            if i is not None and lay.classes[i] == storage_class(ty):
                return q * lay.ncells + i
        self.stats.rejected += 1
        raise RuntimeFault(
            K.TypeViolation,
            f"{what} of {ty} at offset {offset} of object #{obj.oid} holding {obj.elem_type}",
        )

    def _audit(self, obj: ManagedObject, idx: int) -> None:
        """Second line of defense: the cell must lie inside the payload extent.

        ``_check`` already rejects such accesses, so ``extent_violations``
        stays zero unless the primary check has a bug.
        """
        lay = obj.layout
        q, i = divmod(idx, lay.ncells)
        start = q * lay.size + lay.offsets[i]
        if idx < 0 or q >= obj.count or start + sizeof(lay.types[i]) > obj.byte_size:
            self.stats.extent_violations += 1
            raise RuntimeFault(K.OutOfBounds, f"cell {idx} outside the payload of object #{obj.oid}")

    def load(self, p: GuestPointer, ty: GuestType):
        return self.load_at(p.pointee, p.offset, ty)

    def load_at(self, obj: ManagedObject | None, offset: int, ty: GuestType):
        size = sizeof(ty)
        self._check(obj, offset, size, "read")
        self.stats.loads += 1
        if obj.elem_type is None:
            return zero_value(ty)
        idx = self._cell(obj, offset, ty, "read")
        self._audit(obj, idx)
        value = obj.cells.get(idx)
        if value is None:
            return zero_value(ty)
        return value

    def store(self, p: GuestPointer, ty: GuestType, value) -> None:
        self.store_at(p.pointee, p.offset, ty, value)

    def store_at(self, obj: ManagedObject | None, offset: int, ty: GuestType, value) -> None:
        size = sizeof(ty)
        if obj is not None and obj.is_function:
            raise RuntimeFault(K.TypeViolation, f"write into function object #{obj.oid}")
        self._check(obj, offset, size, "write")
        if obj.elem_type is None:
            self.adopt_type(obj, ty)
        idx = self._cell(obj, offset, ty, "write")
        self._audit(obj, idx)
        self.stats.stores += 1
        obj.cells[idx] = value

    # -- aggregates ------------------------------------------------------
    def _region_cells(self, obj: ManagedObject, offset: int, nbytes: int, what: str):
        """(flat index, relative offset, scalar type) of every cell in a region.

        Cells must lie wholly inside the region.
        """
        lay = obj.layout
        end = offset + nbytes
        start = self._cell_covering(obj, offset)
        if start is not None and start < offset:
            raise RuntimeFault(K.TypeViolation, f"{what} splits a cell of object #{obj.oid}")
        out = []
        q = offset // lay.size
        while q * lay.size < end and q < obj.count:
            base = q * lay.size
            for i, (o, t) in enumerate(zip(lay.offsets, lay.types)):
                c = base + o
                if c < offset:
                    continue
                if c >= end:
                    break
                if c + sizeof(t) > end:
                    raise RuntimeFault(K.TypeViolation, f"{what} splits a {t} cell of object #{obj.oid}")
                out.append((q * lay.ncells + i, c - offset, t))
            q += 1
        return out

    @staticmethod
    def _cell_covering(obj: ManagedObject, offset: int) -> int | None:
        lay = obj.layout
        q, r = divmod(offset, lay.size)
        for o, t in zip(lay.offsets, lay.types):
            if o <= r < o + sizeof(t):
                return q * lay.size + o
        return None

    def load_agg(self, p: GuestPointer, ty: GuestType) -> AggValue:
        obj, offset = p.pointee, p.offset
        size = sizeof(ty)
        self._check(obj, offset, size, "read")
        self.stats.loads += 1
        want = layout_of(ty)
        val = AggValue(ty)
        if obj.elem_type is None:
            return val
        for rel, cty in zip(want.offsets, want.types):
            idx = self._cell(obj, offset + rel, cty, "read")
            self._audit(obj, idx)
            v = obj.cells.get(idx)
            if v is not None:
                val.cells[rel] = v
        return val

    def store_agg(self, p: GuestPointer, ty: GuestType, val: AggValue) -> None:
        obj, offset = p.pointee, p.offset
        size = sizeof(ty)
        if obj is not None and obj.is_function:
            raise RuntimeFault(K.TypeViolation, f"write into function object #{obj.oid}")
        self._check(obj, offset, size, "write")
        if obj.elem_type is None:
            self.adopt_type(obj, ty)
        want = layout_of(ty)
        idxs = [self._cell(obj, offset + rel, cty, "write") for rel, cty in zip(want.offsets, want.types)]
        for idx in idxs:
            self._audit(obj, idx)
        self.stats.stores += 1
        for idx, rel in zip(idxs, want.offsets):
            v = val.cells.get(rel)
            if v is None:
                obj.cells.pop(idx, None)
            else:
                obj.cells[idx] = v

    def copy_region(self, dst: GuestPointer, src: GuestPointer, nbytes: int) -> None:
        """Typed memmove of ``nbytes``: every cell is copied whole or the call fails.

        Nothing is written unless the entire copy is legal.
        """
        if nbytes <= 0:
            return
        so, do = src.pointee, dst.pointee
        if do is not None and do.is_function:
            raise RuntimeFault(K.TypeViolation, "copy into function object")
        self._check(so, src.offset, nbytes, "read")
        self._check(do, dst.offset, nbytes, "write")
        if so.elem_type is None:
            # never-stored source: destination cells in range become zero
            if do.elem_type is None:
                return
            plan = [(idx, None) for idx, _, _ in self._region_cells(do, dst.offset, nbytes, "copy")]
        else:
            cells = self._region_cells(so, src.offset, nbytes, "copy")
            if do.elem_type is None:
                esz = so.layout.size
                if (dst.offset - src.offset) % esz:
                    raise RuntimeFault(K.TypeViolation, "copy would misalign untyped destination")
                self.adopt_type(do, so.elem_type)
            dcells = self._region_cells(do, dst.offset, nbytes, "copy")
            if [(r, storage_class(t)) for _, r, t in cells] != [(r, storage_class(t)) for _, r, t in dcells]:
                raise RuntimeFault(K.TypeViolation, "copy between incompatible layouts")
            plan = [(d[0], so.cells.get(s[0])) for s, d in zip(cells, dcells)]
        for idx, _ in plan:
            self._audit(do, idx)
        self.stats.loads += 1
        self.stats.stores += 1
        for idx, v in plan:
            if v is None:
                do.cells.pop(idx, None)
            else:
                do.cells[idx] = v

    def fill_region(self, dst: GuestPointer, byte: int, nbytes: int) -> None:
        """memset: char cells take the byte; wider cells accept only zero."""
        if nbytes <= 0:
            return
        obj = dst.pointee
        if obj is not None and obj.is_function:
            raise RuntimeFault(K.TypeViolation, "memset of function object")
        self._check(obj, dst.offset, nbytes, "write")
        if obj.elem_type is None:
            if byte == 0:
                return
            from ..types import CHAR_T

            self.adopt_type(obj, CHAR_T)
        cells = self._region_cells(obj, dst.offset, nbytes, "memset")
        value = byte & 0xFF
        if value >= 0x80:
            value -= 0x100
        if value != 0 and any(storage_class(t) != "i8" for _, _, t in cells):
            raise RuntimeFault(K.TypeViolation, "non-zero memset of non-char cells")
        for idx, _, _ in cells:
            self._audit(obj, idx)
        self.stats.stores += 1
        for idx, _, t in cells:
            if value == 0:
                obj.cells.pop(idx, None)
            else:
                obj.cells[idx] = value
