from __future__ import annotations

import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.stateful import Bundle, RuleBasedStateMachine, invariant, rule

from helpers import main_body, out, run
from minic.diagnostics import DiagnosticKind as K
from minic.diagnostics import RuntimeFault
from minic.runtime import Frame, GuestPointer, LocationKind, Memory
from minic.types import CHAR_T, DOUBLE_T, INT_T, LONG_T

L = LocationKind


def fault(fn, *args) -> K:
    with pytest.raises(RuntimeFault) as info:
        fn(*args)
    return info.value.kind


@pytest.fixture
def mem():
    return Memory()


# -- allocate ------------------------------------------------------------------


def test_allocate_int_array(mem):
    p = mem.allocate(INT_T, 10, L.DYNAMIC)
    assert p.offset == 0
    assert p.pointee.byte_size == 40
    assert p.pointee.location == L.DYNAMIC


def test_allocate_automatic(mem):
    assert mem.allocate(CHAR_T, 1, L.AUTOMATIC).pointee.location == L.AUTOMATIC


def test_allocate_rejects_zero_count_and_invalid(mem):
    with pytest.raises(ValueError):
        mem.allocate(DOUBLE_T, 0, L.DYNAMIC)
    with pytest.raises(ValueError):
        mem.allocate(INT_T, 1, L.INVALID)


def test_allocate_size_overflow(mem):
    assert fault(mem.allocate, LONG_T, 2**62, L.DYNAMIC) == K.InternalLimit


def test_zero_initialized(mem):
    p = mem.allocate(INT_T, 3, L.STATIC)
    assert [mem.load(GuestPointer(p.pointee, 4 * i), INT_T) for i in range(3)] == [0, 0, 0]


def test_unique_ids(mem):
    ids = {mem.allocate(INT_T, 1, L.DYNAMIC).pointee.oid for _ in range(50)}
    assert len(ids) == 50


def test_malloc_zero_is_distinct_and_empty():
    text = out(
        main_body(
            """
    char *a = malloc(0);
    char *b = malloc(0);
    printf("%d %d %ld %d", a != NULL, a != b, size_right(a), freeable(a));
    free(a);
    free(b);
"""
        )
    )
    assert text == "1 1 0 1"
    res = run(main_body("char *a = malloc(0); return *a;"))
    assert res.aborted_kind == "OutOfBounds"


# -- free ----------------------------------------------------------------------


def test_free_invalidates(mem):
    p = mem.allocate(INT_T, 2, L.DYNAMIC)
    mem.free_object(p)
    assert p.pointee.location == L.INVALID


def test_double_free(mem):
    p = mem.allocate(INT_T, 2, L.DYNAMIC)
    mem.free_object(p)
    assert fault(mem.free_object, p) == K.InvalidFree


def test_free_null_is_noop(mem):
    mem.free_object(GuestPointer(None, 0))


@pytest.mark.parametrize("loc", [L.AUTOMATIC, L.STATIC])
def test_free_non_dynamic(mem, loc):
    assert fault(mem.free_object, mem.allocate(INT_T, 1, loc)) == K.InvalidFree


def test_free_interior(mem):
    p = mem.allocate(INT_T, 4, L.DYNAMIC)
    assert fault(mem.free_object, mem.offset_pointer(p, 4)) == K.InvalidFree
    assert p.pointee.location == L.DYNAMIC


# -- load / store ----------------------------------------------------------------


def test_load_element(mem):
    p = mem.allocate(INT_T, 10, L.DYNAMIC)
    for i in range(10):
        mem.store(mem.offset_pointer(p, 4 * i), INT_T, i * i)
    assert mem.load(mem.offset_pointer(p, 16), INT_T) == 16


def test_one_past_end(mem):
    p = mem.allocate(INT_T, 10, L.DYNAMIC)
    end = mem.offset_pointer(p, 40)
    assert fault(mem.load, end, INT_T) == K.OutOfBounds
    assert fault(mem.store, end, INT_T, 1) == K.OutOfBounds


def test_before_start(mem):
    p = mem.allocate(INT_T, 10, L.DYNAMIC)
    before = mem.offset_pointer(p, -4)
    assert before.offset == -4
    assert fault(mem.load, before, INT_T) == K.OutOfBounds


def test_out_of_extent_counter(mem):
    p = mem.allocate(CHAR_T, 4, L.DYNAMIC)
    before = mem.stats.out_of_extent
    fault(mem.load, mem.offset_pointer(p, 4), CHAR_T)
    assert mem.stats.out_of_extent == before + 1
    assert mem.stats.extent_violations == 0


def test_use_after_free(mem):
    p = mem.allocate(INT_T, 2, L.DYNAMIC)
    mem.free_object(p)
    assert fault(mem.load, p, INT_T) == K.UseAfterFree
    assert fault(mem.store, p, INT_T, 3) == K.UseAfterFree


def test_null(mem):
    assert fault(mem.load, GuestPointer(None, 0), INT_T) == K.NullDereference


def test_type_mismatch(mem):
    p = mem.allocate(DOUBLE_T, 2, L.DYNAMIC)
    assert fault(mem.store, p, INT_T, 1) == K.TypeViolation
    q = mem.allocate(INT_T, 4, L.DYNAMIC)
    assert fault(mem.load, mem.offset_pointer(q, 2), INT_T) == K.TypeViolation


def test_store_into_function_object():
    res = run(main_body("int (*f)(int) = g; int *p = (int *) f; *p = 1;", "int g(int x) { return x; }"))
    assert res.aborted_kind == "TypeViolation"


def test_untyped_region_first_store_types_it(mem):
    p = mem.allocate_untyped(16)
    assert mem.load(p, DOUBLE_T) == 0
    mem.store(p, INT_T, 5)
    assert p.pointee.elem_type == INT_T
    assert p.pointee.byte_size == 16
    assert mem.load(p, INT_T) == 5
    assert fault(mem.load, p, DOUBLE_T) == K.TypeViolation


def test_offset_pointer_identity(mem):
    p = mem.allocate(INT_T, 10, L.DYNAMIC)
    assert mem.offset_pointer(p, 0) is p
    assert mem.offset_pointer(p, 16).offset == 16


# -- scopes ------------------------------------------------------------------------


def test_end_scope(mem):
    frame = Frame("f")
    local = mem.allocate(INT_T, 1, L.AUTOMATIC).pointee
    static = mem.allocate(INT_T, 1, L.STATIC).pointee
    frame.slots = [local, static, None]
    mem.end_scope(frame)
    assert local.location == L.INVALID
    assert static.location == L.STATIC
    mem.end_scope(Frame("empty"))


def test_escaped_local_is_invalid():
    src = main_body(
        'int *p = f(); printf("%d %d", location(p), location(g()));',
        "int *f(void) { int c; return &c; }\nint *g(void) { static int b; return &b; }",
    )
    assert out(src) == "0 3"


def test_static_local_persists():
    src = main_body(
        'counter(); counter(); printf("%d", counter());',
        "int counter(void) { static int n; n++; return n; }",
    )
    assert out(src) == "3"


def test_escaped_local_read_aborts():
    res = run(main_body("int *p = f(); return *p;", "int *f(void) { int c = 1; return &c; }"))
    assert res.aborted_kind == "UseAfterFree"
    assert res.diagnostic.stack == ["main"]


# -- stateful model ----------------------------------------------------------------


class MemoryModel(RuleBasedStateMachine):
    """Random allocate/store/load/free sequences against a dictionary model."""

    objects = Bundle("objects")

    def __init__(self):
        super().__init__()
        self.mem = Memory()
        self.model: dict[int, dict] = {}

    @rule(target=objects, count=st.integers(1, 8), loc=st.sampled_from([L.AUTOMATIC, L.DYNAMIC, L.STATIC]))
    def allocate(self, count, loc):
        p = self.mem.allocate(INT_T, count, loc)
        self.model[p.pointee.oid] = {"count": count, "loc": loc, "values": [0] * count}
        return p

    @rule(p=objects, index=st.integers(-3, 10), value=st.integers(-(2**31), 2**31 - 1))
    def store(self, p, index, value):
        m = self.model[p.pointee.oid]
        q = self.mem.offset_pointer(p, 4 * index)
        if m["loc"] == L.INVALID:
            assert fault(self.mem.store, q, INT_T, value) == K.UseAfterFree
        elif not 0 <= index < m["count"]:
            assert fault(self.mem.store, q, INT_T, value) == K.OutOfBounds
        else:
            self.mem.store(q, INT_T, value)
            m["values"][index] = value
            assert self.mem.load(q, INT_T) == value

    @rule(p=objects, index=st.integers(-3, 10))
    def load(self, p, index):
        m = self.model[p.pointee.oid]
        q = self.mem.offset_pointer(p, 4 * index)
        if m["loc"] == L.INVALID:
            assert fault(self.mem.load, q, INT_T) == K.UseAfterFree
        elif not 0 <= index < m["count"]:
            assert fault(self.mem.load, q, INT_T) == K.OutOfBounds
        else:
            assert self.mem.load(q, INT_T) == m["values"][index]

    @rule(p=objects, delta=st.integers(-2, 2))
    def free(self, p, delta):
        m = self.model[p.pointee.oid]
        q = self.mem.offset_pointer(p, 4 * delta)
        if m["loc"] != L.DYNAMIC or delta != 0:
            assert fault(self.mem.free_object, q) == K.InvalidFree
        else:
            self.mem.free_object(q)
            m["loc"] = L.INVALID

    @rule(p=objects)
    def leave_scope(self, p):
        frame = Frame("f")
        frame.slots = [p.pointee]
        self.mem.end_scope(frame)
        m = self.model[p.pointee.oid]
        if m["loc"] == L.AUTOMATIC:
            m["loc"] = L.INVALID

    @invariant()
    def sizes_and_locations(self):
        assert self.mem.stats.extent_violations == 0

    @rule(p=objects)
    def check_object(self, p):
        obj = p.pointee
        m = self.model[obj.oid]
        assert obj.byte_size == obj.count * 4 == m["count"] * 4
        assert obj.location == m["loc"]


MemoryModel.TestCase.settings = settings(max_examples=200, stateful_step_count=40, deadline=None)
TestMemoryModel = MemoryModel.TestCase
