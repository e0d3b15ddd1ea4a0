"""Acceptance criteria 1-11. Each test carries ``@pytest.mark.criterion(n)``.

``pytest`` prints one PASS/FAIL line per criterion in its terminal summary
(see conftest.py); running this file directly does the same.
"""
from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest
from helpers import EINVAL, Host, main_body, run

from minic.cli import check_one
from minic.diagnostics import CompileError, DiagnosticKind
from minic.interpreter import compile_source, run_program
from minic.introspection import lower_type_operator
from minic.runtime import NULL, GuestPointer, LocationKind
from minic.types import ARRAY, CHAR_T, DOUBLE_T, INT_T, LONG_T, STRUCT, VOID_PTR, GuestType, StructDef, function_type

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# pinned tolerances
BOUNDS_TIME_LIMIT_S = 1.0
STRLEN_CASES = 1000
STRLEN_MAX_LEN = 64
QSORT_CASES = 500
QSORT_MAX_LEN = 64
FUZZ_PROGRAMS = 10_000
FUZZ_TIME_LIMIT_S = 600.0
FUZZ_MAX_STEPS = 20_000
FUZZ_MAX_DEPTH = 200
ALGEBRA_MIN_CASES = 10_000

LOCATION_PROBE = """\
const char *name(int l) {
    if (l == STATIC) return "STATIC";
    if (l == AUTOMATIC) return "AUTOMATIC";
    if (l == DYNAMIC) return "DYNAMIC";
    return "INVALID";
}

int a;

void func(void) {
    static int b;
    int c;
    int *d = malloc(sizeof(int) * 10);
    printf("%s %s %s %s", name(location(&a)), name(location(&b)), name(location(&c)), name(location(d)));
    free(d);
    printf(" %s\\n", name(location(d)));
}

int main(void) {
    func();
    return 0;
}
"""

BOUNDS = """\
int main(void) {
    int *arr = malloc(sizeof(int) * 10);
    int *ptr = &(arr[4]);
    printf("size_left=%ld\\n", _size_left(ptr));
    printf("size_right=%ld\\n", _size_right(ptr));
    return 0;
}
"""

AVG = """\
double avg(int count, ...) {
    if (count == 0 || count != count_varargs())
        return 0;
    int sum = 0;
    for (int i = 0; i < count; i++) {
        int *arg = get_vararg(i, type(&sum));
        if (arg == NULL) return 0;
        else sum += *arg;
    }
    return (double) sum / count;
}
"""


# -- 1 ----------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_bounds_worked_example(note):
    start = time.perf_counter()
    res = run(BOUNDS)
    elapsed = time.perf_counter() - start
    note(f"compile and run in {elapsed * 1000:.0f} ms")
    assert res.kind == "exit" and res.status == 0
    assert res.stdout == b"size_left=16\nsize_right=24\n"
    assert elapsed < BOUNDS_TIME_LIMIT_S


@pytest.mark.criterion(1)
def test_bounds_composites_agree():
    src = BOUNDS.replace("_size_left", "size_left").replace("_size_right", "size_right")
    assert run(src).stdout == b"size_left=16\nsize_right=24\n"


# -- 2 ----------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_location_lifecycle():
    res = run(LOCATION_PROBE)
    assert res.kind == "exit" and res.status == 0
    assert res.stdout == b"STATIC STATIC AUTOMATIC DYNAMIC INVALID\n"


# -- 3 ----------------------------------------------------------------------------

CATALOGUE = [
    ("err1_read_number", "abort", {"OutOfBounds"}),
    ("err2_use_after_free", "abort", {"UseAfterFree", "InvalidFree"}),
    ("err3_format_string", "abort", {"VarargViolation"}),
    ("err4_type_confusion", "abort", {"TypeViolation"}),
    ("err5_unterminated", "abort", {"OutOfBounds"}),
    ("fix1_read_number", "exit", None),
    ("fix2_use_after_free", "exit", None),
    ("fix3_format_string", "exit", None),
    ("fix4_type_confusion", "exit", None),
    ("fix5_unterminated", "exit", None),
]


@pytest.mark.criterion(3)
@pytest.mark.parametrize("stem,outcome,kinds", CATALOGUE, ids=[c[0] for c in CATALOGUE])
def test_error_catalogue(stem, outcome, kinds):
    c_file = CORPUS / f"{stem}.c"
    result = check_one(c_file, max_steps=5_000_000, max_depth=1000)
    assert result.ok, result.problems
    # the expectation files themselves must say what the criterion says
    text = c_file.with_suffix(".expect").read_text()
    if outcome == "abort":
        line = next(ln for ln in text.splitlines() if ln.startswith("outcome:"))
        assert set(line.split()[2].split("|")) == kinds
    else:
        assert "outcome: exit 0" in text


# -- 4 ----------------------------------------------------------------------------

READ_NUMBER_HARDENED = """\
int writes = 0;

void read_number(char *arr, size_t length) {
    int i = 0;
    if (length == 0) return;
    if (size_right(arr) < length) abort();
    int c = getchar();
    while (isdigit(c) && (i + 1) < length) {
        arr[i++] = c;
        writes++;
        c = getchar();
    }
    arr[i] = '\\0';
    writes++;
}

int main(void) {
    char buf[10];
    read_number(buf, -1);
    printf("%s %d\\n", buf, writes);
    return 0;
}
"""


@pytest.mark.criterion(4)
def test_oversized_length_rejected_before_write():
    res = run(READ_NUMBER_HARDENED, stdin=b"123")
    assert res.kind == "exit" and res.exit_code == 134
    assert res.diagnostic is None  # a guest abort, not a runtime diagnostic
    assert res.note and "abort" in res.note
    assert res.stdout == b""


@pytest.mark.criterion(4)
def test_oversized_length_fits_without_guard():
    # without the guard the short input fits, so only the size check exposes the bad length
    src = READ_NUMBER_HARDENED.replace("    if (size_right(arr) < length) abort();\n", "")
    res = run(src, stdin=b"123")
    assert res.kind == "exit" and res.status == 0
    assert res.stdout == b"123 4\n"


# -- 5 ----------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_avg_exact():
    assert run(main_body('printf("%.1f\\n", avg(3, 1, 2, 3));', AVG)).stdout == b"2.0\n"


@pytest.mark.criterion(5)
@pytest.mark.parametrize("call", ["avg(5, 1, 2)", "avg(2, 1, 2.5)", "avg(1, 1.0)", "avg(0)"])
def test_avg_rejects(call):
    res = run(main_body(f'double r = {call}; printf("%d\\n", r == 0);', AVG))
    assert res.kind == "exit" and res.stdout == b"1\n"


# -- 6 ----------------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_format_string_defense():
    res = run(main_body('int r = printf("%s %s", "a");\n    exit(r == -1 && errno == EINVAL ? 0 : 1);'))
    assert res.kind == "exit" and res.status == 0
    assert res.stdout == b""
    assert res.errno == EINVAL
    assert res.stats.out_of_extent == 0
    assert res.stats.extent_violations == 0


@pytest.mark.criterion(6)
def test_format_string_defense_host_call():
    h = Host()
    fmt = h.buffer(b"%s %s\0", LocationKind.STATIC)
    a = h.buffer(b"a\0", LocationKind.STATIC)
    r = h.call("printf", fmt, a, extra_types=[CHAR_T.pointer_to()])
    assert r == -1 and h.errno == EINVAL and h.stdout == b""
    assert h.mem.stats.out_of_extent == 0


# -- 7 ----------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_strlen_fuzz():
    rng = random.Random(7)
    h = Host()
    locs = [LocationKind.DYNAMIC, LocationKind.AUTOMATIC, LocationKind.STATIC]
    terminated = 0
    for case in range(STRLEN_CASES):
        n = rng.randint(1, STRLEN_MAX_LEN)
        if rng.random() < 0.5:
            data = bytes(rng.randint(1, 255) for _ in range(n))  # unterminated
        else:
            data = bytes(rng.choice([0, *range(1, 256)]) if rng.random() < 0.15 else rng.randint(1, 255) for _ in range(n))
        p = h.buffer(data, locs[case % 3])
        oracle = data.index(0) if 0 in data else n
        terminated += 0 in data
        h.errno = 0
        assert h.call("strlen", p) == oracle, (case, data)
        assert h.errno == 0
    assert 0 < terminated < STRLEN_CASES


@pytest.mark.criterion(7)
def test_strlen_illegal_pointers():
    h = Host()
    freed = h.buffer(b"abc\0")
    h.mem.free_object(freed)
    assert h.call("strlen", NULL) == 0
    assert h.call("strlen", freed) == 0


# -- 8 ----------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_gets_reads_line():
    src = main_body('char buf[10]; char *r = gets(buf); printf("[%s] %d\\n", buf, r == buf);')
    assert run(src, stdin=b"hello\n").stdout == b"[hello] 1\n"


@pytest.mark.criterion(8)
def test_gets_null():
    src = main_body('char *r = gets(NULL); printf("%d %d\\n", r == NULL, errno);')
    assert run(src, stdin=b"hello\n").stdout == b"1 22\n"


@pytest.mark.criterion(8)
def test_gets_overflow_consumes_line():
    src = main_body(
        'char buf[4]; buf[0] = 1; char *r = gets(buf);\n'
        '    printf("%d %d %d %c\\n", r == NULL, errno, buf[0], getchar());'
    )
    assert run(src, stdin=b"toolong\nX").stdout == b"1 22 0 X\n"


@pytest.mark.criterion(8)
def test_gets_s_reads_line():
    src = main_body('char buf[10]; char *r = gets_s(buf, 10); printf("[%s] %d\\n", buf, r == buf);')
    assert run(src, stdin=b"hi\n").stdout == b"[hi] 1\n"


@pytest.mark.criterion(8)
def test_gets_s_size_lie_rejected_before_read():
    src = main_body('char buf[4]; char *r = gets_s(buf, 10); printf("%d %d %c\\n", r == NULL, errno, getchar());')
    # the first input byte is still unread afterwards
    assert run(src, stdin=b"abcdefgh\n").stdout == b"1 22 a\n"


@pytest.mark.criterion(8)
def test_gets_s_zero_size():
    src = main_body('char buf[4]; char *r = gets_s(buf, 0); printf("%d %d %c\\n", r == NULL, errno, getchar());')
    assert run(src, stdin=b"z\n").stdout == b"1 22 z\n"


# -- 9 ----------------------------------------------------------------------------

QSORT_SRC = """\
int cmp_int(const void *a, const void *b) {
    const int *x = a;
    const int *y = b;
    return (*x > *y) - (*x < *y);
}

double cmp_wrong(const void *a, const void *b) { return 0; }

int main(void) { return 0; }
"""


@pytest.mark.criterion(9)
def test_qsort_random_arrays():
    rng = random.Random(9)
    h = Host(QSORT_SRC)
    cmp = h.fn("cmp_int")
    for case in range(QSORT_CASES):
        n = rng.randint(0, QSORT_MAX_LEN)
        values = [rng.randint(-1000, 1000) for _ in range(n)]
        p = h.ints(values)
        h.errno = 0
        h.call("qsort", p, n, 4, cmp)
        assert h.read_ints(p, n) == sorted(values), case
        assert h.errno == 0


@pytest.mark.criterion(9)
def test_qsort_wrong_signature_comparator():
    rng = random.Random(99)
    h = Host(QSORT_SRC)
    wrong = h.fn("cmp_wrong")
    for _ in range(20):
        values = [rng.randint(-50, 50) for _ in range(rng.randint(2, QSORT_MAX_LEN))]
        p = h.ints(values)
        before = dict(p.pointee.cells)
        h.errno = 0
        h.call("qsort", p, len(values), 4, wrong)
        assert p.pointee.cells == before  # byte-identical payload
        assert h.errno == EINVAL


@pytest.mark.criterion(9)
def test_qsort_guest_level_wrong_comparator():
    res = run((CORPUS / "qsort.c").read_text())
    assert res.kind == "exit"
    assert res.stdout.splitlines()[1:3] == [b"3 1 2 5 4 ", b"22"]


# -- 10 ---------------------------------------------------------------------------

RUNTIME_KINDS = {k.value for k in DiagnosticKind if not k.is_frontend}


@pytest.mark.criterion(10)
def test_host_safety_fuzz(note):
    from fuzzgen import programs

    start = time.perf_counter()
    outcomes: dict[str, int] = {}
    for i, src in enumerate(programs(seed=10, count=FUZZ_PROGRAMS)):
        try:
            program = compile_source(src, f"fuzz{i}.c")
        except CompileError as e:  # a generator bug, not a runtime result
            pytest.fail(f"program {i} did not compile: {e}")
        try:
            res = run_program(program, max_steps=FUZZ_MAX_STEPS, max_depth=FUZZ_MAX_DEPTH)
        except Exception as e:  # any escaping host exception is a host-level fault
            pytest.fail(f"program {i} raised {type(e).__name__}: {e}\n{src}")
        assert res.kind in ("exit", "aborted")
        if res.kind == "aborted":
            assert res.aborted_kind in RUNTIME_KINDS
            assert res.diagnostic.stack
        assert res.stats.extent_violations == 0, i
        key = res.aborted_kind if res.kind == "aborted" else "Exit"
        outcomes[key] = outcomes.get(key, 0) + 1
    elapsed = time.perf_counter() - start
    note(f"{FUZZ_PROGRAMS} programs in {elapsed:.0f}s: {dict(sorted(outcomes.items()))}")
    assert sum(outcomes.values()) == FUZZ_PROGRAMS
    assert elapsed <= FUZZ_TIME_LIMIT_S
    # the generator actually reaches every violation class
    for kind in ("Exit", "OutOfBounds", "UseAfterFree", "TypeViolation", "VarargViolation", "InternalLimit"):
        assert outcomes.get(kind, 0) > 0, kind


# -- 11 ---------------------------------------------------------------------------

ALGEBRA_SRC = """\
struct pair { int a; double b; };

int probe(int i, int which, ...) {
    int iv;
    double dv;
    char *sv;
    long lv;
    struct pair pv;
    void *viaget;
    void *viaraw;
    if (which == 0) {
        viaget = get_vararg(i, type(&iv));
        viaraw = try_cast(_get_vararg(i), type(&iv));
    } else if (which == 1) {
        viaget = get_vararg(i, type(&dv));
        viaraw = try_cast(_get_vararg(i), type(&dv));
    } else if (which == 2) {
        viaget = get_vararg(i, type(&sv));
        viaraw = try_cast(_get_vararg(i), type(&sv));
    } else if (which == 3) {
        viaget = get_vararg(i, type(&lv));
        viaraw = try_cast(_get_vararg(i), type(&lv));
    } else {
        viaget = get_vararg(i, type(&pv));
        viaraw = try_cast(_get_vararg(i), type(&pv));
    }
    if (viaget != viaraw) return -1;
    return viaget == NULL ? 0 : 1;
}

int fn_ii(int x) { return x; }
double fn_di(int x) { return x; }

int main(void) { return 0; }
"""


def _algebra_types():
    pair = StructDef("pair")
    pair.define([("a", INT_T), ("b", DOUBLE_T)])
    pair_t = GuestType(STRUCT, struct=pair)
    scalars = [CHAR_T, INT_T, LONG_T, DOUBLE_T, VOID_PTR, CHAR_T.pointer_to()]
    texprs = [lower_type_operator(t.pointer_to()) for t in scalars + [pair_t]]
    texprs.append(lower_type_operator(function_type(INT_T, [INT_T]).pointer_to()))
    texprs.append(lower_type_operator(function_type(DOUBLE_T, [INT_T]).pointer_to()))
    texprs.append(lower_type_operator(GuestType(ARRAY, elem=INT_T, length=3).pointer_to()))
    return scalars, pair_t, texprs


@pytest.mark.criterion(11)
def test_introspection_algebra(note):
    rng = random.Random(11)
    h = Host(ALGEBRA_SRC)
    intro, mem = h.intro, h.mem
    scalars, pair_t, texprs = _algebra_types()
    functions = [h.fn("fn_ii"), h.fn("fn_di")]
    cases = 0
    violations = []

    def check(cond, what):
        if not cond:
            violations.append(what)

    for _ in range(ALGEBRA_MIN_CASES // 2):
        # a fuzzed pointer: random object, location history and offset
        kind = rng.random()
        if kind < 0.1:
            base = functions[rng.randrange(2)]
        elif kind < 0.2:
            base = mem.allocate_untyped(rng.randint(0, 64))
        else:
            ty = rng.choice(scalars + [pair_t])
            loc = rng.choice([LocationKind.AUTOMATIC, LocationKind.DYNAMIC, LocationKind.STATIC])
            base = mem.allocate(ty, rng.randint(1, 10), loc)
            if rng.random() < 0.2 and loc != LocationKind.STATIC:
                mem.invalidate(base.pointee)
        size = base.pointee.byte_size
        p = NULL if rng.random() < 0.05 else GuestPointer(base.pointee, rng.randint(-size - 8, 2 * size + 8))

        sl, sr = intro.size_left(p), intro.size_right(p)
        g_sl, g_sr = h.call("size_left", p), h.call("size_right", p)
        check((sl, sr) == (g_sl, g_sr), ("host/guest composite mismatch", p))
        legal = p.pointee is not None and intro.location(p) != LocationKind.INVALID
        if sl >= 0 and sr >= 0:
            check(sl + sr == p.pointee.byte_size, ("size sum", p))
        in_bounds = legal and 0 <= p.offset <= p.pointee.byte_size
        check((sl == -1 and sr == -1) == (not in_bounds), ("-1 iff illegal or out of bounds", p))
        raw_left = intro._size_left(p) if p.pointee is not None else None
        expected_free = intro.location(p) == LocationKind.DYNAMIC and raw_left == 0
        check(bool(h.call("freeable", p)) == expected_free, ("freeable", p))
        check(intro.freeable(p) == expected_free, ("host freeable", p))
        for t in rng.sample(texprs, 3):
            once = intro.try_cast(p, t)
            check(once == p or once.is_null, ("try_cast codomain", p, t))
            check(intro.try_cast(once, t) == once, ("try_cast idempotence", p, t))
        check(intro.location(p) == intro.location(p) and intro.size_right(p) == sr, ("determinism", p))
        cases += 1

        # get_vararg = try_cast . _get_vararg, through a real guest frame
        pool = [(1, INT_T), (2.5, DOUBLE_T), (7, LONG_T)]
        args = [rng.choice(pool) for _ in range(rng.randint(0, 4))]
        i = rng.randint(-2, len(args) + 1)
        which = rng.randrange(5)
        r = h.call("probe", i, which, *[v for v, _ in args], extra_types=[t for _, t in args])
        check(r in (0, 1), ("get_vararg composite", i, which, args))
        want = 0 <= i < len(args) and [INT_T, DOUBLE_T, None, LONG_T, None][which] == args[i][1]
        check(r == int(want), ("get_vararg oracle", i, which, args))
        cases += 1

    note(f"{cases} cases checked")
    assert cases >= ALGEBRA_MIN_CASES
    assert not violations, violations[:5]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", *sys.argv[1:]]))
