"""Random MiniC programs over indexing, free, vararg, function-pointer and libc constructs.

Every generated program is well-formed MiniC; what it does at run time is
deliberately unconstrained (out-of-bounds indices, dangling pointers,
mismatched varargs, wrong-signature calls, runaway loops).
"""
from __future__ import annotations

import random

PRELUDE = """\
struct rec { int k; char tag[4]; double w; };
int g[G_N];
char gs[GS_N];

int vsum(int n, ...) {
    va_list ap;
    va_start(ap, n);
    int s = 0;
    for (int i = 0; i < n; i++) s += va_arg(ap, int);
    va_end(ap);
    return s;
}

int vsafe(int n, ...) {
    int probe;
    int s = 0;
    if (n != count_varargs()) return -1;
    for (int i = 0; i < n; i++) {
        int *p = get_vararg(i, type(&probe));
        if (p == NULL) return -1;
        s += *p;
    }
    return s;
}

int inc(int x) { return x + 1; }
double half(int x) { return x / 2.0; }
int cmp(const void *x, const void *y) { return *(const int *) x - *(const int *) y; }
int *escape(void) { int local = 3; return &local; }
int depth(int n) { return n <= 0 ? 0 : 1 + depth(n - 1); }

int main(void) {
    int a[A_N];
    char c[C_N];
    struct rec r[2];
    int *hp = malloc(sizeof(int) * H_N);
    char *hs = malloc(HS_N);
    int (*fp)(int) = inc;
    int i = 0;
    int x = 0;
    long acc = 0;
"""

EPILOGUE = """\
    return (int) (acc & 63);
}
"""

_FMT_PIECES = ["%d", "%s", "%ld", "%c", "%f", "%x", "%u", "%%", "%5d", "%-3s", "%.2f", "%q", "[", "] ", "x"]
_STRINGS = ['"hi"', '"hello world"', '""', '"%s%s%d"', '"abc"']


class ProgramGenerator:
    def __init__(self, rng: random.Random):
        self.rng = rng

    # -- value pools ----------------------------------------------------------
    def idx(self, n: int) -> int:
        r = self.rng.random()
        if r < 0.9 and n > 0:
            return self.rng.randrange(n)
        return self.rng.choice([-2, -1, n, n + 1, n + 5])

    def int_expr(self) -> str:
        return self.rng.choice(["i", "x", str(self.rng.randint(-5, 40)), "(int) acc", "a[0]", "g[1]"])

    def pointer_expr(self) -> str:
        n = self.sizes
        return self.rng.choice(
            [
                f"a + {self.idx(n['A_N'])}",
                f"c + {self.idx(n['C_N'])}",
                f"g + {self.idx(n['G_N'])}",
                f"gs + {self.idx(n['GS_N'])}",
                f"hp + {self.idx(n['H_N'])}",
                f"hs + {self.idx(n['HS_N'])}",
                "r[0].tag",
                "&r[1].w",
                "&x",
                "NULL",
                "escape()",
                "(void *) fp",
                '"lit"',
            ]
        )

    def vararg(self) -> str:
        return self.rng.choice(["1", "2", "i", "3.5", '"s"', "a", "(long) 7", "'c'", "x"])

    # -- statements ------------------------------------------------------------
    def snippet(self) -> str:
        rng = self.rng
        n = self.sizes
        k = rng.randrange(22)
        if k == 0:
            return f"a[{self.idx(n['A_N'])}] = {self.int_expr()};"
        if k == 1:
            return f"acc += a[{self.idx(n['A_N'])}] + g[{self.idx(n['G_N'])}];"
        if k == 2:
            return f"c[{self.idx(n['C_N'])}] = 'z'; acc += gs[{self.idx(n['GS_N'])}];"
        if k == 3:
            return f"hp[{self.idx(n['H_N'])}] = {self.int_expr()}; acc += hp[{self.idx(n['H_N'])}];"
        if k == 4:
            return f"hs[{self.idx(n['HS_N'])}] = 'q'; acc += hs[{self.idx(n['HS_N'])}];"
        if k == 5:
            bound = n["A_N"] + rng.randint(-2, 3)
            return f"for (i = 0; i < {bound}; i++) a[i] = i * 3;"
        if k == 6:
            return f"{{ int *p = a + {rng.randint(-3, n['A_N'] + 3)}; acc += *p; }}"
        if k == 7:
            return rng.choice(["free(hp);", "free(hs);", "free(hs + 1);", "free(a);", "free(&x);", "free(NULL);"])
        if k == 8:
            return f"hp = realloc(hp, sizeof(int) * {rng.randint(0, 12)});"
        if k == 9:
            count = rng.randint(0, 4)
            args = [self.vararg() for _ in range(rng.randint(0, 4))]
            return f"acc += vsum({', '.join([str(count)] + args)});"
        if k == 10:
            count = rng.randint(0, 4)
            args = [self.vararg() for _ in range(rng.randint(0, 4))]
            return f"acc += vsafe({', '.join([str(count)] + args)});"
        if k == 11:
            return rng.choice(["fp = (int (*)(int)) half;", "fp = inc;", "fp = (int (*)(int)) cmp;"]) + " acc += fp(3);"
        if k == 12:
            return "{ int *e = escape(); acc += location(e); acc += *e; }"
        if k == 13:
            src = rng.choice(_STRINGS + ["c", "gs", "hs", "r[0].tag"])
            dst = rng.choice(["c", "gs", "hs", "r[1].tag", "(char *) a"])
            return f"strcpy({dst}, {src}); acc += strlen({dst});"
        if k == 14:
            fmt = "".join(rng.choice(_FMT_PIECES) for _ in range(rng.randint(0, 4)))
            args = [self.vararg() for _ in range(rng.randint(0, 3))]
            call = rng.choice(["printf", "snprintf", "sprintf"])
            head = {"printf": "", "snprintf": f"c, {rng.randint(0, n['C_N'] + 4)}, ", "sprintf": "hs, "}[call]
            return f"acc += {call}({head}{', '.join([repr_c(fmt)] + args)});"
        if k == 15:
            p = self.pointer_expr()
            return f"acc += size_right({p}) + size_left({p}) + location({p}) + freeable({p});"
        if k == 16:
            p = self.pointer_expr()
            t = rng.choice(["&x", "&acc", "hs", "fp", "r"])
            return f"if (try_cast({p}, type({t})) != NULL) acc++;"
        if k == 17:
            return f"r[{self.idx(2)}].w = 1.5; acc += r[{self.idx(2)}].tag[{self.idx(4)}];"
        if k == 18:
            return f"acc += 100 / (i - {rng.randint(0, 8)});"
        if k == 19:
            cmpf = rng.choice(["cmp", "(int (*)(const void *, const void *)) half"])
            return f"qsort(a, {rng.randint(0, n['A_N'] + 2)}, sizeof(int), {cmpf});"
        if k == 20:
            return rng.choice([f"while (x < {rng.choice([10, 100, 100000])}) x++;", f"acc += depth({rng.choice([5, 50, 5000])});"])
        m = rng.randint(0, 3 * n["C_N"])
        return rng.choice(
            [
                f"memset(c, 'x', {m});",
                f"memcpy(a, g, {m});",
                f"memcpy(hs, c, {m});",
                'acc += sscanf("12 word", "%d %s", &x, c);',
                'acc += strcmp(c, "zz") + atoi(c);',
                "acc += puts(c);",
            ]
        )

    def generate(self) -> str:
        rng = self.rng
        self.sizes = {
            "G_N": rng.randint(1, 8),
            "GS_N": rng.randint(1, 8),
            "A_N": rng.randint(1, 8),
            "C_N": rng.randint(1, 8),
            "H_N": rng.randint(1, 8),
            "HS_N": rng.randint(0, 8),
        }
        head = PRELUDE
        for key, val in self.sizes.items():
            head = head.replace(key, str(val))
        body = "".join(f"    {self.snippet()}\n" for _ in range(rng.randint(3, 12)))
        return head + body + EPILOGUE


def repr_c(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def programs(seed: int, count: int):
    rng = random.Random(seed)
    gen = ProgramGenerator(rng)
    for _ in range(count):
        yield gen.generate()
