// Specifiers are counted and typed against the actual arguments before any output.
struct xbuf {
    char data[64];
    int len;
};

void ins_char(struct xbuf *x, char c) {
    if (x->len < 63) x->data[x->len++] = c;
    x->data[x->len] = '\0';
}

int format(struct xbuf *xbuf, const char *fmt, ...) {
    char *probe;
    int needed = 0;
    const char *f = fmt;
    while (*f) {
        if (*f == '%' && f[1] == 's') needed++;
        f++;
    }
    if (needed != count_varargs()) return -1;
    int used;
    for (used = 0; used < needed; used++)
        if (get_vararg(used, type(&probe)) == NULL) return -1;
    used = 0;
    while (*fmt) {
        if (*fmt != '%') {
            ins_char(xbuf, *fmt);
        } else {
            fmt++;
            char **arg = get_vararg(used++, type(&probe));
            if (arg == NULL) return -1;
            char *s = *arg;
            while (*s) ins_char(xbuf, *s++);
        }
        fmt++;
    }
    return 0;
}

int main(void) {
    struct xbuf x;
    x.len = 0;
    x.data[0] = '\0';
    printf("%d [%s]\n", format(&x, "%s %s", "a"), x.data);
    printf("%d [%s]\n", format(&x, "%s %s", "a", 7), x.data);
    printf("%d [%s]\n", format(&x, "%s %s", "a", "b"), x.data);
    return 0;
}
