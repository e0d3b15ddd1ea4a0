// The format asks for two strings but only one is passed.
struct xbuf {
    char data[64];
    int len;
};

void ins_char(struct xbuf *x, char c) {
    if (x->len < 63) x->data[x->len++] = c;
    x->data[x->len] = '\0';
}

void xbuf_format_converter(struct xbuf *xbuf, const char *fmt, va_list ap) {
    char *s = NULL;
    while (*fmt) {
        if (*fmt != '%') {
            ins_char(xbuf, *fmt);
        } else {
            fmt++;
            if (*fmt == 's') {
                s = va_arg(ap, char *);
                while (*s) ins_char(xbuf, *s++);
            }
        }
        fmt++;
    }
}

void format(struct xbuf *x, const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    xbuf_format_converter(x, fmt, ap);
    va_end(ap);
}

int main(void) {
    struct xbuf x;
    x.len = 0;
    format(&x, "%s %s", "a");
    printf("%s\n", x.data);
    return 0;
}
