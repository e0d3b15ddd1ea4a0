/* Robust libc subset. Every function validates its arguments through the
 * introspection interface before touching memory, and reports bad input by
 * setting errno (and a sentinel return value) instead of faulting. */

int errno;

FILE __stdin_file = {0};
FILE __stdout_file = {1};
FILE __stderr_file = {2};
FILE *stdin = &__stdin_file;
FILE *stdout = &__stdout_file;
FILE *stderr = &__stderr_file;

/* -- introspection composites -------------------------------------------- */

long size_left(const void *ptr) {
    if (location(ptr) == INVALID) return -1;
    bool inBounds = _size_right(ptr) >= 0 && _size_left(ptr) >= 0;
    if (!inBounds) return -1;
    return _size_left(ptr);
}

long size_right(const void *ptr) {
    if (location(ptr) == INVALID) return -1;
    bool inBounds = _size_right(ptr) >= 0 && _size_left(ptr) >= 0;
    if (!inBounds) return -1;
    return _size_right(ptr);
}

bool freeable(const void *ptr) {
    return location(ptr) == DYNAMIC && _size_left(ptr) == 0;
}

/* a char can be read at s */
int __readable(const char *s) {
    return size_right(s) > 0 && try_cast(s, type(s)) != NULL;
}

/* room in bytes for a char run starting at s, or -1 */
long __char_room(const char *s) {
    if (try_cast(s, type(s)) == NULL) return -1;
    return size_right(s);
}

/* -- character classes ------------------------------------------------------ */

int isdigit(int c) { return c >= '0' && c <= '9'; }
int isspace(int c) { return c == ' ' || (c >= 9 && c <= 13); }
int isupper(int c) { return c >= 'A' && c <= 'Z'; }
int islower(int c) { return c >= 'a' && c <= 'z'; }
int isalpha(int c) { return isupper(c) || islower(c); }
int isalnum(int c) { return isalpha(c) || isdigit(c); }
int isxdigit(int c) { return isdigit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }
int isprint(int c) { return c >= 32 && c < 127; }
int toupper(int c) { return islower(c) ? c - 32 : c; }
int tolower(int c) { return isupper(c) ? c + 32 : c; }

int abs(int x) { return x < 0 ? -x : x; }
long labs(long x) { return x < 0 ? -x : x; }

/* -- strings ----------------------------------------------------------------- */

size_t strlen(const char *str) {
    size_t len = 0;
    while (size_right(str) > 0 && try_cast(str, type(str)) != NULL && *str != '\0') {
        len++;
        str++;
    }
    return len;
}

size_t strnlen(const char *str, size_t max) {
    size_t len = 0;
    while (len < max && __readable(str) && *str != '\0') {
        len++;
        str++;
    }
    return len;
}

char *strcpy(char *dst, const char *src) {
    char *d = dst;
    if (__char_room(dst) <= 0 || __char_room(src) <= 0) {
        errno = EINVAL;
        return dst;
    }
    while (__readable(d) && __readable(src)) {
        *d = *src;
        if (*src == '\0') return dst;
        d++;
        src++;
    }
    /* the source ran out of buffer without a terminator */
    if (__readable(d)) *d = '\0';
    return dst;
}

char *strncpy(char *dst, const char *src, size_t n) {
    char *d = dst;
    size_t i = 0;
    if (n == 0) return dst;
    if (__char_room(dst) <= 0 || __char_room(src) <= 0) {
        errno = EINVAL;
        return dst;
    }
    while (i < n && __readable(d) && __readable(src) && *src != '\0') {
        *d = *src;
        d++;
        src++;
        i++;
    }
    while (i < n && __readable(d)) {
        *d = '\0';
        d++;
        i++;
    }
    return dst;
}

char *strcat(char *dst, const char *src) {
    if (__char_room(dst) <= 0 || __char_room(src) <= 0) {
        errno = EINVAL;
        return dst;
    }
    size_t len = strlen(dst);
    char *end = dst + len;
    if (!__readable(end)) return dst;
    strcpy(end, src);
    return dst;
}

char *strncat(char *dst, const char *src, size_t n) {
    if (__char_room(dst) <= 0 || __char_room(src) <= 0) {
        errno = EINVAL;
        return dst;
    }
    char *d = dst + strlen(dst);
    size_t i = 0;
    while (i < n && __readable(d) && __readable(src) && *src != '\0') {
        *d = *src;
        d++;
        src++;
        i++;
    }
    if (__readable(d)) *d = '\0';
    return dst;
}

/* a buffer end reads as a terminator */
int __char_at(const char *s) {
    if (!__readable(s)) return 0;
    return *s & 255;
}

int strcmp(const char *a, const char *b) {
    if (__char_room(a) < 0 || __char_room(b) < 0) errno = EINVAL;
    while (1) {
        int ca = __char_at(a);
        int cb = __char_at(b);
        if (ca != cb) return ca < cb ? -1 : 1;
        if (ca == 0) return 0;
        a++;
        b++;
    }
    return 0;
}

int strncmp(const char *a, const char *b, size_t n) {
    size_t i = 0;
    if (__char_room(a) < 0 || __char_room(b) < 0) errno = EINVAL;
    while (i < n) {
        int ca = __char_at(a);
        int cb = __char_at(b);
        if (ca != cb) return ca < cb ? -1 : 1;
        if (ca == 0) return 0;
        a++;
        b++;
        i++;
    }
    return 0;
}

char *strchr(const char *s, int c) {
    if (__char_room(s) < 0) {
        errno = EINVAL;
        return NULL;
    }
    while (__readable(s)) {
        if (*s == (char) c) return (char *) s;
        if (*s == '\0') return NULL;
        s++;
    }
    return NULL;
}

char *strrchr(const char *s, int c) {
    char *found = NULL;
    if (__char_room(s) < 0) {
        errno = EINVAL;
        return NULL;
    }
    while (__readable(s)) {
        if (*s == (char) c) found = (char *) s;
        if (*s == '\0') break;
        s++;
    }
    return found;
}

char *strstr(const char *hay, const char *needle) {
    size_t n = strlen(needle);
    if (__char_room(hay) < 0 || __char_room(needle) < 0) {
        errno = EINVAL;
        return NULL;
    }
    while (__readable(hay)) {
        if (strncmp(hay, needle, n) == 0) return (char *) hay;
        if (*hay == '\0') break;
        hay++;
    }
    return NULL;
}

char *strdup(const char *s) {
    if (__char_room(s) < 0) {
        errno = EINVAL;
        return NULL;
    }
    size_t n = strlen(s);
    char *copy = malloc(n + 1);
    if (copy == NULL) return NULL;
    size_t i;
    for (i = 0; i < n; i++) copy[i] = s[i];
    copy[n] = '\0';
    return copy;
}

long strtol(const char *s, char **end, int base) {
    long value = 0;
    int neg = 0;
    int any = 0;
    if (__char_room(s) < 0 || (base != 0 && (base < 2 || base > 36))) {
        errno = EINVAL;
        return 0;
    }
    while (__readable(s) && isspace(*s)) s++;
    if (__readable(s) && (*s == '-' || *s == '+')) {
        neg = *s == '-';
        s++;
    }
    if (base == 0) base = 10;
    while (__readable(s)) {
        int c = *s;
        int d;
        if (isdigit(c)) d = c - '0';
        else if (islower(c)) d = c - 'a' + 10;
        else if (isupper(c)) d = c - 'A' + 10;
        else break;
        if (d >= base) break;
        value = value * base + d;
        any = 1;
        s++;
    }
    if (end != NULL && try_cast(end, type(end)) != NULL) *end = (char *) s;
    if (!any) return 0;
    return neg ? -value : value;
}

long atol(const char *s) {
    if (__char_room(s) < 0) {
        errno = EINVAL;
        return 0;
    }
    return strtol(s, NULL, 10);
}

int atoi(const char *s) {
    return (int) atol(s);
}

/* -- memory ------------------------------------------------------------------ */

void *malloc(size_t size) {
    void *p = __host_alloc(size, 0);
    if (p == NULL) errno = EINVAL;
    return p;
}

void *calloc(size_t nitems, size_t size) {
    if (size != 0 && nitems > SIZE_MAX / size) {
        errno = EINVAL;
        return NULL;
    }
    void *p = __host_alloc(nitems * size, 1);
    if (p == NULL) errno = EINVAL;
    return p;
}

void free(void *ptr) {
    if (ptr == NULL) return;
    if (!freeable(ptr)) {
        errno = EINVAL;
        return;
    }
    __host_free(ptr);
}

void *realloc(void *ptr, size_t size) {
    if (ptr == NULL) return malloc(size);
    if (!freeable(ptr)) {
        errno = EINVAL;
        return NULL;
    }
    void *fresh = malloc(size);
    if (fresh == NULL) return NULL;
    size_t old = size_right(ptr);
    size_t n = old < size ? old : size;
    if (__host_memmove(fresh, ptr, n) != 0) {
        __host_free(fresh);
        errno = EINVAL;
        return NULL;
    }
    __host_free(ptr);
    return fresh;
}

/* n bytes fit at p */
int __fits(const void *p, size_t n) {
    long room = size_right(p);
    return room >= 0 && n <= (size_t) room;
}

void *memcpy(void *dst, const void *src, size_t n) {
    if (n == 0) return dst;
    if (!__fits(dst, n) || !__fits(src, n) || __host_memmove(dst, src, n) != 0) errno = EINVAL;
    return dst;
}

void *memmove(void *dst, const void *src, size_t n) {
    return memcpy(dst, src, n);
}

void *memset(void *dst, int c, size_t n) {
    if (n == 0) return dst;
    if (!__fits(dst, n) || __host_memset(dst, c, n) != 0) errno = EINVAL;
    return dst;
}

/* -- character I/O ----------------------------------------------------------- */

int getchar(void) {
    return __host_getchar();
}

int putchar(int c) {
    return __host_write(1, c);
}

int __stream_fd(FILE *stream) {
    if (try_cast(stream, type(stream)) == NULL) return -1;
    int fd = stream->fd;
    if (fd < 0 || fd > 2) return -1;
    return fd;
}

int fputc(int c, FILE *stream) {
    int fd = __stream_fd(stream);
    if (fd < 1) {
        errno = EINVAL;
        return EOF;
    }
    return __host_write(fd, c);
}

int putc(int c, FILE *stream) {
    return fputc(c, stream);
}

int fgetc(FILE *stream) {
    if (__stream_fd(stream) != 0) {
        errno = EINVAL;
        return EOF;
    }
    return __host_getchar();
}

int getc(FILE *stream) {
    return fgetc(stream);
}

int __write_string(int fd, const char *s) {
    int n = 0;
    while (__readable(s) && *s != '\0') {
        __host_write(fd, *s);
        s++;
        n++;
    }
    return n;
}

int fputs(const char *s, FILE *stream) {
    int fd = __stream_fd(stream);
    if (fd < 1 || __char_room(s) < 0) {
        errno = EINVAL;
        return EOF;
    }
    __write_string(fd, s);
    return 0;
}

int puts(const char *s) {
    if (__char_room(s) < 0) {
        errno = EINVAL;
        return EOF;
    }
    int n = __write_string(1, s);
    __host_write(1, '\n');
    return n + 1;
}

char *gets_s(char *str, rsize_t n) {
    if (n == 0 || size_right(str) < (long) n || (long) n < 0 || try_cast(str, type(str)) == NULL) {
        errno = EINVAL;
        return NULL;
    }
    size_t i = 0;
    int c = __host_getchar();
    if (c == EOF) {
        str[0] = '\0';
        return NULL;
    }
    while (c != EOF && c != '\n') {
        if (i + 1 >= n) {
            /* the line does not fit: discard it */
            while (c != EOF && c != '\n') c = __host_getchar();
            str[0] = '\0';
            errno = EINVAL;
            return NULL;
        }
        str[i] = c;
        i++;
        c = __host_getchar();
    }
    str[i] = '\0';
    return str;
}

char *gets(char *str) {
    long size = size_right(str);
    return gets_s(str, size == -1 ? 0 : size);
}

char *fgets(char *str, int n, FILE *stream) {
    if (n <= 0 || size_right(str) < (long) n || try_cast(str, type(str)) == NULL || __stream_fd(stream) != 0) {
        errno = EINVAL;
        return NULL;
    }
    int i = 0;
    while (i + 1 < n) {
        int c = __host_getchar();
        if (c == EOF) break;
        str[i] = c;
        i++;
        if (c == '\n') break;
    }
    if (i == 0) return NULL;
    str[i] = '\0';
    return str;
}

/* -- formatted output ------------------------------------------------------ */

struct __out {
    char *buf;
    long cap;
    long len;
    int fd;
};

void __emit(struct __out *o, int c) {
    if (o->buf != NULL) {
        if (o->len < o->cap - 1) o->buf[o->len] = c;
    } else {
        __host_write(o->fd, c);
    }
    o->len++;
}

void __pad(struct __out *o, int count, int c) {
    while (count > 0) {
        __emit(o, c);
        count--;
    }
}

/* digits of v (most significant first) into tmp; returns the digit count */
int __digits(char *tmp, unsigned long v, int base, int upper) {
    char rev[32];
    int n = 0;
    if (v == 0) rev[n++] = '0';
    while (v != 0) {
        int d = v % base;
        rev[n++] = d < 10 ? '0' + d : (upper ? 'A' : 'a') + d - 10;
        v = v / base;
    }
    int i;
    for (i = 0; i < n; i++) tmp[i] = rev[n - 1 - i];
    return n;
}

void __emit_field(struct __out *o, char *text, int n, int sign, int width, int left, int zero) {
    int total = n + (sign != 0);
    if (!left && !zero) __pad(o, width - total, ' ');
    if (sign != 0) __emit(o, sign);
    if (!left && zero) __pad(o, width - total, '0');
    int i;
    for (i = 0; i < n; i++) __emit(o, text[i]);
    if (left) __pad(o, width - total, ' ');
}

/* one conversion: fields are parsed into spec[] = {width, precision, long, left, zero, plus, space} */
int __parse_spec(const char **pfmt, int *spec) {
    const char *f = *pfmt;
    int i;
    for (i = 0; i < 7; i++) spec[i] = 0;
    spec[1] = -1;
    while (__readable(f) && (*f == '-' || *f == '0' || *f == '+' || *f == ' ')) {
        if (*f == '-') spec[3] = 1;
        if (*f == '0') spec[4] = 1;
        if (*f == '+') spec[5] = 1;
        if (*f == ' ') spec[6] = 1;
        f++;
    }
    while (__readable(f) && isdigit(*f)) {
        if (spec[0] < 100000) spec[0] = spec[0] * 10 + (*f - '0');
        f++;
    }
    if (__readable(f) && *f == '.') {
        f++;
        spec[1] = 0;
        while (__readable(f) && isdigit(*f)) {
            if (spec[1] < 100000) spec[1] = spec[1] * 10 + (*f - '0');
            f++;
        }
    }
    if (__readable(f) && *f == 'l') {
        spec[2] = 1;
        f++;
    }
    *pfmt = f;
    if (!__readable(f)) return 0;
    return *f;
}

/* checks specifiers against the arguments; returns the count or -1 */
int __check_format(const char *fmt, va_list ap) {
    int spec[7];
    int nargs = __va_count(ap);
    int used = 0;
    int ival;
    long lval;
    double dval;
    char *sval;
    if (__char_room(fmt) <= 0) return -1;
    while (__readable(fmt) && *fmt != '\0') {
        if (*fmt != '%') {
            fmt++;
            continue;
        }
        fmt++;
        int conv = __parse_spec(&fmt, spec);
        if (conv == '%') {
            fmt++;
            continue;
        }
        if (used >= nargs) return -1;
        if (conv == 'd' || conv == 'i' || conv == 'u' || conv == 'x' || conv == 'X') {
            if (spec[2]) {
                if (__va_get(ap, used, type(&lval)) == NULL) return -1;
            } else {
                if (__va_get(ap, used, type(&ival)) == NULL) return -1;
            }
        } else if (conv == 'c') {
            if (spec[2] || __va_get(ap, used, type(&ival)) == NULL) return -1;
        } else if (conv == 'f') {
            if (__va_get(ap, used, type(&dval)) == NULL) return -1;
        } else if (conv == 's') {
            if (spec[2] || __va_get(ap, used, type(&sval)) == NULL) return -1;
        } else {
            return -1;
        }
        used++;
        fmt++;
    }
    if (used != nargs) return -1;
    return used;
}

/* formats into o; the format and the arguments must already be checked */
void __format(struct __out *o, const char *fmt, va_list ap) {
    int spec[7];
    int used = 0;
    char tmp[400];
    int ival;
    long lval;
    double dval;
    char *sval;
    while (__readable(fmt) && *fmt != '\0') {
        if (*fmt != '%') {
            __emit(o, *fmt);
            fmt++;
            continue;
        }
        fmt++;
        int conv = __parse_spec(&fmt, spec);
        fmt++;
        if (conv == '%') {
            __emit(o, '%');
            continue;
        }
        int width = spec[0];
        int left = spec[3];
        int zero = spec[4] && !left;
        if (conv == 'd' || conv == 'i' || conv == 'u' || conv == 'x' || conv == 'X') {
            long v;
            if (spec[2]) {
                long *lp = __va_get(ap, used, type(&lval));
                v = *lp;
            } else {
                int *ip = __va_get(ap, used, type(&ival));
                v = *ip;
            }
            int sign = 0;
            unsigned long mag;
            if (conv == 'd' || conv == 'i') {
                if (v < 0) {
                    sign = '-';
                    mag = -(unsigned long) v;
                } else {
                    mag = v;
                    if (spec[5]) sign = '+';
                    else if (spec[6]) sign = ' ';
                }
            } else if (spec[2]) {
                mag = (unsigned long) v;
            } else {
                mag = (unsigned) (int) v;
            }
            int n = __digits(tmp, mag, conv == 'x' || conv == 'X' ? 16 : 10, conv == 'X');
            __emit_field(o, tmp, n, sign, width, left, zero);
        } else if (conv == 'c') {
            int *cp = __va_get(ap, used, type(&ival));
            tmp[0] = *cp;
            __emit_field(o, tmp, 1, 0, width, left, 0);
        } else if (conv == 'f') {
            double *dp = __va_get(ap, used, type(&dval));
            double d = *dp;
            int prec = spec[1] < 0 ? 6 : spec[1];
            if (prec > 60) prec = 60;
            int sign = 0;
            if (d < 0) {
                sign = '-';
                d = -d;
            } else if (spec[5]) {
                sign = '+';
            } else if (spec[6]) {
                sign = ' ';
            }
            int n = __host_fmt_double(tmp, 400, d, prec);
            if (n > 400) n = 400;
            if (tmp[0] == '-') {
                /* negative zero or nan */
                __emit_field(o, tmp, n, 0, width, left, 0);
            } else {
                __emit_field(o, tmp, n, sign, width, left, zero && tmp[0] != 'i' && tmp[0] != 'n');
            }
        } else {
            char **pp = __va_get(ap, used, type(&sval));
            char *s = *pp;
            int n = 0;
            if (s == NULL) {
                s = "(null)";
            }
            while ((spec[1] < 0 || n < spec[1]) && __readable(s + n) && s[n] != '\0') n++;
            if (!left) __pad(o, width - n, ' ');
            int i;
            for (i = 0; i < n; i++) __emit(o, s[i]);
            if (left) __pad(o, width - n, ' ');
        }
        used++;
    }
}

int __vformat(char *buf, long cap, int fd, const char *fmt, va_list ap) {
    struct __out o;
    if (__check_format(fmt, ap) < 0) {
        errno = EINVAL;
        return -1;
    }
    o.buf = buf;
    o.cap = cap;
    o.len = 0;
    o.fd = fd;
    __format(&o, fmt, ap);
    if (buf != NULL && cap > 0) buf[o.len < cap - 1 ? o.len : cap - 1] = '\0';
    return (int) o.len;
}

int vfprintf(FILE *stream, const char *fmt, va_list ap) {
    int fd = __stream_fd(stream);
    if (fd < 1) {
        errno = EINVAL;
        return -1;
    }
    return __vformat(NULL, 0, fd, fmt, ap);
}

int vprintf(const char *fmt, va_list ap) {
    return __vformat(NULL, 0, 1, fmt, ap);
}

int vsnprintf(char *buf, size_t n, const char *fmt, va_list ap) {
    long cap = 0;
    if (n > 0) {
        long room = __char_room(buf);
        if (room <= 0) {
            errno = EINVAL;
            return -1;
        }
        cap = (size_t) room < n ? room : (long) n;
    }
    return __vformat(cap > 0 ? buf : NULL, cap, -1, fmt, ap);
}

int vsprintf(char *buf, const char *fmt, va_list ap) {
    long room = __char_room(buf);
    if (room <= 0) {
        errno = EINVAL;
        return -1;
    }
    return __vformat(buf, room, -1, fmt, ap);
}

int printf(const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    int r = vprintf(fmt, ap);
    va_end(ap);
    return r;
}

int fprintf(FILE *stream, const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    int r = vfprintf(stream, fmt, ap);
    va_end(ap);
    return r;
}

int sprintf(char *buf, const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    int r = vsprintf(buf, fmt, ap);
    va_end(ap);
    return r;
}

int snprintf(char *buf, size_t n, const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    int r = vsnprintf(buf, n, fmt, ap);
    va_end(ap);
    return r;
}

/* -- formatted input: %d and %s only ------------------------------------------ */

int sscanf(const char *str, const char *fmt, ...) {
    int *ip;
    char *sp;
    int nargs = count_varargs();
    int used = 0;
    const char *f = fmt;
    if (__char_room(str) < 0 || __char_room(fmt) <= 0) {
        errno = EINVAL;
        return EOF;
    }
    /* validate specifiers against the arguments before consuming input */
    while (__readable(f) && *f != '\0') {
        if (*f == '%') {
            f++;
            if (!__readable(f)) break;
            if (*f == 'd') {
                if (used >= nargs || get_vararg(used, type(&ip)) == NULL) {
                    errno = EINVAL;
                    return EOF;
                }
                used++;
            } else if (*f == 's') {
                if (used >= nargs || get_vararg(used, type(&sp)) == NULL) {
                    errno = EINVAL;
                    return EOF;
                }
                used++;
            } else if (*f != '%') {
                errno = EINVAL;
                return EOF;
            }
        }
        f++;
    }
    if (used != nargs) {
        errno = EINVAL;
        return EOF;
    }
    int assigned = 0;
    used = 0;
    f = fmt;
    while (__readable(f) && *f != '\0') {
        if (isspace(*f)) {
            while (__readable(str) && isspace(*str)) str++;
            f++;
            continue;
        }
        if (*f != '%' || (__readable(f + 1) && f[1] == '%')) {
            if (*f == '%') f++;
            if (!__readable(str) || *str != *f) return assigned;
            str++;
            f++;
            continue;
        }
        f++;
        while (__readable(str) && isspace(*str)) str++;
        if (!__readable(str) || *str == '\0') return assigned == 0 ? EOF : assigned;
        if (*f == 'd') {
            int **pp = get_vararg(used, type(&ip));
            int *dst = *pp;
            int neg = 0;
            long v = 0;
            if (*str == '-' || *str == '+') {
                neg = *str == '-';
                str++;
            }
            if (!__readable(str) || !isdigit(*str)) return assigned;
            while (__readable(str) && isdigit(*str)) {
                v = v * 10 + (*str - '0');
                str++;
            }
            if (try_cast(dst, type(dst)) == NULL) {
                errno = EINVAL;
                return assigned;
            }
            *dst = (int) (neg ? -v : v);
        } else {
            char **pp = get_vararg(used, type(&sp));
            char *dst = *pp;
            long room = __char_room(dst);
            long n = 0;
            if (room <= 0) {
                errno = EINVAL;
                return assigned;
            }
            while (__readable(str) && *str != '\0' && !isspace(*str)) {
                if (n + 1 < room) {
                    dst[n] = *str;
                    n++;
                } else {
                    errno = EINVAL;
                }
                str++;
            }
            dst[n] = '\0';
        }
        used++;
        assigned++;
        f++;
    }
    return assigned;
}

/* -- higher-order functions -------------------------------------------------- */

void qsort(void *base, size_t nitems, size_t size, int (*f)(const void *, const void *)) {
    int (*verifiedPointer)(const void *, const void *) = try_cast(&f, type(f));
    if (verifiedPointer == NULL || (size != 0 && nitems > SIZE_MAX / size)) {
        errno = EINVAL;
        return;
    }
    long room = size_right(base);
    if (room < 0 || nitems * size > (size_t) room) {
        errno = EINVAL;
        return;
    }
    if (nitems < 2 || size == 0) return;
    char *bytes = base;
    long *order = malloc(nitems * sizeof(long));
    long *scratch = malloc(nitems * sizeof(long));
    char *copy = malloc(nitems * size);
    if (order == NULL || scratch == NULL || copy == NULL) {
        free(order);
        free(scratch);
        free(copy);
        errno = EINVAL;
        return;
    }
    size_t i;
    for (i = 0; i < nitems; i++) order[i] = i;
    /* bottom-up merge sort of record indices; stable */
    size_t width;
    for (width = 1; width < nitems; width = width * 2) {
        size_t lo;
        for (lo = 0; lo < nitems; lo = lo + 2 * width) {
            size_t mid = lo + width < nitems ? lo + width : nitems;
            size_t hi = lo + 2 * width < nitems ? lo + 2 * width : nitems;
            size_t a = lo;
            size_t b = mid;
            size_t k = lo;
            while (a < mid && b < hi) {
                if (f(bytes + order[b] * size, bytes + order[a] * size) < 0) scratch[k++] = order[b++];
                else scratch[k++] = order[a++];
            }
            while (a < mid) scratch[k++] = order[a++];
            while (b < hi) scratch[k++] = order[b++];
        }
        for (i = 0; i < nitems; i++) order[i] = scratch[i];
    }
    /* gather into the copy first so a failed move leaves base untouched */
    int ok = 1;
    for (i = 0; i < nitems && ok; i++) {
        if (__host_memmove(copy + i * size, bytes + order[i] * size, size) != 0) ok = 0;
    }
    if (ok && __host_memmove(base, copy, nitems * size) != 0) ok = 0;
    if (!ok) errno = EINVAL;
    free(order);
    free(scratch);
    free(copy);
}

void *bsearch(const void *key, const void *base, size_t nitems, size_t size, int (*f)(const void *, const void *)) {
    int (*verifiedPointer)(const void *, const void *) = try_cast(&f, type(f));
    if (verifiedPointer == NULL || (size != 0 && nitems > SIZE_MAX / size)) {
        errno = EINVAL;
        return NULL;
    }
    long room = size_right(base);
    if (room < 0 || nitems * size > (size_t) room) {
        errno = EINVAL;
        return NULL;
    }
    const char *bytes = base;
    size_t lo = 0;
    size_t hi = nitems;
    while (lo < hi) {
        size_t mid = lo + (hi - lo) / 2;
        int c = f(key, bytes + mid * size);
        if (c == 0) return (void *) (bytes + mid * size);
        if (c < 0) hi = mid;
        else lo = mid + 1;
    }
    return NULL;
}
