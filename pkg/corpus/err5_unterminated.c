// A hand-written strcpy follows the unterminated input past its buffer.
int MAXLEN = 8;

char *strcpy(char *dst, const char *src) {
    char *d = dst;
    while ((*d++ = *src++) != '\0')
        ;
    return dst;
}

int read_input(char *buf, int max) {
    int n = 0;
    int c = getchar();
    while (n < max && c != EOF) {
        buf[n++] = c;
        c = getchar();
    }
    return n;
}

int main(void) {
    char inputbuf[8];
    read_input(inputbuf, MAXLEN);
    char buf[8];
    strcpy(buf, inputbuf);
    puts(buf);
    return 0;
}
