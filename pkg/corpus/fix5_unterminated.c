// The library strcpy and puts stop at the end of the unterminated buffer.
int MAXLEN = 8;

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
    printf("%d\n", (int) strlen(buf));
    return 0;
}
