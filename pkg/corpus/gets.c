int main(void) {
    char buf[10];
    char small[4];
    char *r = gets(buf);
    printf("[%s] %d\n", buf, r == buf);
    r = gets(NULL);
    printf("%d %d\n", r == NULL, errno);
    errno = 0;
    r = gets(small);
    printf("%d %d %d\n", r == NULL, errno, small[0]);
    r = gets(buf);
    printf("[%s]\n", buf);
    return 0;
}
