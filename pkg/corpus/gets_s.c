int main(void) {
    char buf[10];
    char small[4];
    char *r = gets_s(buf, 10);
    printf("[%s] %d\n", buf, r == buf);
    r = gets_s(small, 10);
    printf("%d %d\n", r == NULL, errno);
    errno = 0;
    r = gets_s(buf, 0);
    printf("%d %d\n", r == NULL, errno);
    r = gets_s(buf, 10);
    printf("[%s]\n", buf);
    return 0;
}
