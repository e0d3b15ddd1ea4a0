int main(void) {
    int r = printf("%s %s", "a");
    int e = errno;
    errno = 0;
    int r2 = printf("%d", "str");
    int e2 = errno;
    int r3 = printf("%d %s\n", 42, "hi");
    printf("%d %d %d %d %d\n", r, e, r2, e2, r3);
    return 0;
}
