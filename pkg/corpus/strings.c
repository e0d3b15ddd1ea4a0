int main(void) {
    char four[4] = {'a', 'b', 'c', 'd'};
    char two[2];
    char ab[2] = {'a', 'b'};
    char hi[2] = {'h', 'i'};
    printf("%d %d %d\n", (int) strlen("abc"), (int) strlen(four), (int) strlen(NULL));
    strcpy(two, "xyz");
    printf("%d %c%c\n", (int) strlen(two), two[0], two[1]);
    printf("%d\n", strcmp("ab", ab));
    printf("%d\n", atoi("42"));
    printf("%d\n", puts(hi) >= 0);
    char dst[16] = "foo";
    strcat(dst, "bar");
    printf("%s %d\n", dst, strcmp(dst, "foobar"));
    errno = 0;
    strcpy(NULL, "x");
    printf("%d\n", errno);
    return 0;
}
