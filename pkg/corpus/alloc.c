int main(void) {
    char *p = malloc(16);
    for (int i = 0; i < 16; i++) p[i] = 'a' + i;
    char *q = realloc(p, 32);
    printf("%c%c %ld %d\n", q[0], q[15], size_right(q), location(p) == INVALID);
    int local = 7;
    free(&local);
    printf("%d %d\n", errno, local);
    errno = 0;
    free(NULL);
    printf("%d\n", errno);
    char *z = malloc(0);
    char *z2 = malloc(0);
    printf("%d %d %ld\n", z != NULL, z != z2, size_right(z));
    int *c = calloc(4, sizeof(int));
    printf("%d %d\n", c[0], c[3]);
    printf("%d\n", realloc(&local, 8) == NULL);
    char *big = malloc(2000000000);
    printf("%d\n", big == NULL);
    free(q);
    free(q);
    printf("%d\n", errno);
    return 0;
}
