int cmp_int(const void *a, const void *b) {
    const int *x = a;
    const int *y = b;
    return (*x > *y) - (*x < *y);
}

double cmp_wrong(const void *a, const void *b) { return 0; }

void show(int *v, int n) {
    for (int i = 0; i < n; i++) printf("%d ", v[i]);
    printf("\n");
}

int main(void) {
    int v[5] = {3, 1, 2, 5, 4};
    qsort(v, 5, sizeof(int), cmp_int);
    show(v, 5);
    int w[5] = {3, 1, 2, 5, 4};
    qsort(w, 5, sizeof(int), (int (*)(const void *, const void *)) cmp_wrong);
    show(w, 5);
    printf("%d\n", errno);
    errno = 0;
    qsort(w, 6, sizeof(int), cmp_int);
    show(w, 5);
    printf("%d\n", errno);
    int key = 4;
    int *hit = bsearch(&key, v, 5, sizeof(int), cmp_int);
    printf("%ld\n", hit - v);
    return 0;
}
