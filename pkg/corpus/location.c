const char *name(int l) {
    if (l == STATIC) return "STATIC";
    if (l == AUTOMATIC) return "AUTOMATIC";
    if (l == DYNAMIC) return "DYNAMIC";
    return "INVALID";
}

int a;

void func(void) {
    static int b;
    int c;
    int *d = malloc(sizeof(int) * 10);
    printf("%s %s %s %s", name(location(&a)), name(location(&b)), name(location(&c)), name(location(d)));
    free(d);
    printf(" %s\n", name(location(d)));
}

int main(void) {
    func();
    return 0;
}
