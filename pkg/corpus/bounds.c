int main(void) {
    int *arr = malloc(sizeof(int) * 10);
    int *ptr = &(arr[4]);
    printf("size_left=%ld\n", size_left(ptr));
    printf("size_right=%ld\n", size_right(ptr));
    printf("%ld %ld\n", size_right(arr + 10), size_right(arr + 11));
    printf("%ld %ld\n", size_left(NULL), size_right(NULL));
    free(arr);
    printf("%ld\n", size_right(ptr));
    return 0;
}
