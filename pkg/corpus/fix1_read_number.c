// size_right guards the buffer; a correct length runs to completion.
void read_number(char *arr, size_t length) {
    int i = 0;
    if (length == 0) return;
    if (size_right(arr) < length) abort();
    int c = getchar();
    while (isdigit(c) && (i + 1) < length) {
        arr[i++] = c;
        c = getchar();
    }
    arr[i] = '\0';
}

int main(void) {
    char buf[10];
    read_number(buf, sizeof(buf));
    printf("%s\n", buf);
    return 0;
}
