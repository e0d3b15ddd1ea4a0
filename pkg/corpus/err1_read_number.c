// A length of -1 turns the range check into a no-op; ten digits overflow buf.
void read_number(char *arr, size_t length) {
    int i = 0;
    if (length == 0) return;
    int c = getchar();
    while (isdigit(c) && (i + 1) < length) {
        arr[i++] = c;
        c = getchar();
    }
    arr[i] = '\0';
}

int main(void) {
    char buf[10];
    read_number(buf, -1);
    printf("%s\n", buf);
    return 0;
}
