// The error path frees ptr, then logError reads through the dangling pointer.
int SIZE = 16;

void logError(const char *message, void *ptr) {
    char *data = ptr;
    printf("error while processing %s: first byte %d\n", message, data[0]);
}

int main(void) {
    int err = 1;
    int abrt = 0;
    char *ptr = (char *) malloc(SIZE * sizeof(char));
    strcpy(ptr, "payload");
    if (err) {
        abrt = 1;
        free(ptr);
    }
    if (abrt) {
        logError("operation aborted", ptr);
        free(ptr);
    }
    return 0;
}
