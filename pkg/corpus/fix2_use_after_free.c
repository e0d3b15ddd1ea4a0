// freeable() prevents the double free, location() detects the dangling pointer.
int SIZE = 16;

void logError(const char *message, void *ptr) {
    if (location(ptr) == INVALID) {
        printf("dangling pointer passed to logError!\n");
    } else {
        char *data = ptr;
        printf("error while processing %s: first byte %d\n", message, data[0]);
    }
}

int main(void) {
    int err = 1;
    int abrt = 0;
    char *ptr = (char *) malloc(SIZE * sizeof(char));
    strcpy(ptr, "payload");
    if (err) {
        abrt = 1;
        if (freeable(ptr)) free(ptr);
    }
    if (abrt) {
        logError("operation aborted", ptr);
        if (freeable(ptr)) free(ptr);
    }
    printf("errno=%d\n", errno);
    return 0;
}
