#define LIMIT 200

int main(void) {
    char composite[LIMIT + 1];
    int i;
    int j;
    int count = 0;
    int last = 2;
    for (i = 0; i <= LIMIT; i++) {
        composite[i] = 0;
    }
    for (i = 2; i * i <= LIMIT; i++) {
        if (!composite[i]) {
            for (j = i * i; j <= LIMIT; j += i) {
                composite[j] = 1;
            }
        }
    }
    for (i = 2; i <= LIMIT; i++) {
        if (!composite[i]) {
            count = count + 1;
            last = i;
        }
    }
    return (count + last) & 0xff;
}
