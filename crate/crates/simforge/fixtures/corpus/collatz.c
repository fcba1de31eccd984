static int steps_to_one(int n) {
    int steps = 0;
    while (n != 1) {
        if (n % 2 == 0) {
            n = n / 2;
        } else {
            n = 3 * n + 1;
        }
        steps = steps + 1;
    }
    return steps;
}

int main(void) {
    int longest = 0;
    int arg = 1;
    int n;
    for (n = 1; n <= 40; n++) {
        int len = steps_to_one(n);
        if (len > longest) {
            longest = len;
            arg = n;
        }
    }
    return (longest + arg) & 0xff;
}
