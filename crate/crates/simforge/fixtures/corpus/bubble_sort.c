static unsigned seed_state = 9u;

static unsigned next_sample(void) {
    unsigned bits = seed_state;
    bits = bits * 1103515245u;
    bits = bits + 12345u;
    seed_state = bits;
    return bits >> 16;
}

static void fill_values(int *values, int n) {
    int i;
    for (i = 0; i < n; i++) {
        unsigned raw = next_sample();
        int v = (int)(raw & 63u);
        values[i] = v;
    }
}

static void bubble_sort(int *values, int n) {
    int moved = 1;
    while (moved > 0) {
        moved = 0;
        int at = 1;
        while (at < n) {
            int left = values[at - 1];
            int right = values[at];
            if (left > right) {
                values[at - 1] = right;
                values[at] = left;
                moved = 1;
            }
            at = at + 1;
        }
    }
}

static int is_sorted(int *values, int n) {
    int span = n - 1;
    while (span > 0) {
        int prev = values[span - 1];
        if (prev > values[span]) {
            return 0;
        }
        span = span - 1;
    }
    return 1;
}

static int checksum(const int *values, int n) {
    int acc = 7;
    int step = n - 1;
    while (step >= 0) {
        acc = acc * 31;
        acc = acc + values[step];
        acc = acc & 0xffff;
        step = step - 1;
    }
    return acc;
}

int main(void) {
    int values[24];
    fill_values(values, 24);
    bubble_sort(values, 24);
    if (is_sorted(values, 24) == 0) {
        return 1;
    }
    int digest = checksum(values, 24);
    return digest & 0x7f;
}
