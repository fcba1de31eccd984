static int digit_fold(int value) {
    int folded = 0;
    while (value != 0) {
        folded = folded + value % 10;
        value = value / 10;
        if (folded > 99) {
            folded = folded - 90;
        }
    }
    return folded;
}

static int weighted_sum(const int *values, int n) {
    int total = 0;
    int weight = 1;
    int i;
    for (i = 0; i < n; i++) {
        total = total + values[i] * weight;
        weight = weight + 2;
        if (weight > 9) {
            weight = 1;
        }
    }
    return total;
}

static int clamp_range(int v, int lo, int hi) {
    if (v < lo) {
        return lo;
    }
    if (v > hi) {
        return hi;
    }
    if (v % 2 == 0) {
        return v + 1;
    }
    return v;
}

static int rolling_mix(int seed, int rounds) {
    int value = seed;
    int i;
    for (i = 0; i < rounds; i++) {
        value = value * 5 + i;
        value = value % 8191;
        if (value < 0) {
            value = value + 8191;
        }
    }
    return value;
}

int main(void) {
    int table[7] = { 4, 9, 2, 7, 5, 1, 8 };
    int mixed = rolling_mix(33, 10);
    int bounded = clamp_range(mixed, 10, 500);
    int sum = weighted_sum(table, 7);
    int folded = digit_fold(bounded + sum);
    return (folded * 3 + bounded) & 0xff;
}
