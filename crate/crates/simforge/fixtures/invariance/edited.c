/* Same program as base.c after a cosmetic pass: every function and local
   was renamed, comments were sprinkled in, and spacing changed. */

static int churn(int start, int laps) {
    int acc = start; /* running value */
    int lap;
    for (lap = 0; lap < laps; lap++) {
        acc = acc * 5 + lap;
        acc = acc % 8191;
        /* keep the residue positive */
        if (acc < 0) {
            acc = acc + 8191;
        }
    }
    return acc;
}

static int bound(int x, int floor_, int ceil_) {
    if (x < floor_) {
        return floor_;
    }

    if (x > ceil_) {
        return ceil_;
    }
    /* odd numbers only */
    if (x % 2 == 0) {
        return x + 1;
    }
    return x;
}

static int tally(const int *data, int len) {
    int running = 0;
    int scale = 1;
    int pos;
    for (pos = 0; pos < len; pos++) {
        running = running + data[pos] * scale;
        scale = scale + 2;
        if (scale > 9) {
            scale = 1; /* wrap the weight */
        }
    }
    return running;
}

static int squash(int num) {
    int out = 0;
    while (num != 0) {
        out = out + num % 10;
        num = num / 10;
        if (out > 99) {
            out = out - 90;
        }
    }
    return out;
}

int main(void) {
    int samples[7] = { 4, 9, 2, 7, 5, 1, 8 };
    int stirred = churn(33, 10);
    int capped = bound(stirred, 10, 500);
    int total = tally(samples, 7);
    int draft = squash(capped + total);
    return (draft * 3 + capped) & 0xff;
}
