static unsigned mix_state = 7u;

static unsigned mix_next(void) {
    unsigned x = mix_state;
    x = x ^ (x << 13);
    x = x ^ (x >> 17);
    x = x ^ (x << 5);
    mix_state = x;
    return x;
}

static void bin_samples(int *bins, int rounds) {
    int r = 0;
    while (r < rounds) {
        unsigned v = mix_next();
        int slot = (int)(v & 15u);
        bins[slot] = bins[slot] + 1;
        r = r + 1;
    }
}

static int peak_bin(int *bins) {
    int best = 0;
    int b = best + 1;
    while (b < 16) {
        if (bins[b] > bins[best]) {
            best = b;
        }
        b = 1 + b;
    }
    return best;
}

static int bin_spread(int *bins) {
    int low = bins[0];
    int high = low;
    int s = 1;
    while (s < 16) {
        int got = bins[s];
        if (got < low) {
            low = got;
        }
        if (got > high) {
            high = got;
        }
        s = s + 1;
    }
    return high - low;
}

int main(void) {
    int bins[16];
    int z = 15;
    while (z >= 0) {
        bins[z] = 0;
        z = z - 1;
    }
    bin_samples(bins, 200);
    int peak = peak_bin(bins);
    int spread = bin_spread(bins);
    int mash = peak * 29;
    mash = mash + spread;
    return mash & 0x7f;
}
