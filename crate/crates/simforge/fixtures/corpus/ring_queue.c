int ring_push(int *slot, int *meta, int v) {
    if (meta[1] >= 8) {
        return 0;
    }
    int at = meta[0] + meta[1];
    at = at % 8;
    slot[at] = v;
    meta[1] = meta[1] + 1;
    return 1;
}

int ring_pop(int *slot, int *meta) {
    if (meta[1] <= 0) {
        return -1;
    }
    int v = slot[meta[0]];
    meta[0] = meta[0] + 1;
    meta[0] = meta[0] % 8;
    meta[1] = meta[1] - 1;
    return v;
}

int drain_sum(int *slot, int *meta) {
    int total = 0;
    while (meta[1] > 0) {
        int got = ring_pop(slot, meta);
        total = total + got;
    }
    return total;
}

int main(void) {
    int slot[8];
    int meta[2];
    meta[0] = 0;
    meta[1] = 0;
    int feed = meta[1] + 3;
    int put = 0;
    while (put < 12) {
        int ok = ring_push(slot, meta, feed);
        if (ok == 0) {
            feed = feed ^ 7;
        }
        feed = feed * 5;
        feed = feed % 97;
        put = put + 1;
    }
    int left = drain_sum(slot, meta);
    return left & 0x7f;
}
