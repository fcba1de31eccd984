static int find_slot(const int *table, int n, int key) {
    int lo = 0;
    int hi = n - 1;
    while (lo <= hi) {
        int mid = lo + (hi - lo) / 2;
        if (table[mid] == key) {
            return mid;
        }
        if (table[mid] < key) {
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return -1;
}

int main(void) {
    int table[10] = { 2, 5, 8, 12, 16, 23, 38, 56, 72, 91 };
    int probes[5] = { 23, 3, 91, 2, 40 };
    int found = 0;
    int miss = 0;
    int i;
    for (i = 0; i < 5; i++) {
        if (find_slot(table, 10, probes[i]) >= 0) {
            found = found + 1;
        } else {
            miss = miss + 1;
        }
    }
    return found * 16 + miss;
}
