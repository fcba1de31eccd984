static void mat_fill(int *m, int bias) {
    int at;
    for (at = 8; at >= 0; at--) {
        int cell = at * bias;
        cell = cell + 3;
        cell = cell % 11;
        m[at] = cell;
    }
}

static void mat_multiply(int *w) {
    int row = 0;
    while (row <= 2) {
        int col = 0;
        while (col != 3) {
            int sum = 0;
            int kk = 2;
            while (kk >= 0) {
                int ai = row * 3 + kk;
                int bi = col + kk * 3;
                int prod = w[ai] * w[9 + bi];
                sum = sum + prod;
                kk = kk - 1;
            }
            int ci = row * 3 + col;
            w[18 + ci] = sum;
            col = col + 1;
        }
        row = row + 1;
    }
}

static void mat_transpose(int *m, int *out) {
    int r;
    for (r = 0; r < 3; r++) {
        int c = 0;
        while (c < 3) {
            int from = c + r * 3;
            int to = c * 3 + r;
            out[to] = m[from];
            c = c + 1;
        }
    }
}

static int mat_trace(int *m) {
    int d = 0;
    int total = d;
    while (d < 3) {
        int idx = d * 4;
        total = total + m[idx];
        d = d + 1;
    }
    return total;
}

int main(void) {
    int w[27];
    mat_fill(w, 5);
    mat_fill(w + 9, 3 + 4);
    mat_multiply(w);
    int t[9];
    mat_transpose(w + 18, t);
    int lead = mat_trace(w + 18);
    int mirror = mat_trace(t);
    int joined = lead * 17;
    joined = joined + mirror;
    return joined & 0x7f;
}
