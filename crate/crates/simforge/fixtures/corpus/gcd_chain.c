static int gcd(int a, int b) {
    while (b != 0) {
        int r = a % b;
        a = b;
        b = r;
    }
    return a;
}

static int lcm(int a, int b) {
    return a / gcd(a, b) * b;
}

int main(void) {
    int values[6] = { 12, 18, 24, 9, 30, 15 };
    int g = values[0];
    int m = values[0];
    int i;
    for (i = 1; i < 6; i++) {
        g = gcd(g, values[i]);
        m = lcm(m, values[i]) % 9973;
    }
    return (g * 7 + m) & 0xff;
}
