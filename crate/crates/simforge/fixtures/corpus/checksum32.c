static unsigned step_hash(unsigned hash, unsigned byte) {
    hash = hash ^ byte;
    hash = hash * 16777619u;
    return hash;
}

int main(void) {
    unsigned hash = 2166136261u;
    unsigned i;
    const unsigned char table[12] = {
        3, 141, 59, 26, 53, 58, 97, 93, 23, 84, 62, 64
    };
    for (i = 0; i < 12u; i++) {
        hash = step_hash(hash, table[i]);
    }
    while (hash > 255u) {
        hash = (hash >> 8) ^ (hash & 255u);
    }
    return (int)hash;
}
