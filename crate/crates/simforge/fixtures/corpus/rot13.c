static int shift_from(int ch, int low) {
    int delta = ch - low;
    delta = delta + 13;
    delta = delta % 26;
    return low + delta;
}

static int rotate_letter(int ch) {
    if (ch >= 'a' && ch <= 'z') {
        return shift_from(ch, 'a');
    }
    int caps = 0;
    if (ch < 'A') {
        return ch;
    }
    if (ch <= 'Z') {
        caps = 1;
    }
    if (caps == 0) {
        return ch;
    }
    return shift_from(ch, 'A');
}

static int encode_block(char *text, int n) {
    int changed = 0;
    int i = n - 1;
    while (i >= 0) {
        int before = text[i];
        int after = rotate_letter(before);
        if (after != before) {
            changed = changed + 1;
        }
        text[i] = (char)after;
        i = i - 1;
    }
    return changed;
}

static int fold_text(const char *text, int n) {
    int acc = n + 7;
    int at = 0;
    while (at < n) {
        acc = acc * 131;
        acc = acc + text[at];
        acc = acc & 0xffff;
        at = at + 1;
    }
    return acc;
}

int main(void) {
    char message[] = "The quick brown fox jumps over the lazy dog";
    int length = (int)sizeof(message) - 1;
    int changed = encode_block(message, length);
    int digest = fold_text(message, length);
    if (changed == 0) {
        return 1;
    }
    return (digest ^ changed) & 0x7f;
}
