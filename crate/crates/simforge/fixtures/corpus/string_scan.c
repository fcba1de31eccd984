static int is_space(int ch) {
    return ch == ' ' || ch == '\t' || ch == '\n';
}

static int is_digit(int ch) {
    return ch >= '0' && ch <= '9';
}

int main(void) {
    const char *text = "4 score and 7 years ago 1776 came before 1863";
    int words = 0;
    int digits = 0;
    int in_word = 0;
    int i;
    for (i = 0; text[i] != '\0'; i++) {
        if (is_digit(text[i])) {
            digits = digits + 1;
        }
        if (is_space(text[i])) {
            in_word = 0;
        } else if (!in_word) {
            in_word = 1;
            words = words + 1;
        }
    }
    return (words * 10 + digits) & 0xff;
}
