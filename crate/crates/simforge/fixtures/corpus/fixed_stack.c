#define DEPTH 16

static int stack_data[DEPTH];
static int stack_top = 0;

static int push(int value) {
    if (stack_top == DEPTH) {
        return 0;
    }
    stack_data[stack_top] = value;
    stack_top = stack_top + 1;
    return 1;
}

static int pop(void) {
    if (stack_top == 0) {
        return 0;
    }
    stack_top = stack_top - 1;
    return stack_data[stack_top];
}

int main(void) {
    const char *program = "73+21-*4+";
    int i;
    for (i = 0; program[i] != '\0'; i++) {
        int ch = program[i];
        if (ch >= '0' && ch <= '9') {
            push(ch - '0');
        } else {
            int b = pop();
            int a = pop();
            if (ch == '+') {
                push(a + b);
            } else if (ch == '-') {
                push(a - b);
            } else {
                push(a * b);
            }
        }
    }
    return pop() & 0xff;
}
