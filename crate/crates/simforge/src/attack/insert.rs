//! Insertion-site analysis and fresh-name renaming.
//!
//! A candidate line may only be inserted at a line boundary that is
//! strictly inside a function body and between statements. Anything else
//! (file scope, initializer lists, struct bodies, mid-statement, inside a
//! multi-line parenthesized head) would either fail to compile or change
//! semantics, wasting an equivalence check.

use crate::lexnorm::{tokenize_c, Keyword, Op, TokenKind};

use super::pool::contains_word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    /// Statement context: function body or nested statement block.
    Code,
    /// Brace group holding data: initializers, struct/union/enum bodies.
    Data,
}

/// Eligible insertion boundaries: 1-based line numbers `L` meaning "a new
/// line may become line `L`", pushing the current line `L` down.
///
/// A boundary is eligible when the innermost open brace is a statement
/// block, no parenthesis is open, the previous token ends a statement
/// (`;`, `{`, or `}`), and the next line does not begin with `else`,
/// `case`, or `default` (which must stay glued to their construct).
pub fn insertion_points(source: &str) -> Vec<u32> {
    let doc = tokenize_c("sites", source.as_bytes());
    let tokens = &doc.tokens;
    if tokens.is_empty() {
        return Vec::new();
    }
    let n_lines = source.lines().count() as u32;
    let mut points = Vec::new();
    let mut stack: Vec<BlockKind> = Vec::new();
    let mut paren_depth: i32 = 0;
    let mut prev: Option<TokenKind> = None;
    let mut ti = 0usize;
    for boundary in 2..=n_lines {
        while ti < tokens.len() && tokens[ti].line < boundary {
            step_block_state(&mut stack, &mut paren_depth, &mut prev, tokens[ti].kind);
            ti += 1;
        }
        let inside_code = matches!(stack.last(), Some(BlockKind::Code));
        let at_statement_boundary = matches!(
            prev,
            Some(TokenKind::Op(Op::Semi))
                | Some(TokenKind::Op(Op::LBrace))
                | Some(TokenKind::Op(Op::RBrace))
        );
        let next_ok = match tokens.get(ti).map(|t| t.kind) {
            Some(TokenKind::Kw(Keyword::Else))
            | Some(TokenKind::Kw(Keyword::Case))
            | Some(TokenKind::Kw(Keyword::Default)) => false,
            Some(_) => true,
            None => false,
        };
        if inside_code && paren_depth == 0 && at_statement_boundary && next_ok {
            points.push(boundary);
        }
    }
    points
}

/// Classifies each opened brace. A brace opens a statement block when it
/// follows a `)` (function, if, while, for, switch heads), an `else` or
/// `do`, or stands at a statement boundary of an enclosing statement
/// block. Everything else (after `=`, a comma, a struct/union/enum tag) is
/// data.
fn step_block_state(
    stack: &mut Vec<BlockKind>,
    paren_depth: &mut i32,
    prev: &mut Option<TokenKind>,
    kind: TokenKind,
) {
    match kind {
        TokenKind::Op(Op::LParen) => *paren_depth += 1,
        TokenKind::Op(Op::RParen) => *paren_depth -= 1,
        TokenKind::Op(Op::LBrace) => {
            let block = match *prev {
                Some(TokenKind::Op(Op::RParen))
                | Some(TokenKind::Kw(Keyword::Else))
                | Some(TokenKind::Kw(Keyword::Do)) => BlockKind::Code,
                Some(TokenKind::Op(Op::Semi))
                | Some(TokenKind::Op(Op::LBrace))
                | Some(TokenKind::Op(Op::RBrace))
                    if stack.last() == Some(&BlockKind::Code) =>
                {
                    BlockKind::Code
                }
                _ => BlockKind::Data,
            };
            stack.push(block);
        }
        TokenKind::Op(Op::RBrace) => {
            stack.pop();
        }
        _ => {}
    }
    *prev = Some(kind);
}

/// Inserts `line_text` so that it becomes line `before_line`, matching the
/// indentation already used there.
pub fn insert_line(source: &str, line_text: &str, before_line: u32) -> String {
    let lines: Vec<&str> = source.lines().collect();
    let at = (before_line as usize).saturating_sub(1).min(lines.len());
    let indent_of = |l: &str| -> String { l.chars().take_while(|c| c.is_whitespace()).collect() };
    let indent = match lines.get(at) {
        Some(l) if !l.trim().is_empty() && !l.trim_start().starts_with('}') => indent_of(l),
        _ => at
            .checked_sub(1)
            .and_then(|p| lines.get(p))
            .map(|l| indent_of(l))
            .unwrap_or_default(),
    };
    let mut out = String::with_capacity(source.len() + line_text.len() + indent.len() + 1);
    for (i, l) in lines.iter().enumerate() {
        if i == at {
            out.push_str(&indent);
            out.push_str(line_text);
            out.push('\n');
        }
        out.push_str(l);
        out.push('\n');
    }
    if at >= lines.len() {
        out.push_str(&indent);
        out.push_str(line_text);
        out.push('\n');
    }
    out
}

const TYPE_WORDS: &[&str] = &[
    "int", "long", "short", "char", "float", "double", "unsigned", "signed", "bool", "_Bool",
    "const", "static", "volatile", "register", "extern", "auto", "struct", "union", "enum",
];

#[derive(Debug, PartialEq)]
enum Spelled {
    Word(String),
    Punct(char),
    Other,
}

fn lex_spelled(line: &str) -> Vec<Spelled> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spelled::Word(chars[start..i].iter().collect()));
        } else if c == '"' || c == '\'' {
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            out.push(Spelled::Other);
        } else if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '.') {
                i += 1;
            }
            out.push(Spelled::Other);
        } else {
            out.push(Spelled::Punct(c));
            i += 1;
        }
    }
    out
}

/// Names a simple declaration line introduces: `int i = 0, j = i;` declares
/// `i` and `j`. Lines that do not begin with a type or storage keyword are
/// not treated as declarations and return nothing.
pub fn declared_names(line: &str) -> Vec<String> {
    let toks = lex_spelled(line);
    let mut i = 0;
    let mut saw_type = false;
    let mut tag_pending = false;
    while let Some(Spelled::Word(w)) = toks.get(i) {
        if TYPE_WORDS.contains(&w.as_str()) {
            tag_pending = matches!(w.as_str(), "struct" | "union" | "enum");
            saw_type = true;
            i += 1;
        } else if tag_pending {
            // struct/union/enum tag names the type, not a variable.
            tag_pending = false;
            i += 1;
        } else {
            break;
        }
    }
    if !saw_type {
        return Vec::new();
    }
    let mut names = Vec::new();
    let mut depth = 0i32;
    let mut expecting = true;
    while i < toks.len() {
        match &toks[i] {
            Spelled::Punct(c) => match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                ',' if depth == 0 => expecting = true,
                ';' if depth == 0 => break,
                _ => {}
            },
            Spelled::Word(w) => {
                if expecting && depth == 0 && !TYPE_WORDS.contains(&w.as_str()) {
                    names.push(w.clone());
                    expecting = false;
                }
            }
            Spelled::Other => {}
        }
        i += 1;
    }
    names
}

/// Whole-word textual replacement.
pub fn replace_word(text: &str, from: &str, to: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut start = 0;
    while let Some(pos) = text[start..].find(from) {
        let at = start + pos;
        let end = at + from.len();
        let boundary_before = at == 0 || !is_word_byte(bytes[at - 1]);
        let boundary_after = end == bytes.len() || !is_word_byte(bytes[end]);
        out.push_str(&text[start..at]);
        if boundary_before && boundary_after {
            out.push_str(to);
        } else {
            out.push_str(from);
        }
        start = end;
    }
    out.push_str(&text[start..]);
    out
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Renames declared identifiers that collide with names already in use,
/// suffixing a run-wide counter until fresh. Non-declaration lines pass
/// through untouched.
pub fn rename_collisions(line: &str, in_use: &dyn Fn(&str) -> bool, counter: &mut u32) -> String {
    let mut out = line.to_string();
    for name in declared_names(line) {
        if !in_use(&name) {
            continue;
        }
        loop {
            *counter += 1;
            let fresh = format!("{name}_{counter}");
            if !in_use(&fresh) && !contains_word(&out, &fresh) {
                out = replace_word(&out, &name, &fresh);
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROGRAM: &str = "\
#include <stdio.h>

int total = 0;

int add(int a, int b) {
    int s = a + b;
    return s;
}

int main(void) {
    int x = add(1, 2);
    if (x > 2) {
        x = x - 1;
    } else {
        x = 0;
    }
    return x;
}
";

    #[test]
    fn sites_are_inside_bodies_at_statement_boundaries() {
        let points = insertion_points(PROGRAM);
        // Body of add: before lines 6-8. Body of main: before 11-18,
        // including before `} else {` (still inside the if block) and
        // before each closing brace.
        assert_eq!(points, vec![6, 7, 8, 11, 12, 13, 14, 15, 16, 17, 18]);
    }

    #[test]
    fn file_scope_and_headers_are_excluded() {
        let points = insertion_points(PROGRAM);
        for l in [1u32, 2, 3, 4, 5, 9, 10] {
            assert!(!points.contains(&l), "line {l} wrongly eligible");
        }
    }

    #[test]
    fn data_braces_are_not_statement_blocks() {
        let src = "\
struct point {
    int x;
    int y;
};

int table[] = {
    1, 2,
    3, 4,
};

int use(void) {
    struct point p = { 1, 2 };
    return p.x + table[0];
}
";
        let points = insertion_points(src);
        assert_eq!(points, vec![12, 13, 14]);
    }

    #[test]
    fn multiline_heads_are_mid_statement() {
        let src = "\
int f(int a,
      int b) {
    int c = a +
        b;
    return c;
}
";
        // Boundary 2 (inside the parameter list) and 4 (inside the
        // expression) are ineligible.
        assert_eq!(insertion_points(src), vec![3, 5, 6]);
    }

    #[test]
    fn no_bodies_means_no_sites() {
        assert!(insertion_points("int x = 1;\nint y = 2;\n").is_empty());
        assert!(insertion_points("").is_empty());
    }

    #[test]
    fn insert_matches_indentation() {
        let src = "int main(void) {\n    int x = 1;\n    return x;\n}\n";
        let out = insert_line(src, "int i_1 = 0;", 3);
        assert_eq!(
            out,
            "int main(void) {\n    int x = 1;\n    int i_1 = 0;\n    return x;\n}\n"
        );
        // Before a closing brace the previous line's indent is used.
        let out = insert_line(src, "int i_1 = 0;", 4);
        assert_eq!(
            out,
            "int main(void) {\n    int x = 1;\n    return x;\n    int i_1 = 0;\n}\n"
        );
    }

    #[test]
    fn declared_names_cases() {
        let cases: &[(&str, &[&str])] = &[
            ("int i = 0;", &["i"]),
            ("int i = 0, j = i;", &["i", "j"]),
            ("unsigned long count = 0;", &["count"]),
            ("static const int limit = 10;", &["limit"]),
            ("struct point p = { 0, 0 };", &["p"]),
            ("int a[10];", &["a"]),
            ("char *name = 0;", &["name"]),
            ("x = y + 1;", &[]),
            ("return 0;", &[]),
            ("size_t n = 0;", &[]),
        ];
        for (line, expected) in cases {
            assert_eq!(&declared_names(line), expected, "{line:?}");
        }
    }

    #[test]
    fn rename_only_on_collision() {
        let taken = |w: &str| w == "i" || w == "count";
        let mut counter = 0;
        assert_eq!(
            rename_collisions("int j = 0;", &taken, &mut counter),
            "int j = 0;"
        );
        assert_eq!(counter, 0);
        assert_eq!(
            rename_collisions("int i = 0;", &taken, &mut counter),
            "int i_1 = 0;"
        );
        assert_eq!(
            rename_collisions("int count = 0, i = count;", &taken, &mut counter),
            "int count_2 = 0, i_3 = count_2;"
        );
        // Known uses stay intact; only declared words are touched.
        assert_eq!(
            rename_collisions("x = i + 1;", &taken, &mut counter),
            "x = i + 1;"
        );
    }

    #[test]
    fn replace_word_respects_boundaries() {
        assert_eq!(replace_word("i + hi + i;", "i", "q"), "q + hi + q;");
        assert_eq!(replace_word("mini i ii", "i", "q"), "mini q ii");
    }
}
