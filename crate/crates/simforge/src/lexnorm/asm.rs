//! Assembly tokenizer feeding the normalizer.
//!
//! The normalization level is deliberately shallower than for C: register
//! and label spellings stay significant (two functions using different
//! registers are different code), while build metadata (`.file`, `.ident`,
//! `.loc`) and comments are dropped because they vary with filenames and
//! toolchain versions rather than with the program.

use super::{decode_bytes, spelling_code, LexDiagnostic, NormalizedDocument, Op, Token, TokenKind};

/// Tokenizes AT&T or Intel style assembly into a normalized document.
pub fn tokenize_asm(doc_id: impl Into<String>, raw: &[u8]) -> NormalizedDocument {
    let text = decode_bytes(raw);
    let mut tokens = Vec::new();
    let diagnostics: Vec<LexDiagnostic> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        tokenize_line(line, idx as u32 + 1, &mut tokens);
    }
    NormalizedDocument::from_tokens(doc_id, raw, tokens, diagnostics)
}

fn tokenize_line(line: &str, lineno: u32, out: &mut Vec<Token>) {
    let line = strip_comment(line);
    let chars: Vec<char> = line.chars().collect();
    let mut pos = 0usize;
    // The first non-label word of a line is the mnemonic or directive slot.
    let mut head_seen = false;
    let start_len = out.len();

    while pos < chars.len() {
        let c = chars[pos];
        let col = pos as u32 + 1;
        match c {
            ' ' | '\t' => {
                pos += 1;
            }
            '"' => {
                pos += 1;
                while pos < chars.len() {
                    match chars[pos] {
                        '\\' => pos += 2,
                        '"' => {
                            pos += 1;
                            break;
                        }
                        _ => pos += 1,
                    }
                }
                out.push(Token {
                    kind: TokenKind::Str,
                    line: lineno,
                    col,
                });
            }
            '%' => {
                pos += 1;
                let w = scan_word(&chars, &mut pos);
                out.push(Token {
                    kind: TokenKind::Register(spelling_code(&w)),
                    line: lineno,
                    col,
                });
            }
            '$' => {
                pos += 1;
                let start = pos;
                let w = scan_word(&chars, &mut pos);
                let kind = if pos > start && looks_numeric(&w) {
                    TokenKind::Num
                } else if pos > start {
                    TokenKind::Label(spelling_code(&w))
                } else {
                    TokenKind::Other('$' as u32)
                };
                out.push(Token {
                    kind,
                    line: lineno,
                    col,
                });
            }
            c if c.is_ascii_digit() || (c == '-' && next_is_digit(&chars, pos)) => {
                if c == '-' {
                    pos += 1;
                }
                let w = scan_word(&chars, &mut pos);
                let _ = w;
                out.push(Token {
                    kind: TokenKind::Num,
                    line: lineno,
                    col,
                });
            }
            c if c.is_alphanumeric() || c == '.' || c == '_' => {
                let w = scan_word(&chars, &mut pos);
                let is_label_def = chars.get(pos) == Some(&':');
                if is_label_def {
                    pos += 1; // consume ':'
                    out.push(Token {
                        kind: TokenKind::Label(spelling_code(&w)),
                        line: lineno,
                        col,
                    });
                } else if !head_seen {
                    head_seen = true;
                    if w.starts_with('.') {
                        if matches!(w.as_str(), ".file" | ".ident" | ".loc") {
                            // Build metadata: discard the whole line.
                            out.truncate(start_len);
                            return;
                        }
                        out.push(Token {
                            kind: TokenKind::Directive(spelling_code(&w)),
                            line: lineno,
                            col,
                        });
                    } else {
                        out.push(Token {
                            kind: TokenKind::Mnemonic(spelling_code(&w)),
                            line: lineno,
                            col,
                        });
                    }
                } else if is_register_name(&w) {
                    out.push(Token {
                        kind: TokenKind::Register(spelling_code(&w)),
                        line: lineno,
                        col,
                    });
                } else if looks_numeric(&w) {
                    out.push(Token {
                        kind: TokenKind::Num,
                        line: lineno,
                        col,
                    });
                } else {
                    out.push(Token {
                        kind: TokenKind::Label(spelling_code(&w)),
                        line: lineno,
                        col,
                    });
                }
            }
            _ => {
                pos += 1;
                let kind = match c {
                    ',' => TokenKind::Op(Op::Comma),
                    '(' => TokenKind::Op(Op::LParen),
                    ')' => TokenKind::Op(Op::RParen),
                    '[' => TokenKind::Op(Op::LBracket),
                    ']' => TokenKind::Op(Op::RBracket),
                    '+' => TokenKind::Op(Op::Plus),
                    '-' => TokenKind::Op(Op::Minus),
                    '*' => TokenKind::Op(Op::Star),
                    ':' => TokenKind::Op(Op::Colon),
                    other => TokenKind::Other(other as u32),
                };
                out.push(Token {
                    kind,
                    line: lineno,
                    col,
                });
            }
        }
    }
}

/// GAS comments run from `#` to end of line; string literals may contain `#`.
fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' if in_str => escaped = true,
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn scan_word(chars: &[char], pos: &mut usize) -> String {
    let start = *pos;
    while *pos < chars.len() {
        let c = chars[*pos];
        if c.is_alphanumeric() || c == '.' || c == '_' || c == '@' {
            *pos += 1;
        } else {
            break;
        }
    }
    chars[start..*pos].iter().collect()
}

fn next_is_digit(chars: &[char], pos: usize) -> bool {
    chars.get(pos + 1).is_some_and(|c| c.is_ascii_digit())
}

fn looks_numeric(w: &str) -> bool {
    let w = w.strip_prefix('-').unwrap_or(w);
    if let Some(hex) = w.strip_prefix("0x").or_else(|| w.strip_prefix("0X")) {
        return !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit());
    }
    !w.is_empty() && w.chars().next().is_some_and(|c| c.is_ascii_digit())
}

/// Bare x86 register names, for Intel-syntax operands without `%`.
fn is_register_name(w: &str) -> bool {
    const FIXED: &[&str] = &[
        "rax", "rbx", "rcx", "rdx", "rsi", "rdi", "rbp", "rsp", "rip", "eax", "ebx", "ecx", "edx",
        "esi", "edi", "ebp", "esp", "eip", "ax", "bx", "cx", "dx", "si", "di", "bp", "sp", "al",
        "bl", "cl", "dl", "ah", "bh", "ch", "dh", "sil", "dil", "bpl", "spl",
    ];
    if FIXED.contains(&w) {
        return true;
    }
    for prefix in ["r", "xmm", "ymm", "zmm", "st", "mm", "k"] {
        if let Some(rest) = w.strip_prefix(prefix) {
            let rest = rest
                .strip_suffix('b')
                .or_else(|| rest.strip_suffix('w'))
                .or_else(|| rest.strip_suffix('d'))
                .unwrap_or(rest);
            if !rest.is_empty() && rest.len() <= 2 && rest.chars().all(|c| c.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}
