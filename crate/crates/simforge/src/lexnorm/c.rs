//! C tokenizer feeding the normalizer.
//!
//! Not a conforming preprocessor: `#` and directive contents are lexed as
//! ordinary tokens so that `#include <stdio.h>` contributes classes like any
//! other line. That keeps normalization total over real-world inputs without
//! needing include resolution.

use super::{decode_bytes, Keyword, LexDiagnostic, NormalizedDocument, Op, Token, TokenKind};

/// Tokenizes C-family source into a normalized document.
pub fn tokenize_c(doc_id: impl Into<String>, raw: &[u8]) -> NormalizedDocument {
    let text = decode_bytes(raw);
    let chars: Vec<char> = text.chars().collect();
    let mut lx = Lexer {
        chars: &chars,
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    };
    lx.run();
    NormalizedDocument::from_tokens(doc_id, raw, lx.tokens, lx.diagnostics)
}

struct Lexer<'a> {
    chars: &'a [char],
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
    diagnostics: Vec<LexDiagnostic>,
}

impl Lexer<'_> {
    fn run(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' | '\n' | '\x0b' | '\x0c' => {
                    self.bump();
                }
                '/' if self.peek_at(1) == Some('/') => self.line_comment(),
                '/' if self.peek_at(1) == Some('*') => self.block_comment(),
                '"' => self.string_like('"', TokenKind::Str),
                '\'' => self.string_like('\'', TokenKind::CharLit),
                c if c.is_ascii_digit() => self.number(),
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number(),
                c if c.is_alphabetic() || c == '_' => self.word(),
                _ => self.operator(),
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn emit_at(&mut self, kind: TokenKind, line: u32, col: u32) {
        self.tokens.push(Token { kind, line, col });
    }

    fn line_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn block_comment(&mut self) {
        let (line, col) = (self.line, self.col);
        self.bump();
        self.bump();
        loop {
            match self.peek() {
                Some('*') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    return;
                }
                Some(_) => {
                    self.bump();
                }
                None => {
                    self.diagnostics.push(LexDiagnostic {
                        line,
                        col,
                        message: "unterminated block comment".into(),
                    });
                    return;
                }
            }
        }
    }

    /// Shared scanner for string and character literals. On a newline before
    /// the closing quote, records a diagnostic, emits the token anyway, and
    /// resumes at the next line so one bad literal cannot derail the stream.
    fn string_like(&mut self, quote: char, kind: TokenKind) {
        let (line, col) = (self.line, self.col);
        self.bump();
        loop {
            match self.peek() {
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some(c) if c == quote => {
                    self.bump();
                    break;
                }
                Some('\n') | None => {
                    self.diagnostics.push(LexDiagnostic {
                        line,
                        col,
                        message: format!("unterminated {quote}-literal"),
                    });
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.emit_at(kind, line, col);
    }

    /// Preprocessing-number scan: digits, letters, dots, and sign characters
    /// after an exponent marker. Covers suffixed ints, floats, and hex.
    fn number(&mut self) {
        let (line, col) = (self.line, self.col);
        self.bump();
        while let Some(c) = self.peek() {
            let exp_sign = (c == '+' || c == '-')
                && self
                    .chars
                    .get(self.pos.wrapping_sub(1))
                    .is_some_and(|p| matches!(p, 'e' | 'E' | 'p' | 'P'));
            if c.is_ascii_alphanumeric() || c == '.' || c == '_' || exp_sign {
                self.bump();
            } else {
                break;
            }
        }
        self.emit_at(TokenKind::Num, line, col);
    }

    fn word(&mut self) {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        let spelling: String = self.chars[start..self.pos].iter().collect();
        let kind = match keyword(&spelling) {
            Some(kw) => TokenKind::Kw(kw),
            None if spelling == "true" || spelling == "false" => TokenKind::BoolLit,
            None => TokenKind::Id,
        };
        self.emit_at(kind, line, col);
    }

    fn operator(&mut self) {
        let (line, col) = (self.line, self.col);
        // Longest match first over the three-, two-, then one-character table.
        for len in (1..=3).rev() {
            if self.pos + len > self.chars.len() {
                continue;
            }
            let slice: String = self.chars[self.pos..self.pos + len].iter().collect();
            if let Some(op) = operator_table(&slice) {
                for _ in 0..len {
                    self.bump();
                }
                self.emit_at(TokenKind::Op(op), line, col);
                return;
            }
        }
        let c = self.bump().expect("operator called at end of input");
        self.emit_at(TokenKind::Other(c as u32), line, col);
    }
}

fn keyword(s: &str) -> Option<Keyword> {
    use Keyword::*;
    Some(match s {
        "auto" => Auto,
        "break" => Break,
        "case" => Case,
        "char" => Char,
        "const" => Const,
        "continue" => Continue,
        "default" => Default,
        "do" => Do,
        "double" => Double,
        "else" => Else,
        "enum" => Enum,
        "extern" => Extern,
        "float" => Float,
        "for" => For,
        "goto" => Goto,
        "if" => If,
        "inline" => Inline,
        "int" => Int,
        "long" => Long,
        "register" => Register,
        "restrict" => Restrict,
        "return" => Return,
        "short" => Short,
        "signed" => Signed,
        "sizeof" => Sizeof,
        "static" => Static,
        "struct" => Struct,
        "switch" => Switch,
        "typedef" => Typedef,
        "union" => Union,
        "unsigned" => Unsigned,
        "void" => Void,
        "volatile" => Volatile,
        "while" => While,
        "bool" | "_Bool" => Bool,
        "_Complex" => Complex,
        "_Imaginary" => Imaginary,
        _ => return None,
    })
}

fn operator_table(s: &str) -> Option<Op> {
    use Op::*;
    Some(match s {
        "(" => LParen,
        ")" => RParen,
        "{" => LBrace,
        "}" => RBrace,
        "[" => LBracket,
        "]" => RBracket,
        ";" => Semi,
        "," => Comma,
        "." => Dot,
        "->" => Arrow,
        "++" => Inc,
        "--" => Dec,
        "&" => Amp,
        "*" => Star,
        "+" => Plus,
        "-" => Minus,
        "~" => Tilde,
        "!" => Bang,
        "/" => Slash,
        "%" => Percent,
        "<<" => Shl,
        ">>" => Shr,
        "<" => Lt,
        ">" => Gt,
        "<=" => Le,
        ">=" => Ge,
        "==" => EqEq,
        "!=" => Ne,
        "^" => Caret,
        "|" => Pipe,
        "&&" => AndAnd,
        "||" => OrOr,
        "?" => Question,
        ":" => Colon,
        "=" => Eq,
        "*=" => StarEq,
        "/=" => SlashEq,
        "%=" => PercentEq,
        "+=" => PlusEq,
        "-=" => MinusEq,
        "<<=" => ShlEq,
        ">>=" => ShrEq,
        "&=" => AmpEq,
        "^=" => CaretEq,
        "|=" => PipeEq,
        "#" => Hash,
        "##" => HashHash,
        "..." => Ellipsis,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexnorm::TokenKind as K;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize_c("t", src.as_bytes()).kinds()
    }

    #[test]
    fn two_statement_example() {
        let doc = tokenize_c("t", b"int hello = 0;\nreturn hello;");
        assert_eq!(
            doc.kinds(),
            vec![
                K::TYP_INT,
                K::ID,
                K::EQ,
                K::NUM,
                K::SEMI,
                K::RET,
                K::ID,
                K::SEMI
            ]
        );
        assert_eq!(doc.line_count, 2);
        assert!(doc.diagnostics.is_empty());
        let lines: Vec<u32> = doc.tokens.iter().map(|t| t.line).collect();
        assert_eq!(lines, vec![1, 1, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn bool_declaration_example() {
        let doc = tokenize_c("t", b"bool nothing = true;");
        assert_eq!(
            doc.kinds(),
            vec![K::TYP_BOOL, K::ID, K::EQ, K::BOOL, K::SEMI]
        );
    }

    #[test]
    fn identifier_rename_is_invisible() {
        assert_eq!(kinds("int abc = x + y;"), kinds("int q = first + second;"));
    }

    #[test]
    fn comments_and_whitespace_are_invisible() {
        let a = kinds("int x = 0; // trailing\n/* block */ return x;");
        let b = kinds("int    y=0;return y;");
        assert_eq!(a, b);
    }

    #[test]
    fn comment_only_lines_do_not_count() {
        let doc = tokenize_c("t", b"// header\n\nint x;\n/* note */\nreturn x;\n");
        assert_eq!(doc.line_count, 2);
        assert_eq!(doc.token_lines(), vec![3, 5]);
    }

    #[test]
    fn literals_collapse_per_family() {
        assert_eq!(kinds("\"a\""), kinds("\"completely different\""));
        assert_eq!(kinds("'x'"), kinds("'\\n'"));
        assert_eq!(kinds("12"), kinds("0xFF_3e7"));
        assert_eq!(kinds("1.5e-3"), kinds("2.0f"));
        assert_ne!(kinds("\"a\""), kinds("'a'"));
    }

    #[test]
    fn operators_longest_match() {
        assert_eq!(
            kinds("a <<= b >> c <= d"),
            vec![
                K::ID,
                K::Op(Op::ShlEq),
                K::ID,
                K::Op(Op::Shr),
                K::ID,
                K::Op(Op::Le),
                K::ID
            ]
        );
        assert_eq!(kinds("..."), vec![K::Op(Op::Ellipsis)]);
        assert_eq!(kinds(". ."), vec![K::Op(Op::Dot), K::Op(Op::Dot)]);
    }

    #[test]
    fn preprocessor_lines_lex_as_tokens() {
        let ks = kinds("#include <stdio.h>");
        assert_eq!(ks[0], K::Op(Op::Hash));
        assert!(ks.contains(&K::Op(Op::Lt)));
        assert!(ks.contains(&K::Op(Op::Gt)));
    }

    #[test]
    fn unterminated_string_recovers_on_next_line() {
        let doc = tokenize_c("t", b"char *s = \"oops;\nint x = 1;\n");
        assert_eq!(doc.diagnostics.len(), 1);
        assert!(doc.diagnostics[0].message.contains("unterminated"));
        // The next line still tokenizes normally.
        let tail: Vec<TokenKind> = doc
            .tokens
            .iter()
            .filter(|t| t.line == 2)
            .map(|t| t.kind)
            .collect();
        assert_eq!(tail, vec![K::TYP_INT, K::ID, K::EQ, K::NUM, K::SEMI]);
    }

    #[test]
    fn unterminated_block_comment_is_diagnosed() {
        let doc = tokenize_c("t", b"int x; /* no close");
        assert_eq!(doc.diagnostics.len(), 1);
        assert_eq!(doc.kinds(), vec![K::TYP_INT, K::ID, K::SEMI]);
    }

    #[test]
    fn empty_and_bytes_inputs_are_total() {
        assert!(tokenize_c("t", b"").tokens.is_empty());
        assert_eq!(tokenize_c("t", b"").line_count, 0);
        // Invalid UTF-8 decodes via Latin-1 and still tokenizes.
        let doc = tokenize_c("t", &[0xffu8, 0x20, 0x69, 0x6e, 0x74]);
        assert!(doc.kinds().contains(&K::TYP_INT));
    }

    #[test]
    fn deterministic() {
        let src = include_str!("c.rs").as_bytes();
        assert_eq!(tokenize_c("a", src), tokenize_c("a", src));
    }
}
