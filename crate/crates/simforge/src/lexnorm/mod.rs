//! Normalization: raw source text to token-class streams.
//!
//! Two tokenizers share one output type. [`tokenize_c`] handles C-family
//! source: it drops whitespace and comments, folds every identifier into a
//! single `ID` class and every literal into a per-family class, and keeps
//! distinct classes for distinct keywords and operators. [`tokenize_asm`]
//! handles compiler-emitted assembly, where register and label *names* stay
//! significant and build-metadata directives are dropped.
//!
//! Both are total: arbitrary bytes in, deterministic token stream out.
//! Lexical damage (unterminated strings or comments) is reported as a
//! recoverable diagnostic on the document, never an error.

mod asm;
mod c;

use std::fmt;

use sha2::{Digest, Sha256};

pub use asm::tokenize_asm;
pub use c::tokenize_c;

/// C keywords, each its own token class (C89 plus common C99 additions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Keyword {
    Auto,
    Break,
    Case,
    Char,
    Const,
    Continue,
    Default,
    Do,
    Double,
    Else,
    Enum,
    Extern,
    Float,
    For,
    Goto,
    If,
    Inline,
    Int,
    Long,
    Register,
    Restrict,
    Return,
    Short,
    Signed,
    Sizeof,
    Static,
    Struct,
    Switch,
    Typedef,
    Union,
    Unsigned,
    Void,
    Volatile,
    While,
    Bool,
    Complex,
    Imaginary,
}

/// Operators and punctuators, each its own token class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Op {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Arrow,
    Inc,
    Dec,
    Amp,
    Star,
    Plus,
    Minus,
    Tilde,
    Bang,
    Slash,
    Percent,
    Shl,
    Shr,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Caret,
    Pipe,
    AndAnd,
    OrOr,
    Question,
    Colon,
    Eq,
    StarEq,
    SlashEq,
    PercentEq,
    PlusEq,
    MinusEq,
    ShlEq,
    ShrEq,
    AmpEq,
    CaretEq,
    PipeEq,
    Hash,
    HashHash,
    Ellipsis,
}

/// Token class. Identifiers all collapse to [`TokenKind::Id`], so renaming a
/// variable cannot change the stream; literals collapse per family.
///
/// Assembly classes carry a 32-bit spelling code because there the concrete
/// mnemonic, register, or label name is what distinguishes documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Kw(Keyword),
    Op(Op),
    /// Any identifier, regardless of spelling.
    Id,
    /// Integer or floating literal.
    Num,
    /// String literal.
    Str,
    /// Character literal.
    CharLit,
    /// `true` or `false`.
    BoolLit,
    /// Other single character with no class of its own (`@`, `` ` ``, ...).
    Other(u32),
    /// Assembly instruction mnemonic, keyed by spelling.
    Mnemonic(u32),
    /// Assembly register, keyed by spelling.
    Register(u32),
    /// Assembly label definition or reference, keyed by spelling.
    Label(u32),
    /// Assembler directive, keyed by spelling.
    Directive(u32),
}

impl TokenKind {
    // Shorthands matching the tags used in display output.
    pub const TYP_INT: TokenKind = TokenKind::Kw(Keyword::Int);
    pub const TYP_BOOL: TokenKind = TokenKind::Kw(Keyword::Bool);
    pub const RET: TokenKind = TokenKind::Kw(Keyword::Return);
    pub const EQ: TokenKind = TokenKind::Op(Op::Eq);
    pub const SEMI: TokenKind = TokenKind::Op(Op::Semi);
    pub const ID: TokenKind = TokenKind::Id;
    pub const NUM: TokenKind = TokenKind::Num;
    pub const STR: TokenKind = TokenKind::Str;
    pub const BOOL: TokenKind = TokenKind::BoolLit;

    /// Stable numeric code fed to the rolling hash. Fixed by hand so that
    /// fingerprints are reproducible across runs, platforms, and releases.
    pub fn code(self) -> u64 {
        match self {
            TokenKind::Id => 1,
            TokenKind::Num => 2,
            TokenKind::Str => 3,
            TokenKind::CharLit => 4,
            TokenKind::BoolLit => 5,
            TokenKind::Kw(k) => 0x100 + k as u64,
            TokenKind::Op(o) => 0x200 + o as u64,
            TokenKind::Other(c) => 0x300_0000 + c as u64,
            TokenKind::Mnemonic(s) => 0x1_0000_0000 | s as u64,
            TokenKind::Register(s) => 0x2_0000_0000 | s as u64,
            TokenKind::Label(s) => 0x3_0000_0000 | s as u64,
            TokenKind::Directive(s) => 0x4_0000_0000 | s as u64,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Keyword::*;
        match self {
            TokenKind::Kw(k) => {
                let tag = match k {
                    Char => "TYP_CHAR",
                    Double => "TYP_DOUBLE",
                    Float => "TYP_FLOAT",
                    Int => "TYP_INT",
                    Long => "TYP_LONG",
                    Short => "TYP_SHORT",
                    Signed => "TYP_SIGNED",
                    Unsigned => "TYP_UNSIGNED",
                    Void => "TYP_VOID",
                    Bool => "TYP_BOOL",
                    Return => "RET",
                    Auto => "AUTO",
                    Break => "BREAK",
                    Case => "CASE",
                    Const => "CONST",
                    Continue => "CONTINUE",
                    Default => "DEFAULT",
                    Do => "DO",
                    Else => "ELSE",
                    Enum => "ENUM",
                    Extern => "EXTERN",
                    For => "FOR",
                    Goto => "GOTO",
                    If => "IF",
                    Inline => "INLINE",
                    Register => "REGISTER",
                    Restrict => "RESTRICT",
                    Sizeof => "SIZEOF",
                    Static => "STATIC",
                    Struct => "STRUCT",
                    Switch => "SWITCH",
                    Typedef => "TYPEDEF",
                    Union => "UNION",
                    Volatile => "VOLATILE",
                    While => "WHILE",
                    Complex => "TYP_COMPLEX",
                    Imaginary => "TYP_IMAGINARY",
                };
                f.write_str(tag)
            }
            TokenKind::Op(o) => {
                use Op::*;
                let tag = match o {
                    LParen => "LPAREN",
                    RParen => "RPAREN",
                    LBrace => "LBRACE",
                    RBrace => "RBRACE",
                    LBracket => "LBRACKET",
                    RBracket => "RBRACKET",
                    Semi => "SEMI",
                    Comma => "COMMA",
                    Dot => "DOT",
                    Arrow => "ARROW",
                    Inc => "INC",
                    Dec => "DEC",
                    Amp => "AMP",
                    Star => "STAR",
                    Plus => "PLUS",
                    Minus => "MINUS",
                    Tilde => "TILDE",
                    Bang => "BANG",
                    Slash => "SLASH",
                    Percent => "PERCENT",
                    Shl => "SHL",
                    Shr => "SHR",
                    Lt => "LT",
                    Gt => "GT",
                    Le => "LE",
                    Ge => "GE",
                    EqEq => "EQEQ",
                    Ne => "NE",
                    Caret => "CARET",
                    Pipe => "PIPE",
                    AndAnd => "ANDAND",
                    OrOr => "OROR",
                    Question => "QUESTION",
                    Colon => "COLON",
                    Eq => "EQ",
                    StarEq => "STAREQ",
                    SlashEq => "SLASHEQ",
                    PercentEq => "PERCENTEQ",
                    PlusEq => "PLUSEQ",
                    MinusEq => "MINUSEQ",
                    ShlEq => "SHLEQ",
                    ShrEq => "SHREQ",
                    AmpEq => "AMPEQ",
                    CaretEq => "CARETEQ",
                    PipeEq => "PIPEEQ",
                    Hash => "HASH",
                    HashHash => "HASHHASH",
                    Ellipsis => "ELLIPSIS",
                };
                f.write_str(tag)
            }
            TokenKind::Id => f.write_str("ID"),
            TokenKind::Num => f.write_str("NUM"),
            TokenKind::Str => f.write_str("STR"),
            TokenKind::CharLit => f.write_str("CHAR"),
            TokenKind::BoolLit => f.write_str("BOOL"),
            TokenKind::Other(c) => write!(f, "OTHER({c:#x})"),
            TokenKind::Mnemonic(s) => write!(f, "MNEMONIC({s:08x})"),
            TokenKind::Register(s) => write!(f, "REG({s:08x})"),
            TokenKind::Label(s) => write!(f, "LABEL({s:08x})"),
            TokenKind::Directive(s) => write!(f, "DIRECTIVE({s:08x})"),
        }
    }
}

/// One normalized token with its position in the originating document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based source line.
    pub line: u32,
    /// 1-based column (in characters).
    pub col: u32,
}

/// Recoverable lexical damage noted while tokenizing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexDiagnostic {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

/// A document reduced to its normalized token stream.
///
/// `line_count` counts the source lines that carry at least one token, i.e.
/// code lines; blank and comment-only lines do not distinguish documents and
/// do not enter similarity percentages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedDocument {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    pub line_count: u32,
    /// SHA-256 of the raw input bytes, hex-encoded.
    pub source_digest: String,
    pub diagnostics: Vec<LexDiagnostic>,
}

impl NormalizedDocument {
    pub(crate) fn from_tokens(
        doc_id: impl Into<String>,
        raw: &[u8],
        tokens: Vec<Token>,
        diagnostics: Vec<LexDiagnostic>,
    ) -> Self {
        let line_count = count_distinct_lines(&tokens);
        NormalizedDocument {
            doc_id: doc_id.into(),
            tokens,
            line_count,
            source_digest: hex_digest(raw),
            diagnostics,
        }
    }

    /// Builds a document directly from token classes, one synthetic line per
    /// eight tokens. Intended for generated streams in tests and experiments
    /// where no source text exists.
    pub fn synthetic(doc_id: impl Into<String>, kinds: Vec<TokenKind>) -> Self {
        let tokens: Vec<Token> = kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| Token {
                kind,
                line: (i / 8) as u32 + 1,
                col: (i % 8) as u32 + 1,
            })
            .collect();
        let line_count = count_distinct_lines(&tokens);
        NormalizedDocument {
            doc_id: doc_id.into(),
            tokens,
            line_count,
            source_digest: String::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn kinds(&self) -> Vec<TokenKind> {
        self.tokens.iter().map(|t| t.kind).collect()
    }

    /// Sorted, distinct source lines that carry at least one token.
    pub fn token_lines(&self) -> Vec<u32> {
        let mut lines: Vec<u32> = self.tokens.iter().map(|t| t.line).collect();
        lines.sort_unstable();
        lines.dedup();
        lines
    }
}

fn count_distinct_lines(tokens: &[Token]) -> u32 {
    let mut lines: Vec<u32> = tokens.iter().map(|t| t.line).collect();
    lines.sort_unstable();
    lines.dedup();
    lines.len() as u32
}

pub(crate) fn hex_digest(raw: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(raw);
    let out = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        use fmt::Write;
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Decodes bytes as UTF-8, falling back to Latin-1 when the input is not
/// valid UTF-8. Never fails.
pub(crate) fn decode_bytes(raw: &[u8]) -> String {
    match std::str::from_utf8(raw) {
        Ok(s) => s.to_owned(),
        Err(_) => raw.iter().map(|&b| b as char).collect(),
    }
}

/// FNV-1a over the spelling, used to key assembly token classes.
pub(crate) fn spelling_code(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.as_bytes() {
        h ^= *b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}
