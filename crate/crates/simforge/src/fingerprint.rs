//! K-gram hashing and winnowing.
//!
//! A document's token-class stream becomes overlapping k-grams, each k-gram
//! becomes one 64-bit rolling hash, and winnowing selects a small positional
//! subset of those hashes as the document's fingerprints. Two guarantees
//! drive every parameter choice:
//!
//! * any shared token run of at least `t` tokens yields at least one shared
//!   fingerprint (every window of `w = t - k + 1` hashes contributes one
//!   selection), and
//! * no shared run shorter than `k` tokens can match (no complete shared
//!   k-gram exists).
//!
//! [`winnow`] operates on plain hash slices so callers can substitute any
//! hash assignment; that seam is how the worked textbook examples with
//! small two-digit hash values are replayed exactly in tests.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lexnorm::NormalizedDocument;

/// Base of the polynomial rolling hash. Arithmetic wraps mod 2^64.
const HASH_BASE: u64 = 1_000_003;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FingerprintError {
    #[error("invalid fingerprint params: need 1 <= k <= t, got k={k} t={t}")]
    InvalidParams { k: u32, t: u32 },
    #[error("fingerprint parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Noise threshold `k` and guarantee threshold `t`, both in tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FingerprintParams {
    k: u32,
    t: u32,
}

impl FingerprintParams {
    /// Defaults: a window of 15 hashes spans roughly three to four lines of
    /// typical C at six to eight tokens per line.
    pub const DEFAULT_K: u32 = 16;
    pub const DEFAULT_T: u32 = 30;

    pub fn new(k: u32, t: u32) -> Result<Self, FingerprintError> {
        if k < 1 || t < k {
            return Err(FingerprintError::InvalidParams { k, t });
        }
        Ok(FingerprintParams { k, t })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Window length in hashes: `t - k + 1`.
    pub fn w(&self) -> u32 {
        self.t - self.k + 1
    }
}

impl Default for FingerprintParams {
    fn default() -> Self {
        FingerprintParams {
            k: Self::DEFAULT_K,
            t: Self::DEFAULT_T,
        }
    }
}

/// One selected hash with the position of its originating k-gram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    pub hash: u64,
    /// Index of the k-gram's first token in the normalized stream.
    pub token_index: u32,
    /// First source line the k-gram touches.
    pub line_start: u32,
    /// Last source line the k-gram touches.
    pub line_end: u32,
}

/// The winnowed fingerprints of one document, plus the line facts scoring
/// needs (`line_count` is the denominator of match percentages).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintSet {
    pub doc_id: String,
    pub params: FingerprintParams,
    pub prints: Vec<Fingerprint>,
    /// Count of source lines carrying at least one token.
    pub line_count: u32,
    /// Sorted distinct source lines carrying at least one token.
    pub token_lines: Vec<u32>,
}

/// Rolling polynomial hash of every k-gram of `codes`.
///
/// Position `i` hashes `codes[i..i+k]` as `sum(codes[i+j] * BASE^(k-1-j))`
/// wrapping mod 2^64. Returns `max(0, len - k + 1)` hashes; inputs shorter
/// than `k` produce none.
pub fn kgram_hashes(codes: &[u64], k: u32) -> Vec<u64> {
    let k = k as usize;
    assert!(k >= 1, "k-gram length must be at least 1");
    if codes.len() < k {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(codes.len() - k + 1);
    // BASE^(k-1), for removing the outgoing token.
    let top = HASH_BASE.wrapping_pow(k as u32 - 1);
    let mut h: u64 = 0;
    for &c in &codes[..k] {
        h = h.wrapping_mul(HASH_BASE).wrapping_add(c);
    }
    out.push(h);
    for i in k..codes.len() {
        h = h
            .wrapping_sub(codes[i - k].wrapping_mul(top))
            .wrapping_mul(HASH_BASE)
            .wrapping_add(codes[i]);
        out.push(h);
    }
    out
}

/// Winnows a hash sequence: slide a window of `w` consecutive hashes, select
/// the minimum of each window taking the rightmost on ties, and record each
/// selected (value, position) once even when consecutive windows agree.
///
/// Fewer than `w` hashes collapse to one global-minimum selection; empty
/// input selects nothing. Returns `(hash_index, value)` pairs in position
/// order.
pub fn winnow(hashes: &[u64], w: u32) -> Vec<(usize, u64)> {
    let w = w as usize;
    assert!(w >= 1, "window length must be at least 1");
    if hashes.is_empty() {
        return Vec::new();
    }
    let windows = hashes.len().saturating_sub(w - 1).max(1);
    let mut out: Vec<(usize, u64)> = Vec::new();
    for start in 0..windows {
        let end = (start + w).min(hashes.len());
        let mut best = start;
        for i in start + 1..end {
            // `<=` keeps the rightmost occurrence of the minimum.
            if hashes[i] <= hashes[best] {
                best = i;
            }
        }
        let pick = (best, hashes[best]);
        if out.last() != Some(&pick) {
            out.push(pick);
        }
    }
    out
}

/// Full pipeline: token-class codes, k-gram hashes, winnowing, line spans.
pub fn fingerprint_document(doc: &NormalizedDocument, params: FingerprintParams) -> FingerprintSet {
    let codes: Vec<u64> = doc.tokens.iter().map(|t| t.kind.code()).collect();
    let hashes = kgram_hashes(&codes, params.k());
    let k = params.k() as usize;
    let prints = winnow(&hashes, params.w())
        .into_iter()
        .map(|(idx, hash)| Fingerprint {
            hash,
            token_index: idx as u32,
            line_start: doc.tokens[idx].line,
            line_end: doc.tokens[idx + k - 1].line,
        })
        .collect();
    FingerprintSet {
        doc_id: doc.doc_id.clone(),
        params,
        prints,
        line_count: doc.line_count,
        token_lines: doc.token_lines(),
    }
}

impl FingerprintSet {
    /// Line-oriented text form: one `doc_id<TAB>hash<TAB>token_index<TAB>
    /// line_start<TAB>line_end` record per fingerprint, preceded by a `#`
    /// header carrying params and line facts so the set round-trips.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# set\t{}\tk={}\tt={}\tline_count={}\ttoken_lines={}",
            self.doc_id,
            self.params.k(),
            self.params.t(),
            self.line_count,
            encode_lines(&self.token_lines),
        );
        for p in &self.prints {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                self.doc_id, p.hash, p.token_index, p.line_start, p.line_end
            );
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<FingerprintSet, FingerprintError> {
        let parse = |line: usize, msg: &str| FingerprintError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut header: Option<(String, FingerprintParams, u32, Vec<u32>)> = None;
        let mut prints = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            if raw.is_empty() {
                continue;
            }
            if let Some(rest) = raw.strip_prefix("# set\t") {
                let fields: Vec<&str> = rest.split('\t').collect();
                if fields.len() != 5 {
                    return Err(parse(lineno, "malformed set header"));
                }
                let get = |i: usize, pfx: &str| -> Result<&str, FingerprintError> {
                    fields[i]
                        .strip_prefix(pfx)
                        .ok_or_else(|| parse(lineno, &format!("expected {pfx} field")))
                };
                let k: u32 = get(1, "k=")?.parse().map_err(|_| parse(lineno, "bad k"))?;
                let t: u32 = get(2, "t=")?.parse().map_err(|_| parse(lineno, "bad t"))?;
                let line_count: u32 = get(3, "line_count=")?
                    .parse()
                    .map_err(|_| parse(lineno, "bad line_count"))?;
                let token_lines = decode_lines(get(4, "token_lines=")?)
                    .ok_or_else(|| parse(lineno, "bad token_lines"))?;
                header = Some((
                    fields[0].to_string(),
                    FingerprintParams::new(k, t)?,
                    line_count,
                    token_lines,
                ));
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 5 {
                return Err(parse(lineno, "expected 5 tab-separated fields"));
            }
            let num = |i: usize| -> Result<u64, FingerprintError> {
                fields[i]
                    .parse()
                    .map_err(|_| parse(lineno, &format!("bad number {:?}", fields[i])))
            };
            prints.push(Fingerprint {
                hash: num(1)?,
                token_index: num(2)? as u32,
                line_start: num(3)? as u32,
                line_end: num(4)? as u32,
            });
        }
        let (doc_id, params, line_count, token_lines) =
            header.ok_or_else(|| parse(0, "missing set header"))?;
        Ok(FingerprintSet {
            doc_id,
            params,
            prints,
            line_count,
            token_lines,
        })
    }
}

/// Compact range encoding for sorted line lists: `1-4,7,9-12`.
fn encode_lines(lines: &[u32]) -> String {
    let mut s = String::new();
    let mut i = 0;
    while i < lines.len() {
        let start = lines[i];
        let mut end = start;
        while i + 1 < lines.len() && lines[i + 1] == end + 1 {
            end = lines[i + 1];
            i += 1;
        }
        if !s.is_empty() {
            s.push(',');
        }
        if start == end {
            let _ = write!(s, "{start}");
        } else {
            let _ = write!(s, "{start}-{end}");
        }
        i += 1;
    }
    s
}

fn decode_lines(s: &str) -> Option<Vec<u32>> {
    let mut out = Vec::new();
    if s.is_empty() {
        return Some(out);
    }
    for part in s.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u32 = a.parse().ok()?;
                let b: u32 = b.parse().ok()?;
                if b < a {
                    return None;
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().ok()?),
        }
    }
    Some(out)
}
