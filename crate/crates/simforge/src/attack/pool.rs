//! The mutation pool: candidate lines and the syntactic selection filter.

use rand::Rng;

use crate::lexnorm::tokenize_c;

/// Where a pool line came from. Proven lines were accepted by the
/// equivalence check earlier in the same run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Source,
    Entropy,
    Proven,
}

#[derive(Debug, Clone)]
pub struct PoolEntry {
    pub text: String,
    pub origin: Origin,
    /// Cached result of the selection filter; the filter depends only on
    /// the text.
    passes: bool,
}

/// Candidate insertion lines. Duplicates are kept on purpose: a line added
/// repeatedly (source duplicates, proven re-additions) is proportionally
/// more likely to be selected.
#[derive(Debug, Clone, Default)]
pub struct MutationPool {
    entries: Vec<PoolEntry>,
}

impl MutationPool {
    /// Seeds from every token-bearing line of the input program, plus every
    /// token-bearing line of the entropy text if given. Blank and
    /// comment-only lines carry no tokens and are excluded.
    pub fn seed(base_source: &str, entropy: Option<&str>) -> MutationPool {
        let mut pool = MutationPool::default();
        for line in token_bearing_lines(base_source) {
            pool.push(line, Origin::Source);
        }
        if let Some(extra) = entropy {
            for line in token_bearing_lines(extra) {
                pool.push(line, Origin::Entropy);
            }
        }
        pool
    }

    pub fn push(&mut self, text: String, origin: Origin) {
        let passes = passes_filter(&text);
        self.entries.push(PoolEntry {
            text,
            origin,
            passes,
        });
    }

    pub fn add_proven(&mut self, text: String) {
        self.push(text, Origin::Proven);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    /// Uniform selection over filter-passing entries. `None` means nothing
    /// in the pool can ever be selected.
    pub fn select<R: Rng>(&self, rng: &mut R) -> Option<&PoolEntry> {
        let passing: Vec<&PoolEntry> = self.entries.iter().filter(|e| e.passes).collect();
        if passing.is_empty() {
            return None;
        }
        Some(passing[rng.gen_range(0..passing.len())])
    }

    pub fn selectable(&self) -> usize {
        self.entries.iter().filter(|e| e.passes).count()
    }
}

fn token_bearing_lines(source: &str) -> Vec<String> {
    let doc = tokenize_c("pool", source.as_bytes());
    let lines: Vec<&str> = source.lines().collect();
    doc.token_lines()
        .into_iter()
        .filter_map(|l| lines.get(l as usize - 1))
        .map(|l| l.trim().to_string())
        .collect()
}

/// Syntactic candidate filter.
///
/// A candidate must be a complete unit: it ends with `;` or `}` and its
/// braces, parens, and brackets balance. Output calls (the printf family)
/// are rejected because they always survive optimization. Flow-control
/// fragments that cannot stand alone (`else`, `case`, `default`, `do`,
/// bare `break`/`continue`/`goto`) are rejected to avoid guaranteed
/// compile failures or semantic changes. Anything else is allowed through;
/// the equivalence check is the real gatekeeper.
pub fn passes_filter(line: &str) -> bool {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return false;
    }
    if !(trimmed.ends_with(';') || trimmed.ends_with('}')) {
        return false;
    }
    if !delimiters_balance(trimmed) {
        return false;
    }
    if PRINT_FAMILY.iter().any(|f| contains_word(trimmed, f)) {
        return false;
    }
    let first = first_word(trimmed);
    if matches!(
        first,
        "else" | "case" | "default" | "do" | "break" | "continue" | "goto"
    ) {
        return false;
    }
    // Preprocessor lines are not statements.
    if trimmed.starts_with('#') {
        return false;
    }
    true
}

const PRINT_FAMILY: &[&str] = &[
    "printf", "fprintf", "sprintf", "snprintf", "vprintf", "vfprintf", "puts", "fputs", "putchar",
    "putc", "fputc", "perror", "fwrite",
];

/// Brace/paren/bracket balance outside string and character literals.
fn delimiters_balance(s: &str) -> bool {
    let (mut brace, mut paren, mut bracket) = (0i32, 0i32, 0i32);
    let mut chars = s.chars().peekable();
    let mut in_str: Option<char> = None;
    while let Some(c) = chars.next() {
        if let Some(q) = in_str {
            if c == '\\' {
                chars.next();
            } else if c == q {
                in_str = None;
            }
            continue;
        }
        match c {
            '"' | '\'' => in_str = Some(c),
            '{' => brace += 1,
            '}' => brace -= 1,
            '(' => paren += 1,
            ')' => paren -= 1,
            '[' => bracket += 1,
            ']' => bracket -= 1,
            '/' if chars.peek() == Some(&'/') => break,
            _ => {}
        }
        if brace < 0 || paren < 0 || bracket < 0 {
            return false;
        }
    }
    brace == 0 && paren == 0 && bracket == 0
}

pub(crate) fn contains_word(haystack: &str, word: &str) -> bool {
    let bytes = haystack.as_bytes();
    let mut start = 0;
    while let Some(pos) = haystack[start..].find(word) {
        let at = start + pos;
        let end = at + word.len();
        let boundary_before = at == 0 || !is_word_byte(bytes[at - 1]);
        let boundary_after = end == bytes.len() || !is_word_byte(bytes[end]);
        if boundary_before && boundary_after {
            return true;
        }
        start = at + 1;
    }
    false
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn first_word(s: &str) -> &str {
    let start = s.find(|c: char| c.is_alphanumeric() || c == '_');
    match start {
        Some(i) => {
            let rest = &s[i..];
            let end = rest
                .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            &rest[..end]
        }
        None => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeding_excludes_blank_and_comment_lines() {
        let src =
            "// header\nint main(void) {\n\n  int x = 1; // note\n  /* gone */\n  return x;\n}\n";
        let pool = MutationPool::seed(src, None);
        let texts: Vec<&str> = pool.entries().iter().map(|e| e.text.as_str()).collect();
        assert_eq!(
            texts,
            vec!["int main(void) {", "int x = 1; // note", "return x;", "}"]
        );
        assert!(pool.entries().iter().all(|e| e.origin == Origin::Source));
    }

    #[test]
    fn entropy_lines_append_with_their_tag() {
        let pool = MutationPool::seed("int x;\n", Some("int i = 0;\nint j = 0;\n"));
        assert_eq!(pool.len(), 3);
        let entropy: Vec<&PoolEntry> = pool
            .entries()
            .iter()
            .filter(|e| e.origin == Origin::Entropy)
            .collect();
        assert_eq!(entropy.len(), 2);
    }

    #[test]
    fn bundled_entropy_has_about_thirty_lines() {
        let n = token_bearing_lines(crate::attack::default_entropy()).len();
        assert!((28..=32).contains(&n), "entropy file has {n} lines");
    }

    #[test]
    fn filter_accepts_plain_statements() {
        for line in [
            "int i = 0;",
            "x = y + 1;",
            "return 0;",
            "if (x) { y = 1; }",
            "struct point p = { 0, 0 };",
            "for (i = 0; i < n; i++) { s += i; }",
        ] {
            assert!(passes_filter(line), "{line:?} should pass");
        }
    }

    #[test]
    fn filter_rejects_incomplete_and_flow_fragments() {
        for line in [
            "",
            "int main(void) {",
            "}",
            "x = y +",
            "else {",
            "case 3:",
            "default:;",
            "break;",
            "continue;",
            "goto done;",
            "do {",
            "#include <stdio.h>",
        ] {
            assert!(!passes_filter(line), "{line:?} should be rejected");
        }
    }

    #[test]
    fn filter_rejects_print_family() {
        for line in [
            "printf(\"x\");",
            "fprintf(stderr, \"%d\", x);",
            "puts(\"hello\");",
            "putchar('\\n');",
        ] {
            assert!(!passes_filter(line), "{line:?} should be rejected");
        }
        // Identifiers merely containing a print name as a substring pass.
        assert!(passes_filter("int sprintf_count = 0;"));
    }

    #[test]
    fn singleton_pool_selects_its_line() {
        let mut pool = MutationPool::default();
        pool.push("int i = 0;".into(), Origin::Source);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(pool.select(&mut rng).unwrap().text, "int i = 0;");
    }

    #[test]
    fn all_filtered_pool_is_exhausted() {
        let mut pool = MutationPool::default();
        pool.push("printf(\"x\");".into(), Origin::Source);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(pool.select(&mut rng).is_none());
        assert_eq!(pool.selectable(), 0);
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn selection_replays_under_a_fixed_seed() {
        let src = "int a = 1;\nint b = 2;\nint c = 3;\nint d = 4;\n";
        let pool = MutationPool::seed(src, None);
        let draw = |seed: u64| -> Vec<String> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| pool.select(&mut rng).unwrap().text.clone())
                .collect()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn duplicates_raise_selection_weight() {
        let mut pool = MutationPool::default();
        pool.push("int rare = 0;".into(), Origin::Source);
        for _ in 0..9 {
            pool.add_proven("int common = 0;".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let common = (0..1000)
            .filter(|_| pool.select(&mut rng).unwrap().text.contains("common"))
            .count();
        assert!(
            common > 800,
            "weighted line was drawn only {common}/1000 times"
        );
    }
}
