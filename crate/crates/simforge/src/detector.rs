//! Fingerprint indexing, pairwise scoring, and ranked reporting.
//!
//! Scores are matched-line percentages. A fingerprint match marks lines in
//! both documents; each document's matched lines are divided by its count of
//! token-bearing lines. The pair score is the larger of the two directions,
//! the more suspicious reading.
//!
//! Line attribution: winnowing keeps one line span per selected k-gram, so
//! coverage between consecutive fingerprints is interpolated. Each
//! fingerprint owns its own span plus half of any gap to its neighbors, and
//! the first and last fingerprints own the document's edges. A fully matched
//! document therefore scores exactly 100, and an unmatched one exactly 0.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::{Fingerprint, FingerprintParams, FingerprintSet};

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error(
        "fingerprint params mismatch for {doc}: index has k={}/t={}, document has k={}/t={}",
        .expected.k(), .expected.t(), .got.k(), .got.t()
    )]
    ParamsMismatch {
        doc: String,
        expected: FingerprintParams,
        got: FingerprintParams,
    },
    #[error("document {0:?} is not in the index")]
    UnknownDoc(String),
    #[error("duplicate document id {0:?}")]
    DuplicateDoc(String),
    #[error("no documents to index")]
    NoDocuments,
}

/// One posting: a fingerprint occurrence inside a specific document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Index into the document table, not a doc_id.
    pub doc: u32,
    pub token_index: u32,
    pub line_start: u32,
    pub line_end: u32,
}

#[derive(Debug, Clone)]
struct DocEntry {
    doc_id: String,
    line_count: u32,
    token_lines: Vec<u32>,
    /// Non-boilerplate fingerprints in token order.
    prints: Vec<Fingerprint>,
    /// Distinct hash values, for fast pairwise intersection.
    values: HashSet<u64>,
}

/// Inverted index hash -> postings, plus per-document line metadata.
#[derive(Debug, Clone)]
pub struct FingerprintIndex {
    params: FingerprintParams,
    postings: HashMap<u64, Vec<Posting>>,
    docs: Vec<DocEntry>,
    by_id: HashMap<String, usize>,
    boilerplate: HashSet<u64>,
}

/// A pair of matched line ranges, one per document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedRegion {
    pub a_start: u32,
    pub a_end: u32,
    pub b_start: u32,
    pub b_end: u32,
}

/// Similarity of one document pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub doc_a: String,
    pub doc_b: String,
    /// Percent of doc_a's token-bearing lines matched.
    pub pct_a: f64,
    /// Percent of doc_b's token-bearing lines matched.
    pub pct_b: f64,
    /// max(pct_a, pct_b).
    pub score: f64,
    pub regions: Vec<MatchedRegion>,
}

/// Ranked pair scores, descending, truncated to `limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub pairs: Vec<PairScore>,
    pub limit: usize,
}

impl FingerprintIndex {
    /// Default report truncation, mirroring the usual top-250 listing.
    pub const DEFAULT_LIMIT: usize = 250;

    /// Builds an index over `sets`. Fingerprints whose hash value occurs in
    /// `boilerplate` are dropped before indexing, so shared scaffolding
    /// cannot match. All sets must share one parameter choice.
    pub fn build(
        sets: impl IntoIterator<Item = FingerprintSet>,
        boilerplate: Option<&FingerprintSet>,
    ) -> Result<FingerprintIndex, DetectorError> {
        let mut sets = sets.into_iter().peekable();
        let params = match (sets.peek(), boilerplate) {
            (Some(s), _) => s.params,
            (None, Some(b)) => b.params,
            (None, None) => return Err(DetectorError::NoDocuments),
        };
        if let Some(b) = boilerplate {
            if b.params != params {
                return Err(DetectorError::ParamsMismatch {
                    doc: b.doc_id.clone(),
                    expected: params,
                    got: b.params,
                });
            }
        }
        let boiler: HashSet<u64> = boilerplate
            .map(|b| b.prints.iter().map(|p| p.hash).collect())
            .unwrap_or_default();

        let mut index = FingerprintIndex {
            params,
            postings: HashMap::new(),
            docs: Vec::new(),
            by_id: HashMap::new(),
            boilerplate: boiler,
        };
        for set in sets {
            if set.params != params {
                return Err(DetectorError::ParamsMismatch {
                    doc: set.doc_id,
                    expected: params,
                    got: set.params,
                });
            }
            if index.by_id.contains_key(&set.doc_id) {
                return Err(DetectorError::DuplicateDoc(set.doc_id));
            }
            let doc = index.docs.len() as u32;
            let prints: Vec<Fingerprint> = set
                .prints
                .into_iter()
                .filter(|p| !index.boilerplate.contains(&p.hash))
                .collect();
            for p in &prints {
                index.postings.entry(p.hash).or_default().push(Posting {
                    doc,
                    token_index: p.token_index,
                    line_start: p.line_start,
                    line_end: p.line_end,
                });
            }
            let values = prints.iter().map(|p| p.hash).collect();
            index.by_id.insert(set.doc_id.clone(), doc as usize);
            index.docs.push(DocEntry {
                doc_id: set.doc_id,
                line_count: set.line_count,
                token_lines: set.token_lines,
                prints,
                values,
            });
        }
        if index.docs.is_empty() {
            return Err(DetectorError::NoDocuments);
        }
        Ok(index)
    }

    pub fn params(&self) -> FingerprintParams {
        self.params
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().map(|d| d.doc_id.as_str())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn postings(&self, hash: u64) -> &[Posting] {
        self.postings.get(&hash).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Scores one pair of indexed documents.
    pub fn score_pair(&self, doc_a: &str, doc_b: &str) -> Result<PairScore, DetectorError> {
        let ia = *self
            .by_id
            .get(doc_a)
            .ok_or_else(|| DetectorError::UnknownDoc(doc_a.to_string()))?;
        let ib = *self
            .by_id
            .get(doc_b)
            .ok_or_else(|| DetectorError::UnknownDoc(doc_b.to_string()))?;
        Ok(self.score_entries(ia, ib))
    }

    fn score_entries(&self, ia: usize, ib: usize) -> PairScore {
        let a = &self.docs[ia];
        let b = &self.docs[ib];
        let shared: HashSet<u64> = a.values.intersection(&b.values).copied().collect();
        let matched_a = matched_line_count(a, &shared);
        let matched_b = matched_line_count(b, &shared);
        let pct = |matched: u32, total: u32| {
            if total == 0 {
                0.0
            } else {
                matched as f64 / total as f64 * 100.0
            }
        };
        let pct_a = pct(matched_a, a.line_count);
        let pct_b = pct(matched_b, b.line_count);
        PairScore {
            doc_a: a.doc_id.clone(),
            doc_b: b.doc_id.clone(),
            pct_a,
            pct_b,
            score: pct_a.max(pct_b),
            regions: matched_regions(a, b, &shared),
        }
    }

    /// Scores every unordered pair and returns the top `limit` descending.
    pub fn rank_all(&self, limit: usize) -> SimilarityReport {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..self.docs.len() {
            for j in i + 1..self.docs.len() {
                pairs.push((i, j));
            }
        }
        let mut scored: Vec<PairScore> = pairs
            .into_par_iter()
            .map(|(i, j)| self.score_entries(i, j))
            .collect();
        sort_ranked(&mut scored);
        scored.truncate(limit);
        SimilarityReport {
            pairs: scored,
            limit,
        }
    }
}

/// Descending by score; ties ordered by document ids for determinism.
pub(crate) fn sort_ranked(scored: &mut [PairScore]) {
    scored.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| x.doc_a.cmp(&y.doc_a))
            .then_with(|| x.doc_b.cmp(&y.doc_b))
    });
}

/// Lines of `entry` covered by fingerprints whose hash is in `shared`.
///
/// Attribution ranges: fingerprint i owns [a_i, b_i] where interior bounds
/// split the gap to each neighbor at the midpoint and the outermost bounds
/// extend to the document's first and last token lines. Matching every
/// fingerprint therefore covers every token line.
fn matched_line_count(entry: &DocEntry, shared: &HashSet<u64>) -> u32 {
    if entry.prints.is_empty() || entry.token_lines.is_empty() {
        return 0;
    }
    let first = *entry.token_lines.first().unwrap();
    let last = *entry.token_lines.last().unwrap();
    let m = entry.prints.len();
    let mut matched_ranges: Vec<(u32, u32)> = Vec::new();
    for (i, p) in entry.prints.iter().enumerate() {
        if !shared.contains(&p.hash) {
            continue;
        }
        let lo = if i == 0 {
            first
        } else {
            let prev = &entry.prints[i - 1];
            if p.line_start > prev.line_end {
                (prev.line_end + p.line_start) / 2 + 1
            } else {
                p.line_start
            }
        };
        let hi = if i == m - 1 {
            last
        } else {
            let next = &entry.prints[i + 1];
            if next.line_start > p.line_end {
                (p.line_end + next.line_start) / 2
            } else {
                p.line_end
            }
        };
        matched_ranges.push((lo, hi));
    }
    count_lines_covered(&entry.token_lines, matched_ranges)
}

/// Counts members of the sorted `lines` list lying inside any range.
fn count_lines_covered(lines: &[u32], mut ranges: Vec<(u32, u32)>) -> u32 {
    if ranges.is_empty() {
        return 0;
    }
    ranges.sort_unstable();
    let mut merged: Vec<(u32, u32)> = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        match merged.last_mut() {
            Some(m) if lo <= m.1.saturating_add(1) => m.1 = m.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let mut count = 0u32;
    let mut it = lines.iter().peekable();
    for (lo, hi) in merged {
        while let Some(&&l) = it.peek() {
            if l < lo {
                it.next();
            } else {
                break;
            }
        }
        while let Some(&&l) = it.peek() {
            if l <= hi {
                count += 1;
                it.next();
            } else {
                break;
            }
        }
    }
    count
}

/// Builds display regions: every co-occurring span pair, greedily chained
/// while both sides stay adjacent, then filtered so the survivors do not
/// overlap within either document.
fn matched_regions(a: &DocEntry, b: &DocEntry, shared: &HashSet<u64>) -> Vec<MatchedRegion> {
    let mut span_pairs: Vec<MatchedRegion> = Vec::new();
    let spans_of = |e: &DocEntry, hash: u64| -> Vec<(u32, u32)> {
        e.prints
            .iter()
            .filter(|p| p.hash == hash)
            .map(|p| (p.line_start, p.line_end))
            .collect()
    };
    let mut hashes: Vec<u64> = shared.iter().copied().collect();
    hashes.sort_unstable();
    for h in hashes {
        for &(as_, ae) in &spans_of(a, h) {
            for &(bs, be) in &spans_of(b, h) {
                span_pairs.push(MatchedRegion {
                    a_start: as_,
                    a_end: ae,
                    b_start: bs,
                    b_end: be,
                });
            }
        }
    }
    span_pairs.sort_by_key(|r| (r.a_start, r.a_end, r.b_start, r.b_end));

    let adjacent = |lo: u32, hi: u32, start: u32| start <= hi.saturating_add(1) && start >= lo;
    let mut chained: Vec<MatchedRegion> = Vec::new();
    for r in span_pairs {
        match chained.last_mut() {
            Some(c)
                if adjacent(c.a_start, c.a_end, r.a_start)
                    && adjacent(c.b_start, c.b_end, r.b_start) =>
            {
                c.a_end = c.a_end.max(r.a_end);
                c.b_end = c.b_end.max(r.b_end);
            }
            _ => chained.push(r),
        }
    }
    // Keep the earliest region of any per-document overlap.
    let mut kept: Vec<MatchedRegion> = Vec::new();
    for r in chained {
        let clash = kept.iter().any(|k| {
            let a_overlap = r.a_start <= k.a_end && k.a_start <= r.a_end;
            let b_overlap = r.b_start <= k.b_end && k.b_start <= r.b_end;
            a_overlap || b_overlap
        });
        if !clash {
            kept.push(r);
        }
    }
    kept
}

impl SimilarityReport {
    /// CSV form: `doc_a,doc_b,pct_a,pct_b,score`, two decimal places.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("doc_a,doc_b,pct_a,pct_b,score\n");
        for p in &self.pairs {
            s.push_str(&format!(
                "{},{},{:.2},{:.2},{:.2}\n",
                csv_field(&p.doc_a),
                csv_field(&p.doc_b),
                p.pct_a,
                p.pct_b,
                p.score
            ));
        }
        s
    }

    /// JSON form, including matched regions.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::fingerprint_document;
    use crate::lexnorm::{tokenize_c, NormalizedDocument, TokenKind};
    use proptest::prelude::*;

    fn params() -> FingerprintParams {
        FingerprintParams::new(3, 5).unwrap()
    }

    fn set_of(doc_id: &str, src: &str) -> FingerprintSet {
        fingerprint_document(&tokenize_c(doc_id, src.as_bytes()), params())
    }

    fn synth(doc_id: &str, codes: &[u64]) -> FingerprintSet {
        // Token classes built from raw codes via Other(); distinct codes stay
        // distinct classes.
        let kinds: Vec<TokenKind> = codes.iter().map(|&c| TokenKind::Other(c as u32)).collect();
        let doc = NormalizedDocument::synthetic(doc_id, kinds);
        fingerprint_document(&doc, params())
    }

    const PROG: &str =
        "int main(void) {\n  int a = 1;\n  int b = 2;\n  int c = a + b;\n  return c;\n}\n";

    #[test]
    fn self_pair_scores_exactly_100() {
        let idx =
            FingerprintIndex::build([set_of("a.c", PROG), set_of("b.c", PROG)], None).unwrap();
        let s = idx.score_pair("a.c", "b.c").unwrap();
        assert_eq!(s.pct_a, 100.0);
        assert_eq!(s.pct_b, 100.0);
        assert_eq!(s.score, 100.0);
        assert!(!s.regions.is_empty());
    }

    #[test]
    fn rename_and_comment_edit_scores_like_identical_copy() {
        let edited = "int main(void) {\n  /* intro */\n  int x = 1;\n  int y = 2; // note\n  int z = x + y;\n  return z;\n}\n";
        let idx =
            FingerprintIndex::build([set_of("orig.c", PROG), set_of("edited.c", edited)], None)
                .unwrap();
        let s = idx.score_pair("orig.c", "edited.c").unwrap();
        assert_eq!(s.score, 100.0);
        assert_eq!((s.pct_a, s.pct_b), (100.0, 100.0));
    }

    #[test]
    fn disjoint_docs_score_zero() {
        let a = synth("a", &(0..40).collect::<Vec<u64>>());
        let b = synth("b", &(100..140).collect::<Vec<u64>>());
        let idx = FingerprintIndex::build([a, b], None).unwrap();
        let s = idx.score_pair("a", "b").unwrap();
        assert_eq!(s.score, 0.0);
        assert!(s.regions.is_empty());
    }

    #[test]
    fn boilerplate_excludes_whole_document() {
        let boiler = set_of("boiler", PROG);
        let idx =
            FingerprintIndex::build([set_of("a.c", PROG), set_of("b.c", PROG)], Some(&boiler))
                .unwrap();
        let s = idx.score_pair("a.c", "b.c").unwrap();
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn mixed_params_rejected() {
        let a = set_of("a", PROG);
        let b = fingerprint_document(
            &tokenize_c("b", PROG.as_bytes()),
            FingerprintParams::new(4, 7).unwrap(),
        );
        match FingerprintIndex::build([a, b], None) {
            Err(DetectorError::ParamsMismatch { doc, .. }) => assert_eq!(doc, "b"),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_unknown_docs_rejected() {
        let err = FingerprintIndex::build([set_of("a", PROG), set_of("a", PROG)], None);
        assert!(matches!(err, Err(DetectorError::DuplicateDoc(d)) if d == "a"));
        let idx = FingerprintIndex::build([set_of("a", PROG)], None).unwrap();
        assert!(matches!(
            idx.score_pair("a", "ghost"),
            Err(DetectorError::UnknownDoc(d)) if d == "ghost"
        ));
        assert!(matches!(
            FingerprintIndex::build(std::iter::empty(), None),
            Err(DetectorError::NoDocuments)
        ));
    }

    #[test]
    fn no_shared_hashes_means_singleton_postings() {
        let a = synth("a", &(0..30).collect::<Vec<u64>>());
        let b = synth("b", &(100..130).collect::<Vec<u64>>());
        let idx = FingerprintIndex::build([a, b], None).unwrap();
        for posts in idx.postings.values() {
            assert_eq!(posts.len(), 1);
        }
    }

    #[test]
    fn index_matches_bruteforce_map() {
        let sets = vec![
            set_of("a", PROG),
            set_of("b", "int f(int n) {\n  return n * 2;\n}\n"),
            set_of("c", PROG),
        ];
        let mut oracle: HashMap<u64, Vec<(String, u32)>> = HashMap::new();
        for set in &sets {
            for p in &set.prints {
                oracle
                    .entry(p.hash)
                    .or_default()
                    .push((set.doc_id.clone(), p.token_index));
            }
        }
        let idx = FingerprintIndex::build(sets, None).unwrap();
        assert_eq!(idx.postings.len(), oracle.len());
        for (hash, posts) in &idx.postings {
            let got: Vec<(String, u32)> = posts
                .iter()
                .map(|p| (idx.docs[p.doc as usize].doc_id.clone(), p.token_index))
                .collect();
            assert_eq!(&got, oracle.get(hash).unwrap(), "hash {hash}");
        }
    }

    #[test]
    fn three_identical_docs_rank_three_pairs_at_100() {
        let idx = FingerprintIndex::build(
            [set_of("a", PROG), set_of("b", PROG), set_of("c", PROG)],
            None,
        )
        .unwrap();
        let report = idx.rank_all(250);
        assert_eq!(report.pairs.len(), 3);
        for p in &report.pairs {
            assert_eq!(p.score, 100.0);
        }
    }

    #[test]
    fn disjoint_corpus_ranks_all_pairs_at_zero() {
        let sets: Vec<FingerprintSet> = (0..4)
            .map(|i| {
                let base = i as u64 * 1000;
                synth(&format!("d{i}"), &(base..base + 30).collect::<Vec<u64>>())
            })
            .collect();
        let idx = FingerprintIndex::build(sets, None).unwrap();
        let report = idx.rank_all(250);
        assert_eq!(report.pairs.len(), 6);
        assert!(report.pairs.iter().all(|p| p.score == 0.0));
        assert_eq!(idx.rank_all(2).pairs.len(), 2);
    }

    #[test]
    fn ranking_matches_pairwise_oracle() {
        let sets = vec![
            set_of("a", PROG),
            set_of("b", PROG),
            set_of("c", "int g(void) {\n  return 7;\n}\n"),
            set_of(
                "d",
                "int main(void) {\n  int a = 1;\n  int b = 2;\n  return a;\n}\n",
            ),
        ];
        let ids: Vec<String> = sets.iter().map(|s| s.doc_id.clone()).collect();
        let idx = FingerprintIndex::build(sets, None).unwrap();
        let mut oracle: Vec<PairScore> = Vec::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                oracle.push(idx.score_pair(&ids[i], &ids[j]).unwrap());
            }
        }
        oracle.sort_by(|x, y| {
            y.score
                .total_cmp(&x.score)
                .then_with(|| x.doc_a.cmp(&y.doc_a))
                .then_with(|| x.doc_b.cmp(&y.doc_b))
        });
        assert_eq!(idx.rank_all(250).pairs, oracle);
        oracle.truncate(2);
        assert_eq!(idx.rank_all(2).pairs, oracle);
    }

    #[test]
    fn regions_do_not_overlap_per_document() {
        let idx = FingerprintIndex::build([set_of("a", PROG), set_of("b", PROG)], None).unwrap();
        let s = idx.score_pair("a", "b").unwrap();
        for (i, r) in s.regions.iter().enumerate() {
            assert!(r.a_start <= r.a_end && r.b_start <= r.b_end);
            for k in &s.regions[..i] {
                assert!(r.a_start > k.a_end || k.a_start > r.a_end);
                assert!(r.b_start > k.b_end || k.b_start > r.b_end);
            }
        }
    }

    #[test]
    fn csv_and_json_shapes() {
        let idx =
            FingerprintIndex::build([set_of("a.c", PROG), set_of("b.c", PROG)], None).unwrap();
        let report = idx.rank_all(250);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("doc_a,doc_b,pct_a,pct_b,score"));
        assert_eq!(lines.next(), Some("a.c,b.c,100.00,100.00,100.00"));
        let json = report.to_json();
        let back: SimilarityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("regions"));
    }

    proptest! {
        #[test]
        fn score_is_symmetric(
            a in proptest::collection::vec(0u64..12, 0..80),
            b in proptest::collection::vec(0u64..12, 0..80),
        ) {
            let idx = FingerprintIndex::build([synth("a", &a), synth("b", &b)], None).unwrap();
            let ab = idx.score_pair("a", "b").unwrap();
            let ba = idx.score_pair("b", "a").unwrap();
            prop_assert_eq!(ab.score, ba.score);
            prop_assert_eq!(ab.pct_a, ba.pct_b);
            prop_assert_eq!(ab.pct_b, ba.pct_a);
        }

        #[test]
        fn reflexivity_is_exact_for_fingerprintable_docs(
            codes in proptest::collection::vec(0u64..12, 3..120),
        ) {
            // k=3 here, so any doc with >= 3 tokens has >= 1 fingerprint.
            let idx = FingerprintIndex::build(
                [synth("x", &codes), synth("y", &codes)],
                None,
            ).unwrap();
            let s = idx.score_pair("x", "y").unwrap();
            prop_assert_eq!(s.score, 100.0);
            prop_assert_eq!(s.pct_a, 100.0);
            prop_assert_eq!(s.pct_b, 100.0);
        }

        #[test]
        fn scores_stay_in_range(
            a in proptest::collection::vec(0u64..6, 0..100),
            b in proptest::collection::vec(0u64..6, 0..100),
        ) {
            let idx = FingerprintIndex::build([synth("a", &a), synth("b", &b)], None).unwrap();
            let s = idx.score_pair("a", "b").unwrap();
            prop_assert!((0.0..=100.0).contains(&s.pct_a));
            prop_assert!((0.0..=100.0).contains(&s.pct_b));
            prop_assert_eq!(s.score, s.pct_a.max(s.pct_b));
        }

        #[test]
        fn relocated_block_keeps_standalone_fingerprints(
            prefix_a in proptest::collection::vec(0u64..8, 0..50),
            suffix_a in proptest::collection::vec(0u64..8, 0..50),
            prefix_b in proptest::collection::vec(8u64..16, 0..50),
            suffix_b in proptest::collection::vec(8u64..16, 0..50),
            block in proptest::collection::vec(16u64..24, 5..40),
        ) {
            // Every fingerprint of the standalone block comes from a window
            // that exists verbatim wherever the block is embedded, so block
            // placement cannot reduce the matched set below the standalone
            // fingerprint set.
            let standalone = synth("s", &block);
            let standalone_values: HashSet<u64> =
                standalone.prints.iter().map(|p| p.hash).collect();
            let mut a = prefix_a;
            a.extend(&block);
            a.extend(suffix_a);
            let mut b = prefix_b;
            b.extend(&block);
            b.extend(suffix_b);
            for doc in [synth("a", &a), synth("b", &b)] {
                let values: HashSet<u64> = doc.prints.iter().map(|p| p.hash).collect();
                prop_assert!(
                    standalone_values.is_subset(&values),
                    "embedding lost block fingerprints"
                );
            }
        }
    }
}
