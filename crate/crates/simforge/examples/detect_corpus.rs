//! Fingerprints every C file in a directory and ranks all pairs by
//! similarity, ignoring identifier names, literal values, comments, and
//! whitespace.
//!
//! Usage: cargo run --example detect_corpus [dir]

use simforge::fingerprint::fingerprint_document;
use simforge::lexnorm::tokenize_c;
use simforge::{FingerprintIndex, FingerprintParams};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/fixtures/corpus", env!("CARGO_MANIFEST_DIR")));

    let params = FingerprintParams::default();
    let mut sets = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(&dir)
        .expect("readable corpus directory")
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    entries.sort();

    for path in &entries {
        let raw = std::fs::read(path).expect("readable file");
        let id = path.file_name().unwrap().to_string_lossy().into_owned();
        let doc = tokenize_c(&id, &raw);
        sets.push(fingerprint_document(&doc, params));
    }
    println!("indexed {} documents from {dir}", sets.len());

    let index = FingerprintIndex::build(sets, None).expect("consistent params");
    let report = index.rank_all(FingerprintIndex::DEFAULT_LIMIT);

    println!("\ntop pairs by similarity:");
    println!(
        "{:<18} {:<18} {:>7} {:>7} {:>7}",
        "doc a", "doc b", "score", "pct a", "pct b"
    );
    for pair in report.pairs.iter().take(10) {
        println!(
            "{:<18} {:<18} {:>7.2} {:>7.2} {:>7.2}",
            pair.doc_a, pair.doc_b, pair.score, pair.pct_a, pair.pct_b
        );
    }
    if report.pairs.len() > 10 {
        println!("... {} more pairs", report.pairs.len() - 10);
    }

    // Unrelated programs stay low; the bundled corpus has no planted clones.
    let max = report.pairs.first().map(|p| p.score).unwrap_or(0.0);
    println!("\nhighest score in corpus: {max:.2}");

    if let Some(p) = report.pairs.first() {
        let detail = index.score_pair(&p.doc_a, &p.doc_b).unwrap();
        println!("matched line regions for that pair:");
        for r in detail.regions.iter().take(5) {
            println!(
                "  {} lines {}-{}  <->  {} lines {}-{}",
                p.doc_a, r.a_start, r.a_end, p.doc_b, r.b_start, r.b_end
            );
        }
        if detail.regions.is_empty() {
            println!("  (none above the fingerprint floor)");
        }
    }
}
