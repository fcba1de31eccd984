//! Generates several evasive variants of one base file in parallel, each
//! from an independently derived seed, then cross-scores the whole family
//! to show the variants also evade comparison against each other. Needs a
//! C compiler.
//!
//! Usage: cargo run --release --example mass_variants [count]

use simforge::attack::{default_entropy, mass_plagiarize, AttackConfig};
use simforge::equivalence::{resolve_compiler, CompilerAdapter};
use simforge::fingerprint::fingerprint_document;
use simforge::lexnorm::tokenize_c;
use simforge::{FingerprintIndex, FingerprintParams};

fn main() {
    let count: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(6);
    let path = format!(
        "{}/fixtures/corpus/bubble_sort.c",
        env!("CARGO_MANIFEST_DIR")
    );
    let base = std::fs::read_to_string(&path).expect("readable source file");

    let adapter = CompilerAdapter::with_cc(resolve_compiler(None, None));
    let config = AttackConfig {
        target: 25.0,
        seed: 2,
        entropy: Some(default_entropy().to_string()),
        ..AttackConfig::default()
    };
    println!(
        "generating {count} variants of bubble_sort.c (master seed {})",
        config.seed
    );

    let started = std::time::Instant::now();
    let results = mass_plagiarize("bubble_sort.c", &base, &config, count, &adapter);
    let variants: Vec<_> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Ok(v) => Some((i, v)),
            Err(e) => {
                eprintln!("variant {i} failed: {e}");
                None
            }
        })
        .collect();
    println!(
        "{} of {count} variants reached target in {:.1}s total",
        variants.len(),
        started.elapsed().as_secs_f64()
    );
    for (i, v) in &variants {
        println!(
            "  v{i}: seed {:<20} {} insertions, score vs base {:.2}",
            v.seed, v.mutations, v.final_score
        );
    }

    // Family cross-scores: every pair of variants, not just variant vs base.
    let params = FingerprintParams::default();
    let mut sets = vec![fingerprint_document(
        &tokenize_c("base", base.as_bytes()),
        params,
    )];
    for (i, v) in &variants {
        let id = format!("v{i}");
        sets.push(fingerprint_document(
            &tokenize_c(id.as_str(), v.source.as_bytes()),
            params,
        ));
    }
    let index = FingerprintIndex::build(sets, None).unwrap();
    let report = index.rank_all(usize::MAX);

    let scores: Vec<f64> = report.pairs.iter().map(|p| p.score).collect();
    let max = scores.iter().cloned().fold(0.0, f64::max);
    let below = scores.iter().filter(|&&s| s < 26.0).count();
    println!(
        "\n{} family pairs (base + variants): max score {:.2}, {}/{} below 26",
        scores.len(),
        max,
        below,
        scores.len()
    );
    println!("highest-scoring pairs:");
    for p in report.pairs.iter().take(5) {
        println!("  {:<6} vs {:<6} {:.2}", p.doc_a, p.doc_b, p.score);
    }
}
