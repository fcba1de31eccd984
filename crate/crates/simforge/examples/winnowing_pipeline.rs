//! Walks one source file through every fingerprinting stage: token
//! classes, k-gram hashes, winnowed selection, and the guarantee that a
//! shared block of at least the guarantee threshold survives into both
//! documents' fingerprint sets.
//!
//! Usage: cargo run --example winnowing_pipeline [file.c]

use simforge::fingerprint::{fingerprint_document, kgram_hashes, winnow};
use simforge::lexnorm::tokenize_c;
use simforge::FingerprintParams;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/fixtures/corpus/rot13.c", env!("CARGO_MANIFEST_DIR")));
    let raw = std::fs::read(&path).expect("readable source file");
    let doc = tokenize_c(path.as_str(), &raw);
    let params = FingerprintParams::default();

    println!("document: {} ({} tokens)", doc.doc_id, doc.tokens.len());
    println!(
        "params: k={} t={} (window {})",
        params.k(),
        params.t(),
        params.w()
    );

    let head: Vec<String> = doc
        .tokens
        .iter()
        .take(12)
        .map(|t| t.kind.to_string())
        .collect();
    println!("\nfirst token classes:\n  {}", head.join(" "));

    let codes: Vec<u64> = doc.tokens.iter().map(|t| t.kind.code()).collect();
    let hashes = kgram_hashes(&codes, params.k());
    println!("\n{} k-gram hashes; first 4:", hashes.len());
    for (i, h) in hashes.iter().take(4).enumerate() {
        println!("  gram {i} -> {h:#018x}");
    }

    let picked = winnow(&hashes, params.w());
    println!(
        "\nwinnowing keeps {} of {} hashes ({:.1}%)",
        picked.len(),
        hashes.len(),
        100.0 * picked.len() as f64 / hashes.len().max(1) as f64
    );

    let set = fingerprint_document(&doc, params);
    println!(
        "fingerprint set: {} prints over {} token-bearing lines",
        set.prints.len(),
        set.line_count
    );
    for p in set.prints.iter().take(5) {
        println!(
            "  {:#018x} at token {} (lines {}-{})",
            p.hash, p.token_index, p.line_start, p.line_end
        );
    }

    // Embed the whole file inside unrelated padding. Every shared run of
    // at least t tokens is guaranteed a shared selected fingerprint, so
    // the intersection cannot be empty no matter where the block lands.
    let embedded = format!(
        "int pad_head(int z) {{\n    return z * 3 + 1;\n}}\n\n{}\n",
        String::from_utf8_lossy(&raw)
    );
    let other = tokenize_c("embedded", embedded.as_bytes());
    let other_set = fingerprint_document(&other, params);
    let ours: std::collections::HashSet<u64> = set.prints.iter().map(|p| p.hash).collect();
    let shared = other_set
        .prints
        .iter()
        .filter(|p| ours.contains(&p.hash))
        .count();
    println!(
        "\nafter embedding the file in padding: {shared} shared fingerprints (guaranteed > 0)"
    );
}
