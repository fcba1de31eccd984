//! Shows how a single inserted statement removes fingerprints that the
//! detector would otherwise select: the insertion splits a token run, so
//! every k-gram spanning the seam hashes differently, and winnowing may
//! promote different survivors nearby.
//!
//! Usage: cargo run --example hash_disruption

use std::collections::HashSet;

use simforge::attack::{insert_line, insertion_points};
use simforge::fingerprint::fingerprint_document;
use simforge::lexnorm::tokenize_c;
use simforge::FingerprintParams;

const PROGRAM: &str = "int scale(int v) {\n    int out = v * 3;\n    out = out + 7;\n    out = out ^ 21;\n    out = out * 5;\n    out = out - 9;\n    out = out % 251;\n    return out;\n}\n";

fn hashes_of(source: &str, id: &str) -> HashSet<u64> {
    let doc = tokenize_c(id, source.as_bytes());
    let set = fingerprint_document(&doc, FingerprintParams::default());
    set.prints.iter().map(|p| p.hash).collect()
}

fn main() {
    let before = hashes_of(PROGRAM, "before");
    println!(
        "base program selects {} distinct fingerprint hashes",
        before.len()
    );

    let sites = insertion_points(PROGRAM);
    println!("legal insertion sites (insert before line): {sites:?}");

    for &site in &sites {
        let mutated = insert_line(PROGRAM, "int filler = 0;", site);
        let after = hashes_of(&mutated, "after");
        let killed: Vec<u64> = before.difference(&after).copied().collect();
        let fresh = after.difference(&before).count();
        println!(
            "insert before line {site:2}: {} hashes eliminated, {} new ones appear",
            killed.len(),
            fresh
        );
    }

    // One concrete elimination, end to end.
    let site = sites[sites.len() / 2];
    let mutated = insert_line(PROGRAM, "int filler = 0;", site);
    let after = hashes_of(&mutated, "after");
    if let Some(gone) = before.difference(&after).next() {
        println!(
            "\nexample: hash {gone:#018x} present before, absent after inserting at line {site}"
        );
    }
    println!("\nmutated program:\n{mutated}");
}
