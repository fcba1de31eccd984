//! Drives the full evasion loop against one file: repeatedly insert a
//! dead statement at a random legal site, keep it only if the compiled
//! artifact is unchanged at -O3, stop once the similarity score falls to
//! the target. Needs a C compiler (`cc`, or set SIMFORGE_CC).
//!
//! Usage: cargo run --release --example attack_file [file.c]

use simforge::attack::{default_entropy, init_attack, run_attack, AttackConfig};
use simforge::equivalence::{resolve_compiler, CompilerAdapter};
use simforge::fingerprint::fingerprint_document;
use simforge::lexnorm::tokenize_c;
use simforge::{FingerprintIndex, FingerprintParams};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/fixtures/corpus/rot13.c", env!("CARGO_MANIFEST_DIR")));
    let base = std::fs::read_to_string(&path).expect("readable source file");
    let id = std::path::Path::new(&path)
        .file_name()
        .unwrap()
        .to_string_lossy()
        .into_owned();

    let adapter = CompilerAdapter::with_cc(resolve_compiler(None, None));
    let config = AttackConfig {
        target: 25.0,
        seed: 7,
        entropy: Some(default_entropy().to_string()),
        ..AttackConfig::default()
    };
    println!(
        "attacking {id}: target score {}, seed {}",
        config.target, config.seed
    );

    let started = std::time::Instant::now();
    let state = init_attack(&id, &base, config, &adapter).expect("base must compile");
    let variant = match run_attack(state) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("attack failed: {e}");
            std::process::exit(1);
        }
    };
    println!(
        "done in {:.1}s: {} accepted insertions, final score {:.2}",
        started.elapsed().as_secs_f64(),
        variant.mutations,
        variant.final_score
    );

    println!("\nscore trajectory (every 5th accepted insertion):");
    for (i, ins) in variant.insertions.iter().enumerate() {
        if i % 5 == 0 || i + 1 == variant.insertions.len() {
            println!(
                "  #{:<3} before line {:<3} {:<28} -> {:.2}",
                i + 1,
                ins.at_line,
                ins.line,
                ins.score_after
            );
        }
    }

    // Independent checks: same artifact, and a detector built from scratch
    // agrees with the attack's own score.
    let equivalent = adapter
        .equivalent(&base, &variant.source)
        .expect("compiler available");
    let params = FingerprintParams::default();
    let base_doc = tokenize_c(&id, base.as_bytes());
    let var_doc = tokenize_c("variant", variant.source.as_bytes());
    let index = FingerprintIndex::build(
        [
            fingerprint_document(&base_doc, params),
            fingerprint_document(&var_doc, params),
        ],
        None,
    )
    .unwrap();
    let offline = index.score_pair(&id, "variant").unwrap().score;
    println!("\nverification: equivalent={equivalent}, offline score {offline:.2}");
    println!(
        "variant grew from {} to {} lines",
        base.lines().count(),
        variant.source.lines().count()
    );
}
