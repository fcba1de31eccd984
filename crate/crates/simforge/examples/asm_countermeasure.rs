//! Demonstrates the assembly-level countermeasure: an evasive variant
//! that scores low against its base at the source level scores at the
//! maximum once both are compiled, because every accepted mutation was
//! required to leave the optimized artifact unchanged. Fingerprinting
//! compiler output therefore undoes this whole attack family. Needs a C
//! compiler.
//!
//! Usage: cargo run --release --example asm_countermeasure [file.c]

use simforge::attack::{default_entropy, init_attack, run_attack, AttackConfig};
use simforge::equivalence::{resolve_compiler, CompilerAdapter};
use simforge::fingerprint::fingerprint_document;
use simforge::lexnorm::{tokenize_asm, tokenize_c};
use simforge::{FingerprintIndex, FingerprintParams};

fn score_docs(a: &simforge::NormalizedDocument, b: &simforge::NormalizedDocument) -> f64 {
    let params = FingerprintParams::default();
    let index = FingerprintIndex::build(
        [
            fingerprint_document(a, params),
            fingerprint_document(b, params),
        ],
        None,
    )
    .unwrap();
    index.score_pair(&a.doc_id, &b.doc_id).unwrap().score
}

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/fixtures/corpus/matrix3.c", env!("CARGO_MANIFEST_DIR")));
    let base = std::fs::read_to_string(&path).expect("readable source file");
    let id = std::path::Path::new(&path)
        .file_name()
        .unwrap()
        .to_string_lossy()
        .into_owned();

    let adapter = CompilerAdapter::with_cc(resolve_compiler(None, None));
    let config = AttackConfig {
        target: 25.0,
        seed: 11,
        entropy: Some(default_entropy().to_string()),
        ..AttackConfig::default()
    };
    println!("attacking {id} to target {} ...", config.target);
    let state = init_attack(&id, &base, config, &adapter).expect("base compiles");
    let variant = run_attack(state).expect("attack converges on bundled fixture");

    let base_doc = tokenize_c("base.c", base.as_bytes());
    let var_doc = tokenize_c("variant.c", variant.source.as_bytes());
    let source_score = score_docs(&base_doc, &var_doc);
    println!(
        "source-level score after {} insertions: {:.2}",
        variant.mutations, source_score
    );

    // Same pipeline, but on the compiler's normalized assembly output.
    let base_asm = adapter.compile(&base).expect("compiler available");
    let var_asm = adapter
        .compile(&variant.source)
        .expect("compiler available");
    assert!(base_asm.success && var_asm.success);
    let base_asm_doc = tokenize_asm("base.s", &base_asm.normalized);
    let var_asm_doc = tokenize_asm("variant.s", &var_asm.normalized);
    let asm_score = score_docs(&base_asm_doc, &var_asm_doc);

    println!("assembly-level score: {asm_score:.2}");
    println!(
        "identical artifacts: {}",
        base_asm.normalized == var_asm.normalized
    );
    println!(
        "\nsource {:.2} -> assembly {:.2} (delta +{:.2})",
        source_score,
        asm_score,
        asm_score - source_score
    );
    println!("every dead insertion the attack relied on was discarded by -O3");
}
