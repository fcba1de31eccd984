//! Contrasts the two single-pass window-sweep mutators with the full
//! feedback-driven attack. Both sweeps tile the file into fixed line
//! windows and insert at most one dead statement per window; neither
//! consults the similarity score, so evasion is much weaker. The
//! deterministic sweep is additionally a pure function of its input.
//! Needs a C compiler.
//!
//! Usage: cargo run --release --example ablation_window_sweep [w_lines]

use simforge::ablation::{mossad_det, mossad_nondet, WindowParams};
use simforge::attack::{default_entropy, init_attack, run_attack, AttackConfig};
use simforge::equivalence::{resolve_compiler, CompilerAdapter};

fn main() {
    let w_lines: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(WindowParams::default().w_lines);
    let path = format!(
        "{}/fixtures/corpus/histogram16.c",
        env!("CARGO_MANIFEST_DIR")
    );
    let base = std::fs::read_to_string(&path).expect("readable source file");
    let adapter = CompilerAdapter::with_cc(resolve_compiler(None, None));
    let params = WindowParams { w_lines };

    println!(
        "base: histogram16.c, {} lines, window {} lines",
        base.lines().count(),
        w_lines
    );

    let det_a = mossad_det("histogram16.c", &base, params, &adapter).expect("sweep runs");
    let det_b = mossad_det("histogram16.c", &base, params, &adapter).expect("sweep runs");
    println!(
        "\ndeterministic sweep: {} insertions, score {:.2}, reruns byte-identical: {}",
        det_a.mutations,
        det_a.final_score,
        det_a.source == det_b.source
    );

    for seed in [1u64, 2, 3] {
        let nd = mossad_nondet("histogram16.c", &base, params, &adapter, seed).expect("sweep runs");
        println!(
            "randomized sweep seed {seed}: {} insertions, score {:.2}",
            nd.mutations, nd.final_score
        );
    }

    // The full attack inserts wherever the score says it helps and keeps
    // going until the target; the sweeps stop after one pass regardless.
    let config = AttackConfig {
        target: 25.0,
        seed: 10,
        entropy: Some(default_entropy().to_string()),
        ..AttackConfig::default()
    };
    let state = init_attack("histogram16.c", &base, config, &adapter).expect("base compiles");
    match run_attack(state) {
        Ok(v) => println!(
            "\nfull attack (target 25): {} insertions, score {:.2}",
            v.mutations, v.final_score
        ),
        Err(e) => println!("\nfull attack did not converge: {e}"),
    }
}
