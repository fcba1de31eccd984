//! The semantics-preserving mutation attack.
//!
//! The loop is select, mutate, check, score. A candidate line is drawn from
//! the [`MutationPool`] (the program's own lines plus optional entropy
//! lines), inserted at a random statement boundary inside a function body,
//! and kept only if the compiler-backed equivalence oracle says the
//! optimized output is unchanged. Every accepted insertion disrupts the
//! k-grams spanning its position, eroding fingerprint matches while
//! behavior provably stays fixed. The run ends when the internal detector
//! scores the variant at or below the target.
//!
//! Failure is a first-class outcome: if no mutation is accepted within the
//! timeout window, or the variant hits the growth cap, the run returns a
//! timeout error carrying the best variant so far.

mod insert;
mod pool;

pub use insert::{declared_names, insert_line, insertion_points, rename_collisions, replace_word};
pub(crate) use pool::contains_word;
pub use pool::{passes_filter, MutationPool, Origin, PoolEntry};

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::FingerprintIndex;
use crate::equivalence::{CompileArtifact, CompilerAdapter, EquivalenceError};
use crate::fingerprint::{fingerprint_document, FingerprintParams, FingerprintSet};
use crate::gst;
use crate::lexnorm::{tokenize_c, NormalizedDocument};

/// The ~30 generic declaration lines bundled for short inputs.
pub fn default_entropy() -> &'static str {
    include_str!("../../fixtures/entropy.txt")
}

/// Which similarity engine the attack loop queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Winnow,
    Gst,
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "winnow" => Ok(Engine::Winnow),
            "gst" => Ok(Engine::Gst),
            other => Err(format!("unknown engine {other:?}, expected winnow or gst")),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Winnow => "winnow",
            Engine::Gst => "gst",
        })
    }
}

#[derive(Debug, Clone)]
pub struct AttackConfig {
    /// Stop when the variant-vs-base score is at or below this percent.
    pub target: f64,
    /// Give up when no mutation has been accepted for this long.
    pub timeout: Duration,
    /// Variant may grow to at most this multiple of the base line count.
    pub growth_cap: f64,
    pub seed: u64,
    /// Entropy text (not a path); each token-bearing line joins the pool.
    pub entropy: Option<String>,
    pub engine: Engine,
    pub params: FingerprintParams,
    /// Minimum match length when the engine is Gst.
    pub mml: usize,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            target: 25.0,
            timeout: Duration::from_secs(300),
            growth_cap: 2.5,
            seed: 0,
            entropy: None,
            engine: Engine::Winnow,
            params: FingerprintParams::default(),
            mml: gst::DEFAULT_MML,
        }
    }
}

impl AttackConfig {
    fn validate(&self) -> Result<(), AttackError> {
        if !(0.0..=100.0).contains(&self.target) {
            return Err(AttackError::InvalidConfig(format!(
                "target must be within 0..=100, got {}",
                self.target
            )));
        }
        if self.growth_cap <= 1.0 {
            return Err(AttackError::InvalidConfig(format!(
                "growth cap must exceed 1, got {}",
                self.growth_cap
            )));
        }
        if self.mml < 1 {
            return Err(AttackError::InvalidConfig("mml must be at least 1".into()));
        }
        Ok(())
    }
}

/// One accepted mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insertion {
    /// The line as inserted (after any collision renaming).
    pub line: String,
    /// 1-based line number the insertion occupies in the variant at the
    /// time it was made.
    pub at_line: u32,
    /// Variant-vs-base score right after this insertion.
    pub score_after: f64,
}

/// A finished attack product. Deliberately free of wall-clock data so that
/// equal seeds produce equal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub base_doc_id: String,
    pub source: String,
    pub insertions: Vec<Insertion>,
    pub seed: u64,
    pub mutations: u32,
    pub final_score: f64,
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack config: {0}")]
    InvalidConfig(String),
    #[error("base program does not compile:\n{diagnostics}")]
    BaseDoesNotCompile { diagnostics: String },
    #[error("attack gave up ({reason}); best score {:.2} after {} mutations", best.final_score, best.mutations)]
    Timeout { reason: String, best: Box<Variant> },
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
}

/// Live attack run: current variant, pool, oracle handles, RNG.
pub struct AttackState<'a> {
    adapter: &'a CompilerAdapter,
    config: AttackConfig,
    base_id: String,
    base_doc: NormalizedDocument,
    base_set: FingerprintSet,
    base_artifact: CompileArtifact,
    base_lines: usize,
    pool: MutationPool,
    variant: String,
    insertions: Vec<Insertion>,
    rng: ChaCha8Rng,
    rename_counter: u32,
    mutations: u32,
}

/// Compiles and fingerprints the base, seeds the pool, and prepares the
/// first variant (a verbatim copy).
pub fn init_attack<'a>(
    base_id: &str,
    base_source: &str,
    config: AttackConfig,
    adapter: &'a CompilerAdapter,
) -> Result<AttackState<'a>, AttackError> {
    config.validate()?;
    let base_artifact = adapter.compile(base_source)?;
    if !base_artifact.success {
        return Err(AttackError::BaseDoesNotCompile {
            diagnostics: base_artifact.diagnostics,
        });
    }
    let base_doc = tokenize_c(base_id, base_source.as_bytes());
    let base_set = fingerprint_document(&base_doc, config.params);
    let pool = MutationPool::seed(base_source, config.entropy.as_deref());
    let rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(AttackState {
        adapter,
        base_id: base_id.to_string(),
        base_doc,
        base_set,
        base_artifact,
        base_lines: base_source.lines().count(),
        pool,
        variant: base_source.to_string(),
        insertions: Vec::new(),
        rng,
        rename_counter: 0,
        mutations: 0,
        config,
    })
}

impl AttackState<'_> {
    pub fn pool(&self) -> &MutationPool {
        &self.pool
    }

    pub fn variant_source(&self) -> &str {
        &self.variant
    }

    pub fn config(&self) -> &AttackConfig {
        &self.config
    }

    /// Variant-vs-base score through the configured engine. This is the
    /// same code path an offline re-check uses, so the stopping decision
    /// and any recomputation agree by construction.
    pub fn score_current(&self) -> f64 {
        score_against_base(&self.base_doc, &self.base_set, &self.variant, &self.config)
    }

    fn snapshot(&self, final_score: f64) -> Variant {
        Variant {
            base_doc_id: self.base_id.clone(),
            source: self.variant.clone(),
            insertions: self.insertions.clone(),
            seed: self.config.seed,
            mutations: self.mutations,
            final_score,
        }
    }
}

/// Scores any variant text against a prepared base using the given engine
/// and parameters.
pub fn score_against_base(
    base_doc: &NormalizedDocument,
    base_set: &FingerprintSet,
    variant_source: &str,
    config: &AttackConfig,
) -> f64 {
    let variant_id = format!("{}#variant", base_doc.doc_id);
    let vdoc = tokenize_c(&variant_id, variant_source.as_bytes());
    match config.engine {
        Engine::Winnow => {
            let vset = fingerprint_document(&vdoc, config.params);
            let index = FingerprintIndex::build([base_set.clone(), vset], None)
                .expect("two docs with matching params");
            index
                .score_pair(&base_doc.doc_id, &variant_id)
                .expect("both docs indexed")
                .score
        }
        Engine::Gst => gst::gst_match(base_doc, &vdoc, config.mml).similarity,
    }
}

/// Select-mutate-check-score until the target is reached.
pub fn run_attack(mut state: AttackState<'_>) -> Result<Variant, AttackError> {
    let mut score = state.score_current();
    if score <= state.config.target {
        return Ok(state.snapshot(score));
    }
    let give_up = |state: &AttackState<'_>, score: f64, reason: String| AttackError::Timeout {
        reason,
        best: Box::new(state.snapshot(score)),
    };
    let mut last_accept = Instant::now();
    loop {
        if last_accept.elapsed() >= state.config.timeout {
            let secs = state.config.timeout.as_secs_f64();
            return Err(give_up(
                &state,
                score,
                format!("no accepted mutation within {secs}s"),
            ));
        }
        let next_lines = state.variant.lines().count() + 1;
        if next_lines as f64 > state.config.growth_cap * state.base_lines as f64 {
            return Err(give_up(
                &state,
                score,
                format!("growth cap {}x reached", state.config.growth_cap),
            ));
        }
        let candidate = match state.pool.select(&mut state.rng) {
            Some(entry) => entry.text.clone(),
            None => {
                return Err(give_up(
                    &state,
                    score,
                    "every pool candidate is filtered out".into(),
                ))
            }
        };
        let sites = insertion_points(&state.variant);
        if sites.is_empty() {
            return Err(give_up(
                &state,
                score,
                "no insertion sites in any function body".into(),
            ));
        }
        let at = sites[state.rng.gen_range(0..sites.len())];
        let renamed = {
            let variant = &state.variant;
            rename_collisions(
                &candidate,
                &|w| pool::contains_word(variant, w),
                &mut state.rename_counter,
            )
        };
        let temp = insert_line(&state.variant, &renamed, at);
        if state
            .adapter
            .equivalent_to_artifact(&state.base_artifact, &temp)?
        {
            state.variant = temp;
            state.mutations += 1;
            state.pool.add_proven(renamed.clone());
            score = state.score_current();
            state.insertions.push(Insertion {
                line: renamed,
                at_line: at,
                score_after: score,
            });
            last_accept = Instant::now();
            if score <= state.config.target {
                return Ok(state.snapshot(score));
            }
        }
    }
}

/// Counter-derived child seed for run `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ (index + 1))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `n` independent attacks with derived seeds, in parallel. Each run
/// reports its own success or failure; one bad run does not abort the rest.
pub fn mass_plagiarize(
    base_id: &str,
    base_source: &str,
    config: &AttackConfig,
    n: usize,
    adapter: &CompilerAdapter,
) -> Vec<Result<Variant, AttackError>> {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cfg = config.clone();
            cfg.seed = derive_seed(config.seed, i as u64);
            let state = init_attack(base_id, base_source, cfg, adapter)?;
            run_attack(state)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::resolve_compiler;

    fn adapter() -> CompilerAdapter {
        CompilerAdapter::with_cc(resolve_compiler(None, None))
    }

    const BASE: &str = "\
int accumulate(int n) {
    int total = 0;
    int i;
    for (i = 0; i < n; i++) {
        total = total + i;
    }
    return total;
}

int largest(const int *values, int n) {
    int best = values[0];
    int i;
    for (i = 1; i < n; i++) {
        if (values[i] > best) {
            best = values[i];
        }
    }
    return best;
}

int clamp(int v, int lo, int hi) {
    if (v < lo) {
        return lo;
    }
    if (v > hi) {
        return hi;
    }
    return v;
}

int main(void) {
    int data[5] = { 3, 1, 4, 1, 5 };
    int sum = accumulate(10);
    int top = largest(data, 5);
    int mid = clamp(sum, 0, 40);
    int blend = (top * 7 + mid) / 2;
    while (blend > 9) {
        blend = blend - top;
    }
    return blend + mid;
}
";

    #[test]
    fn config_validation() {
        let ad = adapter();
        let bad_target = AttackConfig {
            target: 101.0,
            ..AttackConfig::default()
        };
        assert!(matches!(
            init_attack("b", BASE, bad_target, &ad),
            Err(AttackError::InvalidConfig(_))
        ));
        let bad_cap = AttackConfig {
            growth_cap: 1.0,
            ..AttackConfig::default()
        };
        assert!(matches!(
            init_attack("b", BASE, bad_cap, &ad),
            Err(AttackError::InvalidConfig(_))
        ));
    }

    #[test]
    fn non_compiling_base_refused() {
        let ad = adapter();
        match init_attack("b", "int broken(", AttackConfig::default(), &ad) {
            Err(AttackError::BaseDoesNotCompile { diagnostics }) => {
                assert!(!diagnostics.is_empty())
            }
            other => panic!("expected compile refusal, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn pool_seeding_counts() {
        let ad = adapter();
        let no_entropy = init_attack("b", BASE, AttackConfig::default(), &ad).unwrap();
        let base_lines = no_entropy.pool().len();
        assert!(base_lines <= BASE.lines().count());
        assert!(base_lines > 0);
        let cfg = AttackConfig {
            entropy: Some(default_entropy().to_string()),
            ..AttackConfig::default()
        };
        let with_entropy = init_attack("b", BASE, cfg, &ad).unwrap();
        assert_eq!(with_entropy.pool().len(), base_lines + 30);
    }

    #[test]
    fn vacuous_target_returns_variant_zero() {
        let ad = adapter();
        let cfg = AttackConfig {
            target: 100.0,
            ..AttackConfig::default()
        };
        let state = init_attack("b", BASE, cfg, &ad).unwrap();
        let v = run_attack(state).unwrap();
        assert_eq!(v.source, BASE);
        assert_eq!(v.mutations, 0);
        assert!(v.insertions.is_empty());
        assert_eq!(v.final_score, 100.0);
    }

    #[test]
    fn unfingerprintable_input_is_already_below_target() {
        // Fewer tokens than k: no fingerprints, score 0 against itself.
        let tiny = "int main(void) { return 0; }\n";
        let ad = adapter();
        let state = init_attack("t", tiny, AttackConfig::default(), &ad).unwrap();
        let v = run_attack(state).unwrap();
        assert_eq!(v.mutations, 0);
        assert_eq!(v.final_score, 0.0);
    }

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let seeds: Vec<u64> = (0..8).map(|i| derive_seed(99, i)).collect();
        let again: Vec<u64> = (0..8).map(|i| derive_seed(99, i)).collect();
        assert_eq!(seeds, again);
        let mut dedup = seeds.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), seeds.len());
        assert_ne!(derive_seed(98, 0), derive_seed(99, 0));
    }

    #[test]
    fn attack_reaches_a_moderate_target_and_replays() {
        let ad = adapter();
        let cfg = AttackConfig {
            target: 50.0,
            seed: 11,
            timeout: Duration::from_secs(120),
            entropy: Some(default_entropy().to_string()),
            ..AttackConfig::default()
        };
        let run = |cfg: AttackConfig| {
            let ad = adapter();
            let state = init_attack("base.c", BASE, cfg, &ad).unwrap();
            run_attack(state).unwrap()
        };
        let v1 = run(cfg.clone());
        assert!(v1.final_score <= 50.0, "score {}", v1.final_score);
        assert!(v1.mutations >= 1);
        assert_eq!(v1.insertions.len(), v1.mutations as usize);
        // Equivalence held for the returned variant.
        assert!(ad.equivalent(BASE, &v1.source).unwrap());
        // Growth bound.
        assert!(v1.source.lines().count() as f64 <= 2.5 * BASE.lines().count() as f64);
        // Stopping score equals an offline recompute.
        let base_doc = tokenize_c("base.c", BASE.as_bytes());
        let base_set = fingerprint_document(&base_doc, cfg.params);
        let recomputed = score_against_base(&base_doc, &base_set, &v1.source, &cfg);
        assert_eq!(v1.final_score, recomputed);
        // Identical config replays bit-identically.
        let v2 = run(cfg);
        assert_eq!(v1, v2);
    }

    #[test]
    fn every_inserted_line_appears_in_the_variant() {
        let ad = adapter();
        let cfg = AttackConfig {
            target: 60.0,
            seed: 3,
            timeout: Duration::from_secs(120),
            entropy: Some(default_entropy().to_string()),
            ..AttackConfig::default()
        };
        let state = init_attack("base.c", BASE, cfg, &ad).unwrap();
        let v = run_attack(state).unwrap();
        for ins in &v.insertions {
            assert!(
                v.source.lines().any(|l| l.trim() == ins.line.trim()),
                "inserted line {:?} missing from variant",
                ins.line
            );
        }
    }
}
