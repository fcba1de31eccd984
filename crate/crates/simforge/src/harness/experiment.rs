//! Experiment drivers: detection over a corpus, seeded plagiarism runs,
//! mass variant generation, and the assembly-level countermeasure.
//!
//! Drivers parallelize pairwise scoring and per-variant attacks but always
//! assemble results in deterministic order. Failures inside one attack or
//! one compile are recorded as warnings and the experiment continues; only
//! unusable inputs abort a run.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::corpus::{variant_doc_id, Corpus};
use super::{ExperimentResult, HarnessError, Histogram, Timings, VariantLineage};
use crate::ablation::{mossad_det, mossad_nondet, WindowParams};
use crate::attack::{
    derive_seed, init_attack, run_attack, AttackConfig, AttackError, Engine, Variant,
};
use crate::detector::{sort_ranked, FingerprintIndex, MatchedRegion, PairScore, SimilarityReport};
use crate::equivalence::{CompilerAdapter, EmitMode};
use crate::fingerprint::fingerprint_document;
use crate::gst::gst_match;
use crate::lexnorm::{tokenize_asm, tokenize_c, NormalizedDocument};

/// Which mutation engine a mass run drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attacker {
    /// Feedback-driven attack with the equivalence oracle.
    Mossad,
    /// Deterministic window sweep; identical for every plagiarist.
    AblationDet(WindowParams),
    /// Random window sweep without detector feedback.
    AblationNondet(WindowParams),
}

/// Scores every pair among `docs` with the configured engine and returns
/// the ranked, truncated report.
fn rank_documents(
    docs: &[NormalizedDocument],
    config: &AttackConfig,
    limit: usize,
) -> Result<SimilarityReport, HarnessError> {
    match config.engine {
        Engine::Winnow => {
            let sets: Vec<_> = docs
                .par_iter()
                .map(|d| fingerprint_document(d, config.params))
                .collect();
            let index = FingerprintIndex::build(sets, None)?;
            Ok(index.rank_all(limit))
        }
        Engine::Gst => {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for i in 0..docs.len() {
                for j in i + 1..docs.len() {
                    pairs.push((i, j));
                }
            }
            let mut scored: Vec<PairScore> = pairs
                .into_par_iter()
                .map(|(i, j)| gst_pair(&docs[i], &docs[j], config.mml))
                .collect();
            sort_ranked(&mut scored);
            scored.truncate(limit);
            Ok(SimilarityReport {
                pairs: scored,
                limit,
            })
        }
    }
}

fn gst_pair(a: &NormalizedDocument, b: &NormalizedDocument, mml: usize) -> PairScore {
    let result = gst_match(a, b, mml);
    let regions = result
        .tiles
        .iter()
        .map(|t| MatchedRegion {
            a_start: a.tokens[t.start_a].line,
            a_end: a.tokens[t.start_a + t.length - 1].line,
            b_start: b.tokens[t.start_b].line,
            b_end: b.tokens[t.start_b + t.length - 1].line,
        })
        .collect();
    PairScore {
        doc_a: a.doc_id.clone(),
        doc_b: b.doc_id.clone(),
        pct_a: result.similarity,
        pct_b: result.similarity,
        score: result.similarity,
        regions,
    }
}

fn tokenize_corpus(corpus: &Corpus) -> Vec<NormalizedDocument> {
    corpus
        .documents()
        .par_iter()
        .map(|doc| tokenize_c(doc.doc_id.clone(), &doc.source))
        .collect()
}

fn assemble(
    experiment: &str,
    config: &AttackConfig,
    corpus: &Corpus,
    report: SimilarityReport,
    lineages: Vec<VariantLineage>,
    warnings: Vec<String>,
    timings: Timings,
) -> ExperimentResult {
    let variant_ids: BTreeSet<String> = lineages.iter().map(|l| l.doc_id.clone()).collect();
    let histogram = Histogram::build(&report, &variant_ids);
    ExperimentResult {
        experiment: experiment.to_string(),
        engine: config.engine,
        k: config.params.k(),
        t: config.params.t(),
        mml: config.mml,
        seed: config.seed,
        manifest_digest: corpus.manifest_digest().to_string(),
        report,
        lineages,
        histogram,
        warnings,
        timings,
    }
}

/// Ranks every pair in the corpus. `config` supplies the engine and its
/// parameters; attack-only knobs are ignored.
pub fn run_detect(
    corpus: &Corpus,
    config: &AttackConfig,
    limit: usize,
) -> Result<ExperimentResult, HarnessError> {
    let mut timings = Timings::default();
    let t0 = Instant::now();
    let docs = tokenize_corpus(corpus);
    timings.push("tokenize", t0.elapsed().as_secs_f64());
    let t1 = Instant::now();
    let report = rank_documents(&docs, config, limit)?;
    timings.push("rank", t1.elapsed().as_secs_f64());
    let warnings = corpus.warnings().to_vec();
    Ok(assemble(
        "detect",
        config,
        corpus,
        report,
        Vec::new(),
        warnings,
        timings,
    ))
}

/// First `count` positions of a seeded shuffle of `0..pool_size`.
fn pick_distinct<R: Rng>(rng: &mut R, pool_size: usize, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pool_size).collect();
    for i in 0..count.min(pool_size) {
        let j = rng.gen_range(i..pool_size);
        idx.swap(i, j);
    }
    idx.truncate(count);
    idx
}

/// Picks `n_bases` documents at random, attacks each one, and ranks the
/// corpus with the variants mixed in. Attacks that give up are recorded as
/// warnings; their variants are left out and the run continues.
pub fn run_individual_plagiarism(
    corpus: &Corpus,
    n_bases: usize,
    config: &AttackConfig,
    adapter: &CompilerAdapter,
    limit: usize,
) -> Result<ExperimentResult, HarnessError> {
    if corpus.len() <= n_bases {
        return Err(HarnessError::CorpusTooSmall {
            have: corpus.len(),
            need: n_bases,
        });
    }
    let mut timings = Timings::default();
    let mut warnings = corpus.warnings().to_vec();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let chosen = pick_distinct(&mut rng, corpus.len(), n_bases);
    let bases: Vec<_> = chosen.iter().map(|&i| &corpus.documents()[i]).collect();

    let t0 = Instant::now();
    let outcomes: Vec<(String, Result<Variant, AttackError>)> = bases
        .par_iter()
        .enumerate()
        .map(|(i, doc)| {
            let source = String::from_utf8_lossy(&doc.source).into_owned();
            let mut cfg = config.clone();
            cfg.seed = derive_seed(config.seed, i as u64);
            let outcome = init_attack(&doc.doc_id, &source, cfg, adapter).and_then(run_attack);
            (doc.doc_id.clone(), outcome)
        })
        .collect();
    timings.push("attack", t0.elapsed().as_secs_f64());

    let mut extra = Vec::new();
    let mut lineages = Vec::new();
    for (base_id, outcome) in outcomes {
        match outcome {
            Ok(variant) => {
                let doc_id = variant_doc_id(&base_id, 0);
                lineages.push(VariantLineage {
                    doc_id: doc_id.clone(),
                    base_doc_id: base_id,
                    seed: variant.seed,
                    mutations: variant.mutations,
                    final_score: variant.final_score,
                });
                extra.push((doc_id, variant.source.into_bytes()));
            }
            Err(err) => warnings.push(format!("attack on {base_id} failed: {err}")),
        }
    }

    let extended = corpus.with_documents(extra)?;
    let t1 = Instant::now();
    let docs = tokenize_corpus(&extended);
    let report = rank_documents(&docs, config, limit)?;
    timings.push("rank", t1.elapsed().as_secs_f64());
    Ok(assemble(
        "individual-plagiarism",
        config,
        &extended,
        report,
        lineages,
        warnings,
        timings,
    ))
}

/// Generates `n` variants of one base document and ranks base plus
/// variants. The deterministic ablation is refused for `n > 1` because all
/// its outputs would be identical.
pub fn run_mass_plagiarism(
    corpus: &Corpus,
    base_doc_id: &str,
    n: usize,
    attacker: Attacker,
    config: &AttackConfig,
    adapter: &CompilerAdapter,
    limit: usize,
) -> Result<ExperimentResult, HarnessError> {
    let base = corpus
        .get(base_doc_id)
        .ok_or_else(|| HarnessError::UnknownDoc(base_doc_id.to_string()))?;
    if matches!(attacker, Attacker::AblationDet(_)) && n > 1 {
        return Err(HarnessError::DetPrecludesMass(n));
    }
    let source = String::from_utf8_lossy(&base.source).into_owned();

    let mut timings = Timings::default();
    let mut warnings = corpus.warnings().to_vec();
    let t0 = Instant::now();
    let outcomes: Vec<Result<Variant, AttackError>> = match attacker {
        Attacker::Mossad => {
            crate::attack::mass_plagiarize(base_doc_id, &source, config, n, adapter)
        }
        Attacker::AblationDet(w) => (0..n)
            .map(|_| mossad_det(base_doc_id, &source, w, adapter))
            .collect(),
        Attacker::AblationNondet(w) => (0..n)
            .into_par_iter()
            .map(|i| {
                mossad_nondet(
                    base_doc_id,
                    &source,
                    w,
                    adapter,
                    derive_seed(config.seed, i as u64),
                )
            })
            .collect(),
    };
    timings.push("attack", t0.elapsed().as_secs_f64());

    let mut members = vec![(base.doc_id.clone(), base.source.clone())];
    let mut lineages = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(variant) => {
                let doc_id = variant_doc_id(base_doc_id, i);
                lineages.push(VariantLineage {
                    doc_id: doc_id.clone(),
                    base_doc_id: base_doc_id.to_string(),
                    seed: variant.seed,
                    mutations: variant.mutations,
                    final_score: variant.final_score,
                });
                members.push((doc_id, variant.source.into_bytes()));
            }
            Err(err) => warnings.push(format!("variant {i} of {base_doc_id} failed: {err}")),
        }
    }

    let family = Corpus::from_documents(corpus.root().to_path_buf(), members)?;
    let t1 = Instant::now();
    let docs = tokenize_corpus(&family);
    let report = rank_documents(&docs, config, limit)?;
    timings.push("rank", t1.elapsed().as_secs_f64());
    let name = match attacker {
        Attacker::Mossad => "mass-plagiarism",
        Attacker::AblationDet(_) => "ablate-det",
        Attacker::AblationNondet(_) => "ablate-nondet",
    };
    Ok(assemble(
        name, config, &family, report, lineages, warnings, timings,
    ))
}

/// Source-level and assembly-level scores for one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreDelta {
    pub doc_a: String,
    pub doc_b: String,
    pub source_score: f64,
    pub assembly_score: f64,
    /// assembly minus source; positive means the countermeasure recovered
    /// similarity the source-level attack had hidden.
    pub delta: f64,
}

/// The countermeasure result keeps the plain source-level report next to
/// the assembly-level one so the recovery is visible per pair.
#[derive(Debug, Clone, Serialize)]
pub struct CountermeasureResult {
    pub source: ExperimentResult,
    pub assembly: ExperimentResult,
    pub deltas: Vec<ScoreDelta>,
}

/// Compiles every document at high optimization, fingerprints the emitted
/// assembly, and ranks it; the source-level ranking of the same corpus
/// rides along. Documents that fail to compile are excluded with a warning.
/// `variant_ids` marks which documents are attack products for the
/// histogram split.
pub fn run_countermeasure(
    corpus: &Corpus,
    variant_ids: &BTreeSet<String>,
    config: &AttackConfig,
    adapter: &CompilerAdapter,
    limit: usize,
) -> Result<CountermeasureResult, HarnessError> {
    let mut source_result = run_detect(corpus, config, limit)?;
    mark_variants(&mut source_result, variant_ids);
    source_result.experiment = "countermeasure-source".to_string();

    let asm_adapter = CompilerAdapter::new(
        adapter.cc(),
        adapter.opt_level(),
        EmitMode::Asm,
        adapter.timeout(),
    );
    let mut timings = Timings::default();
    let mut warnings = corpus.warnings().to_vec();
    let t0 = Instant::now();
    let compiled: Vec<(String, Result<crate::equivalence::CompileArtifact, _>)> = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let source = String::from_utf8_lossy(&doc.source).into_owned();
            (doc.doc_id.clone(), asm_adapter.compile(&source))
        })
        .collect();
    timings.push("compile", t0.elapsed().as_secs_f64());

    let mut asm_docs = Vec::new();
    for (doc_id, outcome) in compiled {
        match outcome {
            Ok(artifact) if artifact.success => {
                asm_docs.push(tokenize_asm(doc_id, &artifact.normalized));
            }
            Ok(artifact) => {
                let head = artifact.diagnostics.lines().next().unwrap_or("");
                warnings.push(format!("excluding {doc_id}: does not compile: {head}"));
            }
            Err(err) => warnings.push(format!("excluding {doc_id}: {err}")),
        }
    }

    let t1 = Instant::now();
    let report = rank_documents(&asm_docs, config, limit)?;
    timings.push("rank", t1.elapsed().as_secs_f64());
    let mut assembly = assemble(
        "countermeasure-assembly",
        config,
        corpus,
        report,
        Vec::new(),
        warnings,
        timings,
    );
    mark_variants(&mut assembly, variant_ids);

    let source_scores: BTreeMap<(String, String), f64> = source_result
        .report
        .pairs
        .iter()
        .map(|p| ((p.doc_a.clone(), p.doc_b.clone()), p.score))
        .collect();
    let deltas = assembly
        .report
        .pairs
        .iter()
        .filter_map(|p| {
            let key = (p.doc_a.clone(), p.doc_b.clone());
            source_scores.get(&key).map(|&src| ScoreDelta {
                doc_a: p.doc_a.clone(),
                doc_b: p.doc_b.clone(),
                source_score: src,
                assembly_score: p.score,
                delta: p.score - src,
            })
        })
        .collect();
    Ok(CountermeasureResult {
        source: source_result,
        assembly,
        deltas,
    })
}

/// Rebins a result's histogram using an externally supplied variant set,
/// for runs where lineage comes from a file rather than from this process.
fn mark_variants(result: &mut ExperimentResult, variant_ids: &BTreeSet<String>) {
    if !variant_ids.is_empty() {
        result.histogram = Histogram::build(&result.report, variant_ids);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::resolve_compiler;

    fn adapter() -> CompilerAdapter {
        CompilerAdapter::with_cc(resolve_compiler(None, None))
    }

    fn mem_corpus(docs: &[(&str, &str)]) -> Corpus {
        Corpus::from_documents(
            "mem",
            docs.iter()
                .map(|(id, src)| (id.to_string(), src.as_bytes().to_vec()))
                .collect(),
        )
        .unwrap()
    }

    const RING: &str = "\
int ring_add(int a, int b, int m) {
    int s = a + b;
    while (s >= m) {
        s = s - m;
    }
    while (s < 0) {
        s = s + m;
    }
    return s;
}

int main(void) {
    int acc = 0;
    int i;
    for (i = 0; i < 12; i++) {
        acc = ring_add(acc, i * 5, 9);
    }
    return acc;
}
";

    const OTHER: &str = "\
unsigned fold(unsigned x) {
    unsigned y = x ^ (x >> 3);
    unsigned z = y * 2654435761u;
    return z ^ (z >> 7);
}

int main(void) {
    unsigned h = 2166136261u;
    unsigned i;
    for (i = 0; i < 6; i++) {
        h = fold(h + i);
    }
    return (int)(h & 63u);
}
";

    #[test]
    fn detect_identical_docs_is_one_full_bin() {
        let corpus = mem_corpus(&[("a.c", RING), ("b.c", RING)]);
        let result = run_detect(&corpus, &AttackConfig::default(), 250).unwrap();
        assert_eq!(result.report.pairs.len(), 1);
        assert_eq!(result.report.pairs[0].score, 100.0);
        assert_eq!(result.histogram.total(), 1);
        assert_eq!(result.histogram.bins[19].legitimate, 1);
        assert!(result.lineages.is_empty());
    }

    #[test]
    fn detect_equals_manual_composition() {
        let corpus = mem_corpus(&[("a.c", RING), ("b.c", OTHER), ("c.c", RING)]);
        let config = AttackConfig::default();
        let result = run_detect(&corpus, &config, 250).unwrap();

        let docs: Vec<_> = corpus
            .documents()
            .iter()
            .map(|d| tokenize_c(d.doc_id.clone(), &d.source))
            .collect();
        let sets: Vec<_> = docs
            .iter()
            .map(|d| fingerprint_document(d, config.params))
            .collect();
        let index = FingerprintIndex::build(sets, None).unwrap();
        assert_eq!(result.report, index.rank_all(250));
    }

    #[test]
    fn detect_gst_engine_maps_tiles_to_lines() {
        let corpus = mem_corpus(&[("a.c", RING), ("b.c", RING)]);
        let config = AttackConfig {
            engine: Engine::Gst,
            ..AttackConfig::default()
        };
        let result = run_detect(&corpus, &config, 250).unwrap();
        let pair = &result.report.pairs[0];
        assert_eq!(pair.score, 100.0);
        assert!(!pair.regions.is_empty());
        assert!(pair.regions.iter().all(|r| r.a_start >= 1 && r.a_end <= 19));
    }

    #[test]
    fn individual_with_zero_bases_is_pure_detection() {
        let corpus = mem_corpus(&[("a.c", RING), ("b.c", OTHER)]);
        let config = AttackConfig::default();
        let ad = adapter();
        let plag = run_individual_plagiarism(&corpus, 0, &config, &ad, 250).unwrap();
        let detect = run_detect(&corpus, &config, 250).unwrap();
        assert_eq!(plag.report, detect.report);
        assert!(plag.lineages.is_empty());
    }

    #[test]
    fn individual_requires_a_larger_corpus() {
        let corpus = mem_corpus(&[("a.c", RING)]);
        let err = run_individual_plagiarism(&corpus, 1, &AttackConfig::default(), &adapter(), 250);
        assert!(matches!(
            err,
            Err(HarnessError::CorpusTooSmall { have: 1, need: 1 })
        ));
    }

    #[test]
    fn individual_attacks_selected_bases_and_bins_them() {
        let corpus = mem_corpus(&[
            ("a.c", RING),
            ("b.c", OTHER),
            ("c.c", "int main(void) { return 3; }\n"),
        ]);
        let config = AttackConfig {
            target: 60.0,
            seed: 5,
            timeout: std::time::Duration::from_secs(60),
            ..AttackConfig::default()
        };
        let result = run_individual_plagiarism(&corpus, 1, &config, &adapter(), 250).unwrap();
        let made = result.lineages.len();
        assert!(made <= 1);
        if made == 1 {
            let lineage = &result.lineages[0];
            assert!(lineage.doc_id.contains("_v0"));
            assert!(lineage.final_score <= 60.0);
            let involved: u64 = result
                .histogram
                .bins
                .iter()
                .map(|b| b.variant_involved)
                .sum();
            // Variant pairs with each original: corpus has 3 originals.
            assert_eq!(involved, 3);
        } else {
            assert!(!result.warnings.is_empty());
        }
    }

    #[test]
    fn mass_unknown_base_refused() {
        let corpus = mem_corpus(&[("a.c", RING)]);
        let err = run_mass_plagiarism(
            &corpus,
            "nope.c",
            2,
            Attacker::Mossad,
            &AttackConfig::default(),
            &adapter(),
            250,
        );
        assert!(matches!(err, Err(HarnessError::UnknownDoc(_))));
    }

    #[test]
    fn mass_det_refused_for_more_than_one() {
        let corpus = mem_corpus(&[("a.c", RING)]);
        let err = run_mass_plagiarism(
            &corpus,
            "a.c",
            3,
            Attacker::AblationDet(WindowParams::default()),
            &AttackConfig::default(),
            &adapter(),
            250,
        );
        assert!(matches!(err, Err(HarnessError::DetPrecludesMass(3))));
    }

    #[test]
    fn mass_nondet_ranks_base_and_variants() {
        let corpus = mem_corpus(&[("a.c", RING), ("b.c", OTHER)]);
        let config = AttackConfig {
            seed: 9,
            ..AttackConfig::default()
        };
        let result = run_mass_plagiarism(
            &corpus,
            "a.c",
            2,
            Attacker::AblationNondet(WindowParams::default()),
            &config,
            &adapter(),
            250,
        )
        .unwrap();
        assert_eq!(result.lineages.len(), 2);
        // Base plus two variants: three docs, three pairs, all involved.
        assert_eq!(result.report.pairs.len(), 3);
        let involved: u64 = result
            .histogram
            .bins
            .iter()
            .map(|b| b.variant_involved)
            .sum();
        assert_eq!(involved, 3);
        assert_ne!(result.lineages[0].seed, result.lineages[1].seed);
    }

    #[test]
    fn countermeasure_recovers_hidden_similarity() {
        let variant = format!(
            "int pad_0 = 0;\n{}",
            RING.replace(
                "    int s = a + b;\n",
                "    int s = a + b;\n    long quiet_1 = 0;\n    unsigned quiet_2 = 0;\n"
            )
        );
        let corpus = mem_corpus(&[
            ("a.c", RING),
            ("a_v0.c", &variant),
            ("broken.c", "int main(void { return; }\n"),
        ]);
        let variants: BTreeSet<String> = ["a_v0.c".to_string()].into();
        let result = run_countermeasure(
            &corpus,
            &variants,
            &AttackConfig::default(),
            &adapter(),
            250,
        )
        .unwrap();

        assert_eq!(result.source.experiment, "countermeasure-source");
        assert_eq!(result.assembly.experiment, "countermeasure-assembly");
        // broken.c is excluded from the assembly side only.
        assert_eq!(result.source.report.pairs.len(), 3);
        assert_eq!(result.assembly.report.pairs.len(), 1);
        assert!(result
            .assembly
            .warnings
            .iter()
            .any(|w| w.contains("broken.c")));

        let pair = &result.assembly.report.pairs[0];
        assert_eq!(
            pair.score, 100.0,
            "dead locals must vanish from the assembly"
        );
        assert_eq!(result.deltas.len(), 1);
        assert_eq!(result.deltas[0].assembly_score, 100.0);
        assert!(result.deltas[0].delta >= 0.0);
        let involved: u64 = result
            .assembly
            .histogram
            .bins
            .iter()
            .map(|b| b.variant_involved)
            .sum();
        assert_eq!(involved, 1);
    }

    #[test]
    fn pick_distinct_is_seeded_and_unique() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let once = pick_distinct(&mut rng, 10, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let twice = pick_distinct(&mut rng, 10, 4);
        assert_eq!(once, twice);
        let mut sorted = once.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert!(once.iter().all(|&i| i < 10));
    }
}
