//! Corpus ingestion, experiment drivers, and deterministic reporting.
//!
//! The drivers tie the library together at desk scale: ingest a directory
//! of C files, run detection or one of the attack experiments over it, and
//! emit CSV, JSON, and HTML (with static SVG histograms) into an output
//! directory. Every driver is seeded end to end from one master seed, and
//! every serialized artifact is a pure function of (corpus manifest digest,
//! master seed, config); wall-clock timings are written to a separate file
//! so reruns stay bit-identical.

mod config;
mod corpus;
mod experiment;
mod report;

pub use config::{env_key, parse_config, resolve, resolve_with, ConfigFile};
pub use corpus::{ingest, Corpus, CorpusDoc};
pub use experiment::{
    run_countermeasure, run_detect, run_individual_plagiarism, run_mass_plagiarism, Attacker,
    CountermeasureResult, ScoreDelta,
};
pub use report::{
    histogram_svg, read_lineage, render_html, write_countermeasure, write_lineage, write_result,
    LINEAGE_FILE,
};

use std::collections::BTreeSet;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::Engine;
use crate::detector::{DetectorError, SimilarityReport};

/// Everything went through.
pub const EXIT_OK: i32 = 0;
/// Hard failure: bad input, unusable corpus, infrastructure error.
pub const EXIT_HARD: i32 = 1;
/// The run produced output but parts were skipped or gave up.
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no .c files under {0}")]
    EmptyCorpus(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("document {0} is not in the corpus")]
    UnknownDoc(String),
    #[error("corpus has {have} documents, need more than {need}")]
    CorpusTooSmall { have: usize, need: usize },
    #[error("deterministic mode produces identical variants; refusing to make {0}")]
    DetPrecludesMass(usize),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Attack(#[from] crate::attack::AttackError),
}

/// Per-variant provenance carried in results and in `lineage.json`, which
/// later countermeasure runs read to classify pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantLineage {
    pub doc_id: String,
    pub base_doc_id: String,
    pub seed: u64,
    pub mutations: u32,
    pub final_score: f64,
}

/// Score histogram with pairs split by whether a variant is involved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Pairs where neither document has variant lineage.
    pub legitimate: u64,
    /// Pairs where at least one document has variant lineage.
    pub variant_involved: u64,
}

impl Histogram {
    pub const DEFAULT_BIN_WIDTH: f64 = 5.0;

    /// Bins every pair in `report`; a pair is variant-involved iff at least
    /// one member is in `variant_ids`. Bin counts always sum to the report
    /// length.
    pub fn build(report: &SimilarityReport, variant_ids: &BTreeSet<String>) -> Histogram {
        let width = Self::DEFAULT_BIN_WIDTH;
        let n_bins = (100.0 / width) as usize;
        let mut bins: Vec<HistogramBin> = (0..n_bins)
            .map(|i| HistogramBin {
                lo: i as f64 * width,
                hi: (i + 1) as f64 * width,
                legitimate: 0,
                variant_involved: 0,
            })
            .collect();
        for pair in &report.pairs {
            let idx = ((pair.score / width) as usize).min(n_bins - 1);
            let involved = variant_ids.contains(&pair.doc_a) || variant_ids.contains(&pair.doc_b);
            if involved {
                bins[idx].variant_involved += 1;
            } else {
                bins[idx].legitimate += 1;
            }
        }
        Histogram {
            bin_width: width,
            bins,
        }
    }

    pub fn total(&self) -> u64 {
        self.bins
            .iter()
            .map(|b| b.legitimate + b.variant_involved)
            .sum()
    }
}

/// Wall-clock stage timings. Kept out of the deterministic payload and
/// written to their own file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<StageTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

impl Timings {
    pub fn push(&mut self, stage: impl Into<String>, seconds: f64) {
        self.stages.push(StageTiming {
            stage: stage.into(),
            seconds,
        });
    }
}

/// One finished experiment. Everything serialized here replays bit-for-bit
/// from (manifest digest, seed, config); `timings` is skipped on purpose.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub engine: Engine,
    pub k: u32,
    pub t: u32,
    pub mml: usize,
    pub seed: u64,
    pub manifest_digest: String,
    pub report: SimilarityReport,
    pub lineages: Vec<VariantLineage>,
    pub histogram: Histogram,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub timings: Timings,
}
