//! Code-similarity detection, attacks against it, and a countermeasure.
//!
//! The crate has three layers:
//!
//! * **Detection.** [`lexnorm`] normalizes C or assembly into token-class
//!   streams; [`fingerprint`] turns streams into winnowed k-gram hash sets;
//!   [`detector`] indexes fingerprint sets and ranks pairwise similarity as
//!   matched-line percentages; [`gst`] is an independent greedy string
//!   tiling comparator for cross-checking.
//! * **Attack.** [`equivalence`] proves two sources behave identically by
//!   compiling both at high optimization and comparing normalized output;
//!   [`attack`] uses that oracle to insert semantics-preserving lines
//!   drawn from the program itself until the similarity score drops below a
//!   target; [`ablation`] reruns the same idea without detector feedback,
//!   blanketing fixed source windows instead, to show the feedback loop is
//!   load-bearing.
//! * **Harness.** [`harness`] ingests corpora, runs detection and attack
//!   experiments end to end, and writes deterministic reports; the
//!   `simforge` binary is a thin command-line front end over it.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability, from fingerprinting a pair of files to running the full
//! attack-and-countermeasure loop against a compiler.

pub mod ablation;
pub mod attack;
pub mod detector;
pub mod equivalence;
pub mod fingerprint;
pub mod gst;
pub mod harness;
pub mod lexnorm;

pub use detector::{FingerprintIndex, PairScore, SimilarityReport};
pub use fingerprint::{Fingerprint, FingerprintParams, FingerprintSet};
pub use lexnorm::{NormalizedDocument, Token, TokenKind};
