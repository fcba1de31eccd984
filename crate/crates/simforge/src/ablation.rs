//! Ablated attackers that blanket source windows with insertions instead of
//! steering by detector feedback.
//!
//! Two modes share the window sweep. `mossad_det` inserts one fresh, counted
//! declaration per window and is a pure function of its input, so every run
//! over the same base produces the same bytes. `mossad_nondet` draws random
//! source lines and random in-window positions from a seeded RNG, retrying a
//! bounded number of times per window. Both gate each insertion on compiled
//! equivalence with the base, exactly like the feedback-driven attack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::{
    contains_word, insert_line, insertion_points, rename_collisions, score_against_base,
    AttackConfig, AttackError, Insertion, MutationPool, Variant,
};
use crate::equivalence::{CompileArtifact, CompilerAdapter};
use crate::fingerprint::fingerprint_document;
use crate::lexnorm::tokenize_c;

pub const DEFAULT_W_LINES: usize = 4;

/// Window geometry for the sweep; windows tile the source lines in
/// consecutive, non-overlapping runs of `w_lines`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowParams {
    pub w_lines: usize,
}

impl Default for WindowParams {
    fn default() -> Self {
        WindowParams {
            w_lines: DEFAULT_W_LINES,
        }
    }
}

impl WindowParams {
    fn validate(&self) -> Result<(), AttackError> {
        if self.w_lines == 0 {
            return Err(AttackError::InvalidConfig(
                "w_lines must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Retry budget per window: max(1, ceil(w * log2(w))).
pub fn attempts_per_window(w_lines: usize) -> u32 {
    let w = w_lines as f64;
    let scheduled = (w * w.log2()).ceil();
    (scheduled as u32).max(1)
}

struct Sweep<'a> {
    adapter: &'a CompilerAdapter,
    base_artifact: CompileArtifact,
    variant: String,
    insertions: Vec<Insertion>,
    /// Lines inserted so far; maps current line numbers back to base lines.
    offset: u32,
    scoring: ScoreHandle,
}

/// Base-side detector state kept only for score bookkeeping; the sweep never
/// consults it to make decisions.
struct ScoreHandle {
    base_doc: crate::lexnorm::NormalizedDocument,
    base_set: crate::fingerprint::FingerprintSet,
    config: AttackConfig,
}

impl ScoreHandle {
    fn score(&self, variant_source: &str) -> f64 {
        score_against_base(&self.base_doc, &self.base_set, variant_source, &self.config)
    }
}

impl<'a> Sweep<'a> {
    fn start(
        base_doc_id: &str,
        base_source: &str,
        adapter: &'a CompilerAdapter,
    ) -> Result<Sweep<'a>, AttackError> {
        let base_artifact = adapter.compile(base_source)?;
        if !base_artifact.success {
            return Err(AttackError::BaseDoesNotCompile {
                diagnostics: base_artifact.diagnostics,
            });
        }
        let config = AttackConfig::default();
        let base_doc = tokenize_c(base_doc_id, base_source.as_bytes());
        let base_set = fingerprint_document(&base_doc, config.params);
        Ok(Sweep {
            adapter,
            base_artifact,
            variant: base_source.to_string(),
            insertions: Vec::new(),
            offset: 0,
            scoring: ScoreHandle {
                base_doc,
                base_set,
                config,
            },
        })
    }

    /// Insertion sites that fall inside the window of base lines
    /// `lo..=hi`, in current-variant line numbers, ascending. A site
    /// "before line L" belongs to the window whose lines it lands among,
    /// including the seam directly after the window's last line.
    fn sites_in_window(&self, lo: usize, hi: usize) -> Vec<u32> {
        insertion_points(&self.variant)
            .into_iter()
            .filter(|&l| {
                let orig = l as i64 - self.offset as i64;
                orig > lo as i64 && orig <= hi as i64 + 1
            })
            .collect()
    }

    fn try_insert(&mut self, text: &str, site: u32) -> Result<bool, AttackError> {
        let candidate = insert_line(&self.variant, text, site);
        if !self
            .adapter
            .equivalent_to_artifact(&self.base_artifact, &candidate)?
        {
            return Ok(false);
        }
        self.variant = candidate;
        self.offset += 1;
        let score_after = self.scoring.score(&self.variant);
        self.insertions.push(Insertion {
            line: text.to_string(),
            at_line: site,
            score_after,
        });
        Ok(true)
    }

    fn finish(self, base_doc_id: &str, seed: u64) -> Variant {
        let final_score = self.scoring.score(&self.variant);
        Variant {
            base_doc_id: base_doc_id.to_string(),
            source: self.variant,
            insertions: self.insertions,
            seed,
            mutations: self.offset,
            final_score,
        }
    }
}

/// Tiles the base into `w_lines` windows and deterministically inserts one
/// fresh zero-initialized declaration into each window that will take one.
/// Sites are tried in order, at most `w_lines` attempts per window; a window
/// with no passing site is skipped. Output is a pure function of the input.
pub fn mossad_det(
    base_doc_id: &str,
    base_source: &str,
    params: WindowParams,
    adapter: &CompilerAdapter,
) -> Result<Variant, AttackError> {
    params.validate()?;
    let mut sweep = Sweep::start(base_doc_id, base_source, adapter)?;
    let n_lines = base_source.lines().count();
    let mut counter: u32 = 0;
    let mut window_start = 1usize;
    while window_start <= n_lines {
        let window_end = (window_start + params.w_lines - 1).min(n_lines);
        let sites = sweep.sites_in_window(window_start, window_end);
        for &site in sites.iter().take(params.w_lines) {
            let decl = fresh_declaration(&mut counter, &sweep.variant);
            if sweep.try_insert(&decl, site)? {
                break;
            }
        }
        window_start = window_end + 1;
    }
    Ok(sweep.finish(base_doc_id, 0))
}

/// Declaration templates cycle by counter; any name the source already uses
/// is skipped so the insertion cannot capture or shadow existing variables.
fn fresh_declaration(counter: &mut u32, variant: &str) -> String {
    loop {
        let n = *counter;
        *counter += 1;
        let ty = match n % 3 {
            0 => "int",
            1 => "long",
            _ => "unsigned",
        };
        let name = format!("det_{n}");
        if !contains_word(variant, &name) {
            return format!("{ty} {name} = 0;");
        }
    }
}

/// Tiles the base into `w_lines` windows; per window, up to
/// `attempts_per_window` tries of a random pool line at a random in-window
/// site, keeping the first insertion that preserves equivalence. At most one
/// line lands per window.
pub fn mossad_nondet(
    base_doc_id: &str,
    base_source: &str,
    params: WindowParams,
    adapter: &CompilerAdapter,
    seed: u64,
) -> Result<Variant, AttackError> {
    params.validate()?;
    let mut sweep = Sweep::start(base_doc_id, base_source, adapter)?;
    let pool = MutationPool::seed(base_source, None);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rename_counter: u32 = 0;
    let n_lines = base_source.lines().count();
    let budget = attempts_per_window(params.w_lines);
    let mut window_start = 1usize;
    while window_start <= n_lines {
        let window_end = (window_start + params.w_lines - 1).min(n_lines);
        let sites = sweep.sites_in_window(window_start, window_end);
        if !sites.is_empty() {
            for _ in 0..budget {
                let entry = match pool.select(&mut rng) {
                    Some(entry) => entry,
                    None => break,
                };
                let line = entry.text.clone();
                let site = sites[rng.gen_range(0..sites.len())];
                let variant = &sweep.variant;
                let renamed = rename_collisions(
                    &line,
                    &|name| contains_word(variant, name),
                    &mut rename_counter,
                );
                if sweep.try_insert(&renamed, site)? {
                    break;
                }
            }
        }
        window_start = window_end + 1;
    }
    Ok(sweep.finish(base_doc_id, seed))
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

int spread(int lo, int hi) {
    int gap = hi - lo;
    if (gap < 0) {
        gap = -gap;
    }
    return gap;
}

int main(void) {
    int left = accumulate(6);
    int right = spread(left, 40);
    int mix = left * 2 + right;
    return mix;
}
";

    #[test]
    fn attempt_budget_formula() {
        assert_eq!(attempts_per_window(1), 1);
        assert_eq!(attempts_per_window(2), 2);
        assert_eq!(attempts_per_window(3), 5);
        assert_eq!(attempts_per_window(4), 8);
    }

    #[test]
    fn zero_window_refused() {
        let ad = adapter();
        let params = WindowParams { w_lines: 0 };
        assert!(matches!(
            mossad_det("b", BASE, params, &ad),
            Err(AttackError::InvalidConfig(_))
        ));
        assert!(matches!(
            mossad_nondet("b", BASE, params, &ad, 1),
            Err(AttackError::InvalidConfig(_))
        ));
    }

    #[test]
    fn non_compiling_base_refused() {
        let ad = adapter();
        let err = mossad_det(
            "b",
            "int main(void { return; }",
            WindowParams::default(),
            &ad,
        );
        assert!(matches!(err, Err(AttackError::BaseDoesNotCompile { .. })));
    }

    #[test]
    fn det_is_deterministic_and_equivalent() {
        let ad = adapter();
        let v1 = mossad_det("b", BASE, WindowParams::default(), &ad).unwrap();
        let v2 = mossad_det("b", BASE, WindowParams::default(), &ad).unwrap();
        assert_eq!(v1, v2);
        assert!(v1.mutations >= 1, "expected at least one insertion");
        assert_eq!(v1.mutations as usize, v1.insertions.len());
        assert!(ad.equivalent(BASE, &v1.source).unwrap());
        for ins in &v1.insertions {
            assert!(
                ins.line.starts_with("int det_")
                    || ins.line.starts_with("long det_")
                    || ins.line.starts_with("unsigned det_")
            );
            assert!(ins.line.ends_with("= 0;"));
        }
    }

    #[test]
    fn two_det_plagiarists_collide_at_full_score() {
        let ad = adapter();
        let a = mossad_det("alice", BASE, WindowParams::default(), &ad).unwrap();
        let b = mossad_det("bob", BASE, WindowParams::default(), &ad).unwrap();
        assert_eq!(a.source, b.source);
        let doc_a = tokenize_c("alice", a.source.as_bytes());
        let doc_b = tokenize_c("bob", b.source.as_bytes());
        let params = crate::fingerprint::FingerprintParams::default();
        let index = crate::detector::FingerprintIndex::build(
            [
                fingerprint_document(&doc_a, params),
                fingerprint_document(&doc_b, params),
            ],
            None,
        )
        .unwrap();
        let pair = index.score_pair("alice", "bob").unwrap();
        assert_eq!(pair.score, 100.0);
    }

    #[test]
    fn det_counter_skips_names_already_in_use() {
        let taken = "\
int main(void) {
    int det_0 = 9;
    int det_1 = 8;
    return det_0 + det_1;
}
";
        let ad = adapter();
        let v = mossad_det("b", taken, WindowParams::default(), &ad).unwrap();
        assert!(v.mutations >= 1);
        for ins in &v.insertions {
            assert!(!ins.line.contains("det_0 ") && !ins.line.contains("det_1 "));
        }
        assert!(ad.equivalent(taken, &v.source).unwrap());
    }

    #[test]
    fn one_line_bodies_leave_no_sites() {
        let src = "\
void touch(void) {}
int main(void) { return 0; }
";
        let ad = adapter();
        let v = mossad_det("b", src, WindowParams::default(), &ad).unwrap();
        assert_eq!(v.source, src);
        assert_eq!(v.mutations, 0);
        assert_eq!(v.final_score, 100.0);
    }

    #[test]
    fn nondet_replays_under_a_fixed_seed() {
        let ad = adapter();
        let v1 = mossad_nondet("b", BASE, WindowParams::default(), &ad, 7).unwrap();
        let v2 = mossad_nondet("b", BASE, WindowParams::default(), &ad, 7).unwrap();
        assert_eq!(v1, v2);
        assert!(v1.mutations >= 1);
        assert!(ad.equivalent(BASE, &v1.source).unwrap());
    }

    #[test]
    fn nondet_seeds_diverge() {
        let ad = adapter();
        let v7 = mossad_nondet("b", BASE, WindowParams::default(), &ad, 7).unwrap();
        let v8 = mossad_nondet("b", BASE, WindowParams::default(), &ad, 8).unwrap();
        assert_ne!(v7.source, v8.source);
    }

    #[test]
    fn nondet_inserts_at_most_one_line_per_window() {
        let ad = adapter();
        let w = 4usize;
        let v = mossad_nondet("b", BASE, WindowParams { w_lines: w }, &ad, 7).unwrap();
        let windows = BASE.lines().count().div_ceil(w);
        assert!(v.mutations as usize <= windows);
        // Each insertion's base-coordinate window index strictly increases.
        // A window covering base lines lo..=hi owns sites before base
        // lines lo+1..=hi+1, so the owning index is (site - 2) / w.
        let mut last_window = None;
        for (shift, ins) in v.insertions.iter().enumerate() {
            let orig = ins.at_line as usize - shift;
            let window = (orig - 2) / w;
            if let Some(prev) = last_window {
                assert!(window > prev, "two insertions in window {window}");
            }
            last_window = Some(window);
        }
    }
}
