//! Thin command-line front end over the library.
//!
//! Every setting resolves in layers: built-in default, then `--config`
//! file (`key = value` lines), then the CLI flag, then a `SIMFORGE_<KEY>`
//! environment variable. Exit code 0 means a clean run, 2 means the run
//! finished but skipped or gave up on parts, 1 means a hard error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use simforge::ablation::{mossad_det, mossad_nondet, WindowParams};
use simforge::attack::{
    default_entropy, derive_seed, init_attack, run_attack, AttackConfig, Engine, Variant,
};
use simforge::equivalence::{resolve_compiler, CompilerAdapter, EmitMode};
use simforge::fingerprint::FingerprintParams;
use simforge::harness::{
    self, env_key, ingest, parse_config, read_lineage, run_countermeasure, run_detect,
    write_countermeasure, write_lineage, write_result, ConfigFile, Corpus, ExperimentResult,
    Histogram, VariantLineage, EXIT_HARD, EXIT_OK, EXIT_PARTIAL, LINEAGE_FILE,
};

#[derive(Parser)]
#[command(
    name = "simforge",
    version,
    about = "Code similarity detection and red teaming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Fingerprint k-gram length.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Winnowing guarantee threshold in tokens.
    #[arg(long, global = true)]
    t: Option<u32>,
    /// Similarity engine: winnow or gst.
    #[arg(long, global = true)]
    engine: Option<String>,
    /// Minimum match length for the gst engine.
    #[arg(long, global = true)]
    mml: Option<usize>,
    /// Master seed; per-variant seeds derive from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Keep at most this many ranked pairs.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Settings file with key = value lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// C compiler; SIMFORGE_CC overrides.
    #[arg(long, global = true)]
    cc: Option<String>,
    /// Optimization level passed as -O<n>.
    #[arg(long, global = true)]
    opt_level: Option<u8>,
    /// Compare compiler output as asm or obj.
    #[arg(long, global = true)]
    emit: Option<String>,
    /// Per-compile budget in seconds.
    #[arg(long, global = true, value_name = "SECONDS")]
    compile_timeout: Option<f64>,
}

#[derive(Args)]
struct AttackFlags {
    /// Stop once the variant-vs-base score is at or below this percent.
    #[arg(long)]
    target: Option<f64>,
    /// Extra declaration lines to mix into the mutation pool.
    #[arg(long, value_name = "FILE")]
    entropy: Option<PathBuf>,
    /// Draw mutations only from the base program itself.
    #[arg(long)]
    no_entropy: bool,
    /// Give up after this long without an accepted mutation.
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    /// Cap variant growth at this multiple of the base line count.
    #[arg(long)]
    growth_cap: Option<f64>,
    /// How many variants to produce.
    #[arg(long)]
    variants: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AblateMode {
    /// Deterministic window sweep; same output every run.
    Det,
    /// Seeded random window sweep.
    Nondet,
}

#[derive(Subcommand)]
enum Command {
    /// Rank every pair of .c files under a directory.
    Detect { dir: PathBuf },
    /// Mutate one file until it slips under the detector's target score.
    Attack {
        file: PathBuf,
        #[command(flatten)]
        flags: AttackFlags,
    },
    /// Run a window-sweep attacker with the detector out of the loop.
    Ablate {
        #[arg(value_enum)]
        mode: AblateMode,
        file: PathBuf,
        /// Window size in source lines.
        #[arg(long)]
        w_lines: Option<usize>,
        #[arg(long)]
        variants: Option<usize>,
    },
    /// Produce many variants of one file and rank the whole family.
    Mass {
        file: PathBuf,
        #[command(flatten)]
        flags: AttackFlags,
    },
    /// Compile a corpus to assembly and rank that next to the source run.
    Countermeasure { dir: PathBuf },
    /// Re-render report files from a stored result.json.
    Report { result: PathBuf },
}

struct Settings {
    config: Option<ConfigFile>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Settings> {
        let config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Some(parse_config(&text)?)
            }
            None => None,
        };
        Ok(Settings { config })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.config.as_ref().and_then(|c| c.get(key))
    }

    /// default < config file < CLI flag < environment.
    fn get<T>(&self, key: &str, cli: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if let Ok(text) = std::env::var(env_key(key)) {
            if !text.is_empty() {
                return text
                    .parse()
                    .map_err(|e| anyhow!("bad {} from ${}: {e}", key, env_key(key)));
            }
        }
        if let Some(value) = cli {
            return Ok(value);
        }
        if let Some(text) = self.raw(key) {
            return text
                .parse()
                .map_err(|e| anyhow!("bad {key} in config file: {e}"));
        }
        Ok(default)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_HARD,
            };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_HARD as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let settings = Settings::load(cli.config.as_deref())?;
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("simforge-out"));
    match &cli.command {
        Command::Detect { dir } => cmd_detect(&cli, &settings, dir, &out_dir),
        Command::Attack { file, flags } => cmd_attack(&cli, &settings, file, flags, &out_dir),
        Command::Ablate {
            mode,
            file,
            w_lines,
            variants,
        } => cmd_ablate(&cli, &settings, *mode, file, *w_lines, *variants, &out_dir),
        Command::Mass { file, flags } => cmd_mass(&cli, &settings, file, flags, &out_dir),
        Command::Countermeasure { dir } => cmd_countermeasure(&cli, &settings, dir, &out_dir),
        Command::Report { result } => cmd_report(result, &out_dir),
    }
}

fn base_config(cli: &Cli, settings: &Settings) -> Result<AttackConfig> {
    let k = settings.get("k", cli.k, FingerprintParams::DEFAULT_K)?;
    let t = settings.get("t", cli.t, FingerprintParams::DEFAULT_T)?;
    let params = FingerprintParams::new(k, t)?;
    let engine_text = settings.get("engine", cli.engine.clone(), "winnow".to_string())?;
    let engine = Engine::from_str(&engine_text).map_err(|e| anyhow!(e))?;
    let defaults = AttackConfig::default();
    Ok(AttackConfig {
        params,
        engine,
        mml: settings.get("mml", cli.mml, defaults.mml)?,
        seed: settings.get("seed", cli.seed, defaults.seed)?,
        ..defaults
    })
}

fn attack_config(cli: &Cli, settings: &Settings, flags: &AttackFlags) -> Result<AttackConfig> {
    let mut config = base_config(cli, settings)?;
    let defaults = AttackConfig::default();
    config.target = settings.get("target", flags.target, defaults.target)?;
    config.growth_cap = settings.get("growth-cap", flags.growth_cap, defaults.growth_cap)?;
    let timeout = settings.get("timeout", flags.timeout, defaults.timeout.as_secs_f64())?;
    config.timeout = Duration::from_secs_f64(timeout);
    config.entropy = if flags.no_entropy {
        None
    } else {
        let path = match &flags.entropy {
            Some(path) => Some(path.clone()),
            None => settings.raw("entropy").map(PathBuf::from),
        };
        match path {
            Some(path) => Some(
                std::fs::read_to_string(&path)
                    .with_context(|| format!("reading entropy file {}", path.display()))?,
            ),
            None => Some(default_entropy().to_string()),
        }
    };
    Ok(config)
}

fn adapter(cli: &Cli, settings: &Settings) -> Result<CompilerAdapter> {
    let cc = resolve_compiler(cli.cc.as_deref(), settings.raw("cc"));
    let opt_level = settings.get(
        "opt-level",
        cli.opt_level,
        CompilerAdapter::DEFAULT_OPT_LEVEL,
    )?;
    let emit_text = settings.get("emit", cli.emit.clone(), "asm".to_string())?;
    let emit = match emit_text.as_str() {
        "asm" => EmitMode::Asm,
        "obj" => EmitMode::Obj,
        other => bail!("unknown emit mode {other:?}, expected asm or obj"),
    };
    let timeout = settings.get(
        "compile-timeout",
        cli.compile_timeout,
        CompilerAdapter::DEFAULT_TIMEOUT.as_secs_f64(),
    )?;
    Ok(CompilerAdapter::new(
        cc,
        opt_level,
        emit,
        Duration::from_secs_f64(timeout),
    ))
}

fn limit_of(cli: &Cli, settings: &Settings) -> Result<usize> {
    settings.get(
        "limit",
        cli.limit,
        simforge::FingerprintIndex::DEFAULT_LIMIT,
    )
}

fn write_manifest(corpus: &Corpus, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("manifest.tsv"), corpus.manifest_text())?;
    Ok(())
}

fn report_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

fn finish(result: &ExperimentResult, out_dir: &Path) -> Result<i32> {
    let written = write_result(result, out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    if let Some(top) = result.report.pairs.first() {
        println!(
            "top pair: {} vs {} scores {:.2}",
            top.doc_a, top.doc_b, top.score
        );
    }
    report_warnings(&result.warnings);
    Ok(if result.warnings.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

fn cmd_detect(cli: &Cli, settings: &Settings, dir: &Path, out_dir: &Path) -> Result<i32> {
    let config = base_config(cli, settings)?;
    let limit = limit_of(cli, settings)?;
    let corpus = ingest(dir)?;
    println!(
        "ingested {} documents from {} (digest {})",
        corpus.len(),
        dir.display(),
        &corpus.manifest_digest()[..12]
    );
    write_manifest(&corpus, out_dir)?;
    let result = run_detect(&corpus, &config, limit)?;
    finish(&result, out_dir)
}

/// Sidecar written next to each produced variant: the full insertion log
/// plus how long the run took and whether it gave up.
#[derive(Serialize)]
struct VariantSidecar<'a> {
    #[serde(flatten)]
    variant: &'a Variant,
    seconds: f64,
    gave_up: Option<String>,
}

struct FamilyOutcome {
    lineages: Vec<VariantLineage>,
    /// doc_id -> variant source, in lineage order.
    sources: Vec<(String, String)>,
    gave_up: usize,
}

fn doc_id_of(file: &Path) -> String {
    file.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn variant_id(base_id: &str, index: usize) -> String {
    match base_id.strip_suffix(".c") {
        Some(stem) => format!("{stem}_v{index}.c"),
        None => format!("{base_id}_v{index}"),
    }
}

/// Runs `n` seeded attacks against one file and writes each variant with
/// its sidecar. Attacks that give up still emit their best variant; the
/// caller decides how that affects the exit code.
fn produce_family<F>(base_id: &str, n: usize, out_dir: &Path, attack_fn: F) -> Result<FamilyOutcome>
where
    F: Fn(
            usize,
        ) -> (
            u64,
            std::result::Result<Variant, simforge::attack::AttackError>,
        ) + Sync,
{
    std::fs::create_dir_all(out_dir)?;
    let runs: Vec<(u64, std::result::Result<Variant, _>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let (seed, outcome) = attack_fn(i);
            (seed, outcome, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut outcome = FamilyOutcome {
        lineages: Vec::new(),
        sources: Vec::new(),
        gave_up: 0,
    };
    for (i, (seed, run, seconds)) in runs.into_iter().enumerate() {
        let (variant, gave_up) = match run {
            Ok(variant) => (variant, None),
            Err(simforge::attack::AttackError::Timeout { reason, best }) => {
                outcome.gave_up += 1;
                eprintln!("warning: variant {i} of {base_id} gave up: {reason}");
                (*best, Some(reason))
            }
            Err(err) => return Err(err.into()),
        };
        let doc_id = variant_id(base_id, i);
        let source_path = out_dir.join(&doc_id);
        std::fs::write(&source_path, &variant.source)?;
        let sidecar = VariantSidecar {
            variant: &variant,
            seconds,
            gave_up,
        };
        let sidecar_path = out_dir.join(format!("{doc_id}.json"));
        let mut text = serde_json::to_string_pretty(&sidecar)?;
        text.push('\n');
        std::fs::write(&sidecar_path, text)?;
        println!(
            "wrote {} (score {:.2} after {} insertions)",
            source_path.display(),
            variant.final_score,
            variant.mutations
        );
        outcome.lineages.push(VariantLineage {
            doc_id: doc_id.clone(),
            base_doc_id: base_id.to_string(),
            seed,
            mutations: variant.mutations,
            final_score: variant.final_score,
        });
        outcome.sources.push((doc_id, variant.source));
    }
    write_lineage(&outcome.lineages, out_dir)?;
    println!("wrote {}", out_dir.join(LINEAGE_FILE).display());
    Ok(outcome)
}

fn cmd_attack(
    cli: &Cli,
    settings: &Settings,
    file: &Path,
    flags: &AttackFlags,
    out_dir: &Path,
) -> Result<i32> {
    let config = attack_config(cli, settings, flags)?;
    let adapter = adapter(cli, settings)?;
    let n = settings.get("variants", flags.variants, 1usize)?;
    if n == 0 {
        bail!("--variants must be at least 1");
    }
    let source =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let base_id = doc_id_of(file);
    let outcome = produce_family(&base_id, n, out_dir, |i| {
        let mut cfg = config.clone();
        if n > 1 {
            cfg.seed = derive_seed(config.seed, i as u64);
        }
        let seed = cfg.seed;
        let run = init_attack(&base_id, &source, cfg, &adapter).and_then(run_attack);
        (seed, run)
    })?;
    Ok(if outcome.gave_up == 0 {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

fn cmd_ablate(
    cli: &Cli,
    settings: &Settings,
    mode: AblateMode,
    file: &Path,
    w_lines: Option<usize>,
    variants: Option<usize>,
    out_dir: &Path,
) -> Result<i32> {
    let adapter = adapter(cli, settings)?;
    let seed = settings.get("seed", cli.seed, 0u64)?;
    let w = settings.get("w-lines", w_lines, simforge::ablation::DEFAULT_W_LINES)?;
    let n = settings.get("variants", variants, 1usize)?;
    if n == 0 {
        bail!("--variants must be at least 1");
    }
    if mode == AblateMode::Det && n > 1 {
        bail!(
            "deterministic ablation produces byte-identical output on every run, \
             so {n} variants would all be the same file; rerun with --variants 1 \
             or use `ablate nondet`"
        );
    }
    let params = WindowParams { w_lines: w };
    let source =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let base_id = doc_id_of(file);
    let outcome = produce_family(&base_id, n, out_dir, |i| match mode {
        AblateMode::Det => (0, mossad_det(&base_id, &source, params, &adapter)),
        AblateMode::Nondet => {
            let derived = derive_seed(seed, i as u64);
            (
                derived,
                mossad_nondet(&base_id, &source, params, &adapter, derived),
            )
        }
    })?;
    Ok(if outcome.gave_up == 0 {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

fn cmd_mass(
    cli: &Cli,
    settings: &Settings,
    file: &Path,
    flags: &AttackFlags,
    out_dir: &Path,
) -> Result<i32> {
    let config = attack_config(cli, settings, flags)?;
    let adapter = adapter(cli, settings)?;
    let limit = limit_of(cli, settings)?;
    let n = settings.get("variants", flags.variants, 10usize)?;
    let source =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let base_id = doc_id_of(file);
    let outcome = produce_family(&base_id, n, out_dir, |i| {
        let mut cfg = config.clone();
        cfg.seed = derive_seed(config.seed, i as u64);
        let seed = cfg.seed;
        let run = init_attack(&base_id, &source, cfg, &adapter).and_then(run_attack);
        (seed, run)
    })?;

    let mut members = vec![(base_id.clone(), source.into_bytes())];
    members.extend(
        outcome
            .sources
            .iter()
            .map(|(id, text)| (id.clone(), text.clone().into_bytes())),
    );
    let family = Corpus::from_documents(out_dir.to_path_buf(), members)?;
    write_manifest(&family, out_dir)?;
    let mut result = run_detect(&family, &config, limit)?;
    result.experiment = "mass-plagiarism".to_string();
    result.lineages = outcome.lineages;
    let variant_ids: BTreeSet<String> = result.lineages.iter().map(|l| l.doc_id.clone()).collect();
    result.histogram = Histogram::build(&result.report, &variant_ids);
    if outcome.gave_up > 0 {
        result.warnings.push(format!(
            "{} of {n} variants stopped above target",
            outcome.gave_up
        ));
    }
    finish(&result, out_dir)
}

fn cmd_countermeasure(cli: &Cli, settings: &Settings, dir: &Path, out_dir: &Path) -> Result<i32> {
    let config = base_config(cli, settings)?;
    let adapter = adapter(cli, settings)?;
    let limit = limit_of(cli, settings)?;
    let corpus = ingest(dir)?;
    write_manifest(&corpus, out_dir)?;
    let lineage_path = dir.join(LINEAGE_FILE);
    let variant_ids: BTreeSet<String> = if lineage_path.exists() {
        let lineages = read_lineage(&lineage_path)?;
        println!(
            "classifying {} documents as variants via {}",
            lineages.len(),
            lineage_path.display()
        );
        lineages.into_iter().map(|l| l.doc_id).collect()
    } else {
        BTreeSet::new()
    };
    let result = run_countermeasure(&corpus, &variant_ids, &config, &adapter, limit)?;
    let written = write_countermeasure(&result, out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    for delta in result.deltas.iter().take(5) {
        println!(
            "{} vs {}: source {:.2} -> assembly {:.2}",
            delta.doc_a, delta.doc_b, delta.source_score, delta.assembly_score
        );
    }
    report_warnings(&result.source.warnings);
    report_warnings(&result.assembly.warnings);
    let clean = result.source.warnings.is_empty() && result.assembly.warnings.is_empty();
    Ok(if clean { EXIT_OK } else { EXIT_PARTIAL })
}

fn cmd_report(result_path: &Path, out_dir: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(result_path)
        .with_context(|| format!("reading {}", result_path.display()))?;
    let result: ExperimentResult = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", result_path.display()))?;
    let written = harness::write_result(&result, out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(EXIT_OK)
}
