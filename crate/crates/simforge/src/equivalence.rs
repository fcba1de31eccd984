//! Compiler-backed semantic equivalence.
//!
//! Two C sources are considered equivalent when an external compiler, run
//! with the same flags at high optimization, emits byte-identical code for
//! both after normalization. The check is sound but incomplete: a `true`
//! answer means the optimizer literally discarded the difference, a `false`
//! answer only means this compiler kept some trace of it. That asymmetry is
//! exactly what the mutation attack needs, because it restricts accepted
//! insertions to code the compiler provably eliminates.
//!
//! Every compile runs in its own scratch directory under a fixed source
//! filename, so path-bearing compiler output cannot differ between the two
//! sides. Assembly mode additionally strips comment lines and the
//! `.file`/`.ident`/`.loc` metadata directives; object mode compares ELF
//! section payloads while ignoring `.comment`, `.note*`, and `.debug*`.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("failed to run compiler {cc:?}: {source}")]
    Spawn {
        cc: String,
        #[source]
        source: std::io::Error,
    },
    #[error("compile exceeded timeout of {}s", .0.as_secs_f64())]
    Timeout(Duration),
    #[error("scratch dir error: {0}")]
    Io(#[from] std::io::Error),
}

/// What the compiler is asked to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmitMode {
    /// Textual assembly (`-S`). Stable after directive stripping; default.
    #[default]
    Asm,
    /// Object file (`-c`); ELF section payloads are compared.
    Obj,
}

/// Fixed compile configuration shared by both sides of every comparison.
#[derive(Debug, Clone)]
pub struct CompilerAdapter {
    cc: String,
    opt_level: u8,
    emit: EmitMode,
    timeout: Duration,
}

/// One compile's outcome: normalized emitted bytes on success, diagnostics
/// either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileArtifact {
    pub success: bool,
    pub normalized: Vec<u8>,
    pub diagnostics: String,
}

/// Compiler executable resolution. Precedence, lowest to highest: built-in
/// default `cc`, config file value, command-line flag, `SIMFORGE_CC`
/// environment variable.
pub fn resolve_compiler(cli: Option<&str>, config: Option<&str>) -> String {
    if let Ok(env) = std::env::var("SIMFORGE_CC") {
        if !env.is_empty() {
            return env;
        }
    }
    cli.or(config).unwrap_or("cc").to_string()
}

impl CompilerAdapter {
    pub const DEFAULT_OPT_LEVEL: u8 = 3;
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

    pub fn new(cc: impl Into<String>, opt_level: u8, emit: EmitMode, timeout: Duration) -> Self {
        CompilerAdapter {
            cc: cc.into(),
            opt_level,
            emit,
            timeout,
        }
    }

    /// `cc -O3 -S`, ten-second per-compile budget.
    pub fn with_cc(cc: impl Into<String>) -> Self {
        Self::new(
            cc,
            Self::DEFAULT_OPT_LEVEL,
            EmitMode::Asm,
            Self::DEFAULT_TIMEOUT,
        )
    }

    pub fn cc(&self) -> &str {
        &self.cc
    }

    pub fn opt_level(&self) -> u8 {
        self.opt_level
    }

    pub fn emit(&self) -> EmitMode {
        self.emit
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    /// Compiles `source` in a fresh scratch directory and returns the
    /// normalized artifact. Compile failure is an unsuccessful artifact, not
    /// an error; only infrastructure problems (missing compiler, timeout)
    /// are errors.
    pub fn compile(&self, source: &str) -> Result<CompileArtifact, EquivalenceError> {
        let dir = tempfile::tempdir()?;
        // Fixed names keep path-derived compiler output identical across
        // compiles of different sources.
        std::fs::write(dir.path().join("src.c"), source)?;
        let out_name = match self.emit {
            EmitMode::Asm => "out.s",
            EmitMode::Obj => "out.o",
        };
        let mut cmd = Command::new(&self.cc);
        cmd.arg(format!("-O{}", self.opt_level))
            .arg(match self.emit {
                EmitMode::Asm => "-S",
                EmitMode::Obj => "-c",
            })
            .arg("src.c")
            .arg("-o")
            .arg(out_name)
            .current_dir(dir.path())
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped());
        let (status, diagnostics) = run_with_timeout(cmd, &self.cc, self.timeout)?;
        if !status {
            return Ok(CompileArtifact {
                success: false,
                normalized: Vec::new(),
                diagnostics,
            });
        }
        let raw = std::fs::read(dir.path().join(out_name))?;
        let normalized = match self.emit {
            EmitMode::Asm => normalize_asm(&raw),
            EmitMode::Obj => normalize_obj(&raw),
        };
        Ok(CompileArtifact {
            success: true,
            normalized,
            diagnostics,
        })
    }

    /// True iff both sources compile and their normalized artifacts are
    /// byte-equal.
    pub fn equivalent(&self, original: &str, variant: &str) -> Result<bool, EquivalenceError> {
        let base = self.compile(original)?;
        if !base.success {
            return Ok(false);
        }
        self.equivalent_to_artifact(&base, variant)
    }

    /// Variant-side check against an already compiled base, so attack loops
    /// compile the base once.
    pub fn equivalent_to_artifact(
        &self,
        base: &CompileArtifact,
        variant: &str,
    ) -> Result<bool, EquivalenceError> {
        if !base.success {
            return Ok(false);
        }
        let v = self.compile(variant)?;
        Ok(v.success && v.normalized == base.normalized)
    }
}

/// Runs the command, killing it at the deadline. Returns (success, stderr).
fn run_with_timeout(
    mut cmd: Command,
    cc: &str,
    timeout: Duration,
) -> Result<(bool, String), EquivalenceError> {
    let mut child = cmd.spawn().map_err(|source| EquivalenceError::Spawn {
        cc: cc.to_string(),
        source,
    })?;
    // Drain stderr on a side thread so a chatty compiler cannot block on a
    // full pipe while we poll.
    let mut stderr = child.stderr.take().expect("stderr piped");
    let drain = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });
    let deadline = Instant::now() + timeout;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            let _ = drain.join();
            return Err(EquivalenceError::Timeout(timeout));
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let diag_bytes = drain.join().unwrap_or_default();
    Ok((
        status.success(),
        String::from_utf8_lossy(&diag_bytes).into_owned(),
    ))
}

/// Drops comment-only lines and the metadata directives that vary with
/// filename or toolchain version; everything else is kept verbatim.
fn normalize_asm(raw: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(raw);
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            continue;
        }
        let head = trimmed.split_whitespace().next().unwrap_or("");
        if matches!(head, ".file" | ".ident" | ".loc") {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    out.into_bytes()
}

/// Serializes the comparable sections of an ELF64 object: for each section
/// whose name is not `.comment*`, `.note*`, or `.debug*`, the name plus its
/// file payload. Non-ELF input falls back to the raw bytes.
fn normalize_obj(raw: &[u8]) -> Vec<u8> {
    parse_elf_sections(raw).unwrap_or_else(|| raw.to_vec())
}

fn parse_elf_sections(raw: &[u8]) -> Option<Vec<u8>> {
    // ELF64 little-endian only; anything else falls back to raw comparison.
    if raw.len() < 0x40 || &raw[..4] != b"\x7fELF" || raw[4] != 2 || raw[5] != 1 {
        return None;
    }
    let u16_at = |off: usize| -> Option<u64> {
        Some(u16::from_le_bytes(raw.get(off..off + 2)?.try_into().ok()?) as u64)
    };
    let u32_at = |off: usize| -> Option<u64> {
        Some(u32::from_le_bytes(raw.get(off..off + 4)?.try_into().ok()?) as u64)
    };
    let u64_at = |off: usize| -> Option<u64> {
        Some(u64::from_le_bytes(raw.get(off..off + 8)?.try_into().ok()?))
    };
    let shoff = u64_at(0x28)? as usize;
    let shentsize = u16_at(0x3a)? as usize;
    let shnum = u16_at(0x3c)? as usize;
    let shstrndx = u16_at(0x3e)? as usize;
    if shentsize < 0x40 || shnum == 0 || shstrndx >= shnum {
        return None;
    }
    let header = |i: usize| shoff + i * shentsize;
    let section_payload = |i: usize| -> Option<&[u8]> {
        let h = header(i);
        let sh_type = u32_at(h + 0x4)?;
        const SHT_NOBITS: u64 = 8;
        if sh_type == SHT_NOBITS {
            return Some(&[]);
        }
        let off = u64_at(h + 0x18)? as usize;
        let size = u64_at(h + 0x20)? as usize;
        raw.get(off..off + size)
    };
    let strtab = section_payload(shstrndx)?;
    let name_of = |i: usize| -> Option<&[u8]> {
        let name_off = u32_at(header(i))? as usize;
        let rest = strtab.get(name_off..)?;
        let end = rest.iter().position(|&b| b == 0)?;
        Some(&rest[..end])
    };
    let skip = |name: &[u8]| {
        name.starts_with(b".comment") || name.starts_with(b".note") || name.starts_with(b".debug")
    };
    let mut out = Vec::new();
    for i in 0..shnum {
        let name = name_of(i)?;
        if skip(name) {
            continue;
        }
        let payload = section_payload(i)?;
        out.extend_from_slice(name);
        out.push(0);
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(payload);
    }
    Some(out)
}

/// Convenience for callers that only have a path.
pub fn compile_file(
    adapter: &CompilerAdapter,
    path: &Path,
) -> Result<CompileArtifact, EquivalenceError> {
    let source = std::fs::read_to_string(path)?;
    adapter.compile(&source)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HELLO: &str = "#include <stdio.h>\nint main(void) {\n  puts(\"hi\");\n  return 0;\n}\n";
    const RET_3: &str = "int value(void) {\n  return 3;\n}\n";
    const RET_4: &str = "int value(void) {\n  return 4;\n}\n";
    const RET_3_DEAD: &str = "int value(void) {\n  int unused_x;\n  return 3;\n}\n";

    fn adapter() -> CompilerAdapter {
        CompilerAdapter::with_cc(resolve_compiler(None, None))
    }

    fn obj_adapter() -> CompilerAdapter {
        CompilerAdapter::new(
            resolve_compiler(None, None),
            3,
            EmitMode::Obj,
            Duration::from_secs(10),
        )
    }

    #[test]
    fn hello_world_compiles() {
        let a = adapter().compile(HELLO).unwrap();
        assert!(a.success);
        assert!(!a.normalized.is_empty());
    }

    #[test]
    fn syntax_error_reports_diagnostics() {
        let a = adapter().compile("int main(void) { return ;;;\n").unwrap();
        assert!(!a.success);
        assert!(!a.diagnostics.is_empty());
        assert!(a.normalized.is_empty());
    }

    #[test]
    fn recompile_is_bit_identical() {
        let ad = adapter();
        assert_eq!(ad.compile(HELLO).unwrap(), ad.compile(HELLO).unwrap());
        let ob = obj_adapter();
        assert_eq!(ob.compile(HELLO).unwrap(), ob.compile(HELLO).unwrap());
    }

    #[test]
    fn verbatim_copy_is_equivalent() {
        assert!(adapter().equivalent(RET_3, RET_3).unwrap());
    }

    #[test]
    fn dead_declaration_is_optimized_away() {
        // The property the whole mutation attack rests on.
        assert!(adapter().equivalent(RET_3, RET_3_DEAD).unwrap());
        assert!(obj_adapter().equivalent(RET_3, RET_3_DEAD).unwrap());
    }

    #[test]
    fn changed_constant_is_not_equivalent() {
        assert!(!adapter().equivalent(RET_3, RET_4).unwrap());
        assert!(!obj_adapter().equivalent(RET_3, RET_4).unwrap());
    }

    #[test]
    fn equivalence_is_symmetric() {
        let ad = adapter();
        for (a, b) in [(RET_3, RET_4), (RET_3, RET_3_DEAD), (HELLO, RET_3)] {
            assert_eq!(ad.equivalent(a, b).unwrap(), ad.equivalent(b, a).unwrap());
        }
    }

    #[test]
    fn non_compiling_variant_is_false_not_error() {
        assert!(!adapter().equivalent(RET_3, "int broken(").unwrap());
    }

    #[test]
    fn non_compiling_base_is_false() {
        assert!(!adapter().equivalent("int broken(", RET_3).unwrap());
    }

    #[test]
    fn missing_compiler_is_spawn_error() {
        let ad = CompilerAdapter::with_cc("definitely-not-a-compiler-9b2f");
        match ad.compile(RET_3) {
            Err(EquivalenceError::Spawn { cc, .. }) => {
                assert_eq!(cc, "definitely-not-a-compiler-9b2f")
            }
            other => panic!("expected spawn error, got {other:?}"),
        }
    }

    #[test]
    fn deadline_kills_the_compile() {
        let ad = CompilerAdapter::new(
            resolve_compiler(None, None),
            3,
            EmitMode::Asm,
            Duration::from_millis(1),
        );
        match ad.compile(HELLO) {
            Err(EquivalenceError::Timeout(t)) => assert_eq!(t, Duration::from_millis(1)),
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn artifact_reuse_matches_full_check() {
        let ad = adapter();
        let base = ad.compile(RET_3).unwrap();
        assert!(ad.equivalent_to_artifact(&base, RET_3_DEAD).unwrap());
        assert!(!ad.equivalent_to_artifact(&base, RET_4).unwrap());
    }

    #[test]
    fn asm_normalization_drops_metadata_only() {
        let raw = b"\t.file\t\"src.c\"\n\tmovl\t$3, %eax\n# note\n\t.ident\t\"X 1.0\"\n\tret\n";
        let n = normalize_asm(raw);
        assert_eq!(n, b"\tmovl\t$3, %eax\n\tret\n");
    }

    /// Minimal ELF64 with a NULL section, one .text payload, one .comment
    /// payload, and the string table. Offsets wired by hand.
    fn tiny_elf(text: &[u8], comment: &[u8]) -> Vec<u8> {
        let strtab = b"\0.text\0.comment\0.shstrtab\0";
        let text_off = 0x40usize;
        let comment_off = text_off + text.len();
        let strtab_off = comment_off + comment.len();
        let shoff = strtab_off + strtab.len();
        let mut f = vec![0u8; shoff + 4 * 0x40];
        f[..4].copy_from_slice(b"\x7fELF");
        f[4] = 2; // 64-bit
        f[5] = 1; // little-endian
        f[0x28..0x30].copy_from_slice(&(shoff as u64).to_le_bytes());
        f[0x3a..0x3c].copy_from_slice(&0x40u16.to_le_bytes());
        f[0x3c..0x3e].copy_from_slice(&4u16.to_le_bytes());
        f[0x3e..0x40].copy_from_slice(&3u16.to_le_bytes());
        f[text_off..text_off + text.len()].copy_from_slice(text);
        f[comment_off..comment_off + comment.len()].copy_from_slice(comment);
        f[strtab_off..strtab_off + strtab.len()].copy_from_slice(strtab);
        let mut shdr = |i: usize, name: u32, ty: u32, off: usize, size: usize| {
            let h = shoff + i * 0x40;
            f[h..h + 4].copy_from_slice(&name.to_le_bytes());
            f[h + 4..h + 8].copy_from_slice(&ty.to_le_bytes());
            f[h + 0x18..h + 0x20].copy_from_slice(&(off as u64).to_le_bytes());
            f[h + 0x20..h + 0x28].copy_from_slice(&(size as u64).to_le_bytes());
        };
        shdr(0, 0, 0, 0, 0);
        shdr(1, 1, 1, text_off, text.len()); // .text PROGBITS
        shdr(2, 7, 1, comment_off, comment.len()); // .comment PROGBITS
        shdr(3, 16, 3, strtab_off, strtab.len()); // .shstrtab STRTAB
        f
    }

    #[test]
    fn elf_parser_ignores_comment_section() {
        let a = tiny_elf(b"CODE", b"compiler v1");
        let b = tiny_elf(b"CODE", b"compiler v2 entirely different");
        assert_eq!(normalize_obj(&a), normalize_obj(&b));
        let c = tiny_elf(b"DIFFERENT", b"compiler v1");
        assert_ne!(normalize_obj(&a), normalize_obj(&c));
        // Not the raw-bytes fallback: section names are in the output.
        assert!(normalize_obj(&a).windows(5).any(|w| w == b".text"));
    }

    #[test]
    fn env_var_wins_compiler_resolution() {
        // Resolution precedence without touching the real environment:
        // default < config < cli checked here, env tested via CLI tests.
        assert_eq!(resolve_compiler(None, None), resolve_real("cc"));
        assert_eq!(
            resolve_compiler(None, Some("gcc-conf")),
            resolve_real("gcc-conf")
        );
        assert_eq!(
            resolve_compiler(Some("clang-cli"), Some("gcc-conf")),
            resolve_real("clang-cli")
        );
    }

    fn resolve_real(expected_without_env: &str) -> String {
        match std::env::var("SIMFORGE_CC") {
            Ok(v) if !v.is_empty() => v,
            _ => expected_without_env.to_string(),
        }
    }
}
