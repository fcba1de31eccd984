//! Plain-text `key = value` configuration with layered overrides.
//!
//! Precedence, lowest to highest: built-in default, config file, CLI flag,
//! environment variable. Env names derive from keys as `SIMFORGE_<KEY>`
//! with dashes mapped to underscores, so the `cc` key answers to the same
//! `SIMFORGE_CC` the equivalence module honors.

use std::collections::BTreeMap;

use super::HarnessError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// a non-blank line without `=` is an error; later duplicates win.
pub fn parse_config(text: &str) -> Result<ConfigFile, HarnessError> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!(
                "line {}: expected key = value, got {line:?}",
                idx + 1
            )));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(HarnessError::Config(format!("line {}: empty key", idx + 1)));
        }
        entries.insert(key.to_string(), value.trim().to_string());
    }
    Ok(ConfigFile { entries })
}

/// Environment variable name for a config key.
pub fn env_key(key: &str) -> String {
    let mut name = String::from("SIMFORGE_");
    for ch in key.chars() {
        name.push(match ch {
            '-' => '_',
            other => other.to_ascii_uppercase(),
        });
    }
    name
}

/// Resolves one key against the live process environment.
pub fn resolve(key: &str, cli_value: Option<&str>, config: Option<&ConfigFile>) -> Option<String> {
    resolve_with(key, cli_value, config, &|name| std::env::var(name).ok())
}

/// Same as [`resolve`], with the environment supplied as a lookup function
/// so layering is testable without touching process state.
pub fn resolve_with(
    key: &str,
    cli_value: Option<&str>,
    config: Option<&ConfigFile>,
    env: &dyn Fn(&str) -> Option<String>,
) -> Option<String> {
    if let Some(value) = env(&env_key(key)) {
        if !value.is_empty() {
            return Some(value);
        }
    }
    if let Some(value) = cli_value {
        return Some(value.to_string());
    }
    config.and_then(|c| c.get(key)).map(str::to_string)
}
