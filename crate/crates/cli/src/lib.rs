//! Scenario runner behind the `pslab` binary.

pub mod bounds;
pub mod config;
pub mod fields;
pub mod grid;
pub mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use config::{ScenarioConfig, ScenarioKind};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "PSLAB_OUT";
pub const DEFAULT_OUT: &str = "pslab-out";

/// Files produced by a scenario, written in order.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    /// One line per report or check, for the terminal.
    pub lines: Vec<String>,
    pub violated: bool,
}

impl Outcome {
    pub fn file(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    pub fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.file(name, text);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Violated => 1,
        }
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<Outcome> {
    match config.scenario {
        ScenarioKind::RearrangeGrid => grid::rearrange_grid(config),
        ScenarioKind::VerifyBounds => bounds::verify_bounds(config),
        ScenarioKind::Sweep => bounds::sweep(config),
        ScenarioKind::OracleSuite => oracle::oracle_suite(config),
    }
}

/// Output directory: flag, then config, then environment, then the default.
pub fn output_dir(flag: Option<PathBuf>, config: &ScenarioConfig) -> PathBuf {
    flag.or_else(|| config.output.as_ref().map(|p| config.base_dir.join(p)))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}
