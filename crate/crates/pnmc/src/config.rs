//! JSON job files. Command-line flags override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::read_text;

/// Parameters of one command run. Every field is optional; each command
/// picks its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Option<String>,
    pub fixture: Option<String>,
    pub case: Option<String>,
    pub order: Option<usize>,
    pub radius: Option<f64>,
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub tol_build: Option<f64>,
    pub tol_beta: Option<f64>,
    pub tol_sep: Option<f64>,
    pub tol_recovery: Option<f64>,
    pub force: Option<bool>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: JobConfig) -> JobConfig {
        JobConfig {
            command: over.command.or(self.command),
            fixture: over.fixture.or(self.fixture),
            case: over.case.or(self.case),
            order: over.order.or(self.order),
            radius: over.radius.or(self.radius),
            nodes: over.nodes.or(self.nodes),
            seed: over.seed.or(self.seed),
            input: over.input.or(self.input),
            output: over.output.or(self.output),
            tol_build: over.tol_build.or(self.tol_build),
            tol_beta: over.tol_beta.or(self.tol_beta),
            tol_sep: over.tol_sep.or(self.tol_sep),
            tol_recovery: over.tol_recovery.or(self.tol_recovery),
            force: over.force.or(self.force),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("tol_build", self.tol_build),
            ("tol_beta", self.tol_beta),
            ("tol_sep", self.tol_sep),
            ("tol_recovery", self.tol_recovery),
            ("radius", self.radius),
        ] {
            if let Some(t) = t {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if let Some(n) = self.nodes {
            if n < 5 {
                return Err(CliError::Config(format!("nodes must be at least 5, got {n}")));
            }
        }
        if let Some(o) = self.order {
            if !(2..=16).contains(&o) {
                return Err(CliError::Config(format!("order must lie in 2..=16, got {o}")));
            }
        }
        Ok(())
    }
}
