use std::path::{Path, PathBuf};

use cvtda_core::complex::scale_grid;
use cvtda_core::{CloudFormat, EstimationMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Widest scale register accepted for a sweep (`2^m − 1` scales).
pub const MAX_SWEEP_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

impl From<InputFormat> for CloudFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Csv => CloudFormat::Csv,
            InputFormat::Json => CloudFormat::Json,
        }
    }
}

/// Everything a run needs. `None` phase-estimation fields mean "auto".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub format: Option<InputFormat>,
    pub normalize: bool,
    pub m: Option<u32>,
    pub epsilons: Option<Vec<f64>>,
    pub kmax: usize,
    pub mode: EstimationMode,
    pub s: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub window: Option<f64>,
    /// Homodyne samples per (ε, k); 0 keeps the analytic path only.
    pub samples: usize,
    pub seed: u64,
    pub grover: bool,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            format: None,
            normalize: false,
            m: None,
            epsilons: None,
            kmax: 2,
            mode: EstimationMode::Mixed,
            s: None,
            gamma: None,
            alpha: None,
            window: None,
            samples: 0,
            seed: 0,
            grover: false,
            out: None,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(cvtda_core::cvsim::DEFAULT_ALPHA)
    }

    /// Checks that do not need the point cloud.
    pub fn validate(&self) -> CliResult<()> {
        match (&self.m, &self.epsilons) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("give either m or an explicit epsilon list, not both".into()))
            }
            (None, None) => return Err(CliError::Usage("one of m or epsilons is required".into())),
            (Some(m), None) if *m == 0 || *m > MAX_SWEEP_BITS => {
                return Err(CliError::Usage(format!("m must be in 1..={MAX_SWEEP_BITS}, got {m}")))
            }
            (None, Some(list)) if list.is_empty() => {
                return Err(CliError::Usage("epsilon list is empty".into()))
            }
            (None, Some(list)) => {
                if let Some(bad) = list.iter().find(|e| !e.is_finite() || **e < 0.0) {
                    return Err(CliError::Usage(format!("invalid epsilon {bad}")));
                }
            }
            _ => {}
        }
        for (name, v) in [("s", self.s), ("gamma", self.gamma), ("window", self.window)] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive, got {x}")));
                }
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(CliError::Usage(format!("alpha must be positive, got {a}")));
            }
        }
        if self.workers == Some(0) {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// The scales to sweep, in order.
    pub fn epsilon_grid(&self) -> CliResult<Vec<f64>> {
        self.validate()?;
        match (&self.m, &self.epsilons) {
            (Some(m), _) => Ok(scale_grid(*m)
                .map_err(CliError::core("scale grid"))?
                .into_iter()
                .map(|s| s.epsilon)
                .collect()),
            (_, Some(list)) => Ok(list.clone()),
            _ => unreachable!("validated"),
        }
    }

    pub fn resolved_format(&self) -> CliResult<CloudFormat> {
        match (self.format, &self.input) {
            (Some(f), _) => Ok(f.into()),
            (None, Some(path)) => Ok(CloudFormat::from_path(path)),
            (None, None) => Err(CliError::Usage("no input file given".into())),
        }
    }
}
