//! Run configuration for `neumann sweep`.
//!
//! ```json
//! {
//!   "domain_path": "square.json",
//!   "h": 0.0625,
//!   "p_schedule": [2, 4, 8, 16, 32, 64, 128],
//!   "solver": {"max_iters": 5000, "restarts": 3},
//!   "checks": {"properties": true, "residuals": true, "fields": true, "traces": true},
//!   "output_dir": "out",
//!   "seed": 0
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file. The top-level `seed` replaces `solver.seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use neumann_core::eigensolver::DEFAULT_SCHEDULE;
use neumann_core::SolverOptions;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Recognised keys of `checks`; all default to `true`.
pub const CHECKS: [&str; 4] = ["fields", "properties", "residuals", "traces"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain_path: PathBuf,
    pub h: f64,
    #[serde(default = "default_schedule")]
    pub p_schedule: Vec<f64>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub checks: BTreeMap<String, bool>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_schedule() -> Vec<f64> {
    DEFAULT_SCHEDULE.to_vec()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub h: Option<f64>,
    pub p_max: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, Failure> {
        if !path.is_file() {
            return Err(Failure::input(format!("config not found: {}", path.display())));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.domain_path = base.join(&cfg.domain_path);
        cfg.output_dir = base.join(&cfg.output_dir);
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(h) = o.h {
            self.h = h;
        }
        if let Some(p_max) = o.p_max {
            self.p_schedule.retain(|&p| p <= p_max);
        }
        self.solver.seed = self.seed;
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Failure::input(format!("field `h`: must be positive, got {}", self.h)));
        }
        if self.p_schedule.is_empty() {
            return Err(Failure::input("field `p_schedule`: empty (after --p-max)"));
        }
        if self.p_schedule[0] < 2.0 || self.p_schedule.iter().any(|p| !p.is_finite()) {
            return Err(Failure::input("field `p_schedule`: entries must be finite and at least 2"));
        }
        if self.p_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Failure::input("field `p_schedule`: must be strictly increasing"));
        }
        self.solver
            .validate()
            .map_err(|e| Failure::input(format!("field `solver`: {e}")))?;
        if let Some(k) = self.checks.keys().find(|k| !CHECKS.contains(&k.as_str())) {
            return Err(Failure::input(format!(
                "field `checks`: unknown check `{k}` (known: {})",
                CHECKS.join(", ")
            )));
        }
        if !self.domain_path.is_file() {
            return Err(Failure::input(format!(
                "domain spec not found: {}",
                self.domain_path.display()
            )));
        }
        Ok(())
    }

    pub fn check(&self, name: &str) -> bool {
        self.checks.get(name).copied().unwrap_or(true)
    }
}
