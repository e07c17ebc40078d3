//! Experiment configuration: JSON-loadable, schema-versioned, and
//! validated against the built-in corpus before any computation starts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fracsob::{builtin_corpus, DomainSpec, Exponent, NormParams, WeightMode};

use crate::error::{HarnessError, Result};

/// Environment variable that overrides the output directory of every
/// experiment; it takes precedence over the config's `output` field.
pub const OUTPUT_DIR_ENV: &str = "FRACSOB_OUTPUT_DIR";

/// Config format version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A declarative experiment: which corpus members, which norm
/// parameters, on what box, at which grid resolutions. Optional fields
/// feed individual experiments (mollification ladders, order pairs,
/// enlarged target boxes) and default to empty.
///
/// Loading validates everything up front — unknown member ids, a
/// one-entry resolution ladder, or a stale schema version are rejected
/// before any sampling happens — so a config that loads always runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Experiment id; also the stem of the emitted artifact files.
    pub experiment: String,
    /// Corpus member ids; each must exist in the built-in manifest.
    pub members: Vec<String>,
    /// Norm parameter bundles the experiment iterates over.
    pub params: Vec<NormParams>,
    /// Domain box, one `[lo, hi]` pair per axis (one or two axes).
    pub domain: Vec<(f64, f64)>,
    /// Grid spacings, strictly decreasing; at least two.
    pub resolutions: Vec<f64>,
    /// Radii for truncation-parameterized diagnostics (the decay
    /// seminorms of the sweep); strictly increasing.
    #[serde(default)]
    pub truncation_radii: Vec<f64>,
    /// Smoothness-order pairs `(lower, higher)` for the order-drop
    /// comparison of the embedding experiment; each inside `(0, 1)`.
    #[serde(default)]
    pub order_pairs: Vec<(f64, f64)>,
    /// Mollification radii for the density experiment, strictly
    /// decreasing.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// `(weight_power, derivative_order)` pairs for the decay-seminorm
    /// rows of the sweep.
    #[serde(default)]
    pub decay_orders: Vec<(u32, u32)>,
    /// Enlarged target box for the extension experiment; must contain
    /// `domain`. Defaults to `domain` doubled about its center.
    #[serde(default)]
    pub target_domain: Option<Vec<(f64, f64)>>,
    /// Output directory for artifacts. [`OUTPUT_DIR_ENV`] overrides it;
    /// the current directory is the fallback.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Escalate boundary-decay warnings to hard errors.
    #[serde(default)]
    pub strict: bool,
}

impl ExperimentConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(json)
            .map_err(|e| HarnessError::config(format!("bad experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&json)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::config(format!(
                "schema version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.experiment.is_empty() {
            return Err(HarnessError::config("experiment id must not be empty"));
        }
        if self.members.is_empty() {
            return Err(HarnessError::config("at least one corpus member is required"));
        }
        let corpus = builtin_corpus();
        for id in &self.members {
            corpus.get(id)?;
        }
        if self.params.is_empty() {
            return Err(HarnessError::config("at least one norm parameter bundle is required"));
        }
        let domain = self.domain_spec()?;
        for params in &self.params {
            if params.n != domain.dim() {
                return Err(HarnessError::config(format!(
                    "parameter dimension {} does not match the {}-axis domain",
                    params.n,
                    domain.dim()
                )));
            }
        }
        if self.resolutions.len() < 2 {
            return Err(HarnessError::config(
                "at least two grid resolutions are required (refinement checks need a pair)",
            ));
        }
        require_decreasing("resolutions", &self.resolutions)?;
        if !self.epsilons.is_empty() {
            require_decreasing("epsilons", &self.epsilons)?;
        }
        for &(lo, hi) in &self.order_pairs {
            if !(0.0 < lo && lo < hi && hi < 1.0) {
                return Err(HarnessError::config(format!(
                    "order pair ({lo}, {hi}) must satisfy 0 < lower < higher < 1"
                )));
            }
        }
        for window in self.truncation_radii.windows(2) {
            if !(window[0] < window[1]) {
                return Err(HarnessError::config("truncation radii must be strictly increasing"));
            }
        }
        if let Some(radius) = self.truncation_radii.iter().find(|r| !(**r > 0.0)) {
            return Err(HarnessError::config(format!("truncation radius {radius} must be positive")));
        }
        if let Some(bounds) = &self.target_domain {
            let target = DomainSpec::new(bounds.clone()).map_err(HarnessError::from)?;
            if target.dim() != domain.dim() {
                return Err(HarnessError::config(
                    "target_domain must have the same number of axes as domain",
                ));
            }
            let inside = domain
                .bounds()
                .iter()
                .zip(target.bounds())
                .all(|(&(lo, hi), &(tlo, thi))| tlo <= lo && hi <= thi);
            if !inside {
                return Err(HarnessError::config("target_domain must contain domain"));
            }
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        DomainSpec::new(self.domain.clone()).map_err(HarnessError::from)
    }

    /// The extension target: `target_domain` if given, otherwise the
    /// domain doubled about its center.
    pub fn target_domain_spec(&self) -> Result<DomainSpec> {
        match &self.target_domain {
            Some(bounds) => DomainSpec::new(bounds.clone()).map_err(HarnessError::from),
            None => {
                let doubled = self
                    .domain
                    .iter()
                    .map(|&(lo, hi)| {
                        let c = 0.5 * (lo + hi);
                        let half = hi - c;
                        (c - 2.0 * half, c + 2.0 * half)
                    })
                    .collect();
                DomainSpec::new(doubled).map_err(HarnessError::from)
            }
        }
    }

    /// The two finest spacings as `(coarse, fine)`.
    pub fn two_finest(&self) -> (f64, f64) {
        let k = self.resolutions.len();
        (self.resolutions[k - 2], self.resolutions[k - 1])
    }

    /// Up to the three finest spacings, coarsest first.
    pub fn finest_ladder(&self) -> &[f64] {
        let k = self.resolutions.len();
        &self.resolutions[k.saturating_sub(3)..]
    }

    /// SHA-256 of the canonical JSON serialization, as lowercase hex.
    /// Artifacts carry this hash so a row can be traced to the exact
    /// configuration that produced it.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Artifact directory: [`OUTPUT_DIR_ENV`] if set and non-empty,
    /// else the config's `output`, else the current directory.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var(OUTPUT_DIR_ENV) {
            Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.clone().unwrap_or_else(|| PathBuf::from(".")),
        }
    }
}

fn require_decreasing(what: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(HarnessError::config(format!("{what} entry {v} must be a positive real")));
    }
    for window in values.windows(2) {
        if !(window[1] < window[0]) {
            return Err(HarnessError::config(format!("{what} must be strictly decreasing")));
        }
    }
    Ok(())
}

/// Parse `"lo:hi"` (one axis) or `"lo:hi,lo:hi"` (two axes) into a
/// domain box. Used by the command-line front end.
pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let mut bounds = Vec::new();
    for part in text.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| HarnessError::config(format!("bad interval '{part}' (want lo:hi)")))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| HarnessError::config(format!("bad number '{lo}' in domain")))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| HarnessError::config(format!("bad number '{hi}' in domain")))?;
        bounds.push((lo, hi));
    }
    DomainSpec::new(bounds).map_err(HarnessError::from)
}

/// Parse an integrability exponent: a number or `"inf"`.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    if text == "inf" {
        return Ok(Exponent::Infinity);
    }
    let p: f64 = text
        .parse()
        .map_err(|_| HarnessError::config(format!("bad exponent '{text}' (number or \"inf\")")))?;
    Exponent::finite(p).map_err(HarnessError::from)
}

/// Parse a weight mode: `"classical"` or `"ultra"`.
pub fn parse_weight(text: &str) -> Result<WeightMode> {
    match text {
        "classical" => Ok(WeightMode::Classical),
        "ultra" => Ok(WeightMode::Ultra),
        other => Err(HarnessError::config(format!(
            "bad weight mode '{other}' (classical or ultra)"
        ))),
    }
}
