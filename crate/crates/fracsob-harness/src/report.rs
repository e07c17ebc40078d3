//! Deterministic experiment artifacts.
//!
//! Each experiment produces an [`ExperimentResult`]: a flat list of
//! [`ClaimRow`]s, one per measured inequality instance, from which the
//! overall verdict is recomputable (`passed` is exactly "no row
//! failed"; skipped rows never fail). Rows serialize to CSV with a
//! fixed column set and fixed float formatting, and to JSON with the
//! provenance block, so a fixed config and corpus produce byte-identical
//! files regardless of worker count. Wall-clock metadata lives in a
//! separate `.meta.json` sidecar that is allowed to differ between runs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use fracsob::{builtin_corpus, Exponent, NormParams, WeightMode};

use crate::error::{HarnessError, Result};

/// Column set of the CSV artifact, in order.
pub const CSV_HEADER: &str =
    "claim_id,member,beta,betaprime,p,weight_mode,h,value_lhs,value_rhs,constant,verdict";

/// Row verdict. `Skip` marks an instance whose parameter regime makes
/// the claim inapplicable or whose ratio is degenerate (zero over
/// zero); the reason goes in the row note, and skipped rows never fail
/// an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    /// `Pass` when `ok`, `Fail` otherwise.
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Skip => write!(f, "skip"),
        }
    }
}

/// One measured inequality instance.
///
/// `claim_id` is an opaque machine-readable label shared by all rows of
/// one claim family; `member` is a corpus id or a `corpus:`-prefixed
/// aggregate. The meaning of `value_lhs`, `value_rhs`, and `constant`
/// is per claim family and spelled out in the row note; `betaprime`
/// carries the secondary order (the lowered smoothness order, a target
/// Hölder exponent, a derivative order) when the claim has one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClaimRow {
    pub claim_id: String,
    pub member: String,
    pub beta: f64,
    pub betaprime: Option<f64>,
    pub p: Exponent,
    pub weight_mode: WeightMode,
    pub h: f64,
    pub value_lhs: f64,
    pub value_rhs: f64,
    pub constant: f64,
    pub verdict: Verdict,
    /// Human explanation (skip reason, quantity semantics). JSON only —
    /// the CSV column set is fixed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClaimRow {
    // One argument per fixed CSV column; a parameter struct would just
    // duplicate `ClaimRow` itself.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        claim_id: &str,
        member: &str,
        params: &NormParams,
        h: f64,
        value_lhs: f64,
        value_rhs: f64,
        constant: f64,
        verdict: Verdict,
    ) -> Self {
        ClaimRow {
            claim_id: claim_id.to_string(),
            member: member.to_string(),
            beta: params.beta,
            betaprime: None,
            p: params.p,
            weight_mode: params.weight_mode,
            h,
            value_lhs,
            value_rhs,
            constant,
            verdict,
            note: None,
        }
    }

    pub fn with_betaprime(mut self, betaprime: f64) -> Self {
        self.betaprime = Some(betaprime);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn csv_line(&self) -> String {
        let betaprime = match self.betaprime {
            Some(b) => format!("{b}"),
            None => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{:.12e},{:.12e},{:.12e},{}\n",
            self.claim_id,
            self.member,
            self.beta,
            betaprime,
            self.p,
            self.weight_mode,
            self.h,
            self.value_lhs,
            self.value_rhs,
            self.constant,
            self.verdict,
        )
    }
}

/// All rows of one experiment run plus the provenance needed to
/// reproduce them: the config hash and the corpus version.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub config_hash: String,
    pub corpus_version: String,
    pub rows: Vec<ClaimRow>,
    /// Exactly "no row failed"; recomputable from `rows`.
    pub passed: bool,
}

impl ExperimentResult {
    pub fn new(experiment: &str, config_hash: String, rows: Vec<ClaimRow>) -> Self {
        let passed = recompute_passed(&rows);
        ExperimentResult {
            experiment: experiment.to_string(),
            config_hash,
            corpus_version: builtin_corpus().version.clone(),
            rows,
            passed,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("result serializes");
        json.push('\n');
        json
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut skip = 0;
        for row in &self.rows {
            match row.verdict {
                Verdict::Pass => pass += 1,
                Verdict::Fail => fail += 1,
                Verdict::Skip => skip += 1,
            }
        }
        (pass, fail, skip)
    }
}

/// The experiment verdict is derived from the rows alone.
pub fn recompute_passed(rows: &[ClaimRow]) -> bool {
    rows.iter().all(|row| row.verdict != Verdict::Fail)
}

/// Paths of the three files one experiment run writes.
#[derive(Clone, Debug)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub sidecar: PathBuf,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    experiment: &'a str,
    config_hash: &'a str,
    corpus_version: &'a str,
    written_unix_seconds: u64,
    files: [String; 2],
}

/// Write `{experiment}.csv`, `{experiment}.json`, and the
/// nondeterministic `{experiment}.meta.json` sidecar into `dir`,
/// creating it if needed. Only the sidecar carries the timestamp.
pub fn write_artifacts(result: &ExperimentResult, dir: &Path) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let csv = dir.join(format!("{}.csv", result.experiment));
    let json = dir.join(format!("{}.json", result.experiment));
    let sidecar = dir.join(format!("{}.meta.json", result.experiment));

    fs::write(&csv, result.to_csv()).map_err(|e| HarnessError::io(&csv, e))?;
    fs::write(&json, result.to_json()).map_err(|e| HarnessError::io(&json, e))?;

    let written_unix_seconds =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = Sidecar {
        experiment: &result.experiment,
        config_hash: &result.config_hash,
        corpus_version: &result.corpus_version,
        written_unix_seconds,
        files: [
            csv.file_name().unwrap().to_string_lossy().into_owned(),
            json.file_name().unwrap().to_string_lossy().into_owned(),
        ],
    };
    let mut meta_json = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    meta_json.push('\n');
    fs::write(&sidecar, meta_json).map_err(|e| HarnessError::io(&sidecar, e))?;

    Ok(WrittenFiles { csv, json, sidecar })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NormParams {
        NormParams::new(0.5, Exponent::Finite(2.0), 1, WeightMode::Ultra).unwrap()
    }

    #[test]
    fn csv_lines_have_the_fixed_column_set() {
        let rows = vec![
            ClaimRow::new("P3.7i", "gaussian", &params(), 0.015625, 1.0, 2.0, 1.5, Verdict::Pass),
            ClaimRow::new("C3.9i", "const1", &params(), 0.015625, 0.0, 0.0, 0.0, Verdict::Skip)
                .with_betaprime(0.25)
                .with_note("degenerate ratio"),
        ];
        let result = ExperimentResult::new("smoke", "deadbeef".into(), rows);
        let csv = result.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "P3.7i,gaussian,0.5,,2,ultra,0.015625,\
             1.000000000000e0,2.000000000000e0,1.500000000000e0,pass"
        );
        assert_eq!(
            lines.next().unwrap(),
            "C3.9i,const1,0.5,0.25,2,ultra,0.015625,\
             0.000000000000e0,0.000000000000e0,0.000000000000e0,skip"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn skipped_rows_do_not_fail_the_experiment() {
        let rows = vec![
            ClaimRow::new("T4.2", "sech", &params(), 0.125, 1.0, 2.0, 0.5, Verdict::Pass),
            ClaimRow::new("T4.2", "const1", &params(), 0.125, 0.0, 0.0, 0.0, Verdict::Skip),
        ];
        assert!(recompute_passed(&rows));
        let result = ExperimentResult::new("smoke", "hash".into(), rows);
        assert!(result.passed);
        assert_eq!(result.counts(), (1, 0, 1));
    }

    #[test]
    fn one_failed_row_fails_the_experiment() {
        let rows =
            vec![ClaimRow::new("L3.10", "bump_half", &params(), 0.125, 2.0, 1.0, 2.0, Verdict::Fail)];
        let result = ExperimentResult::new("smoke", "hash".into(), rows);
        assert!(!result.passed);
        assert_eq!(result.passed, recompute_passed(&result.rows));
    }

    #[test]
    fn artifacts_round_trip_and_keep_time_out_of_the_data_files() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![ClaimRow::new(
            "E2.1",
            "gaussian",
            &params(),
            0.0625,
            4.0,
            4.0,
            2.125,
            Verdict::Pass,
        )];
        let result = ExperimentResult::new("smoke", "hash".into(), rows);
        let files = write_artifacts(&result, dir.path()).unwrap();

        let csv = fs::read_to_string(&files.csv).unwrap();
        assert!(csv.contains("2.125000000000e0,pass"));
        let back: ExperimentResult =
            serde_json::from_str(&fs::read_to_string(&files.json).unwrap()).unwrap();
        assert_eq!(back.corpus_version, result.corpus_version);
        assert_eq!(back.rows.len(), 1);
        assert!(!fs::read_to_string(&files.json).unwrap().contains("written_unix_seconds"));
        assert!(fs::read_to_string(&files.sidecar).unwrap().contains("written_unix_seconds"));
    }
}
