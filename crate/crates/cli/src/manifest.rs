//! Run manifest: parameters, per-check outcomes and emitted files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use plancherel_core::pipeline::{CheckOutcome, SuiteOutput};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

/// A check as persisted. Non-finite numbers are stored as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub target: Option<f64>,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl From<&CheckOutcome> for CheckRecord {
    fn from(c: &CheckOutcome) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            name: c.name.clone(),
            target: finite(c.target),
            value: finite(c.value),
            tolerance: finite(c.tolerance),
            pass: c.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    /// SHA-256 of the subcommand and its effective parameters.
    pub config_hash: String,
    pub seed: Option<u64>,
    /// How Monte Carlo statistics were centered, for suites that sample.
    pub centering: Option<String>,
    pub threads: usize,
    pub timestamp: String,
    /// Effective parameters, defaults included.
    pub parameters: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    /// Emitted files, relative to the manifest's directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
}

pub fn config_hash(subcommand: &str, parameters: &serde_json::Value) -> String {
    let canonical = serde_json::json!({ "subcommand": subcommand, "parameters": parameters });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, seed: Option<u64>, output: &SuiteOutput) -> Self {
        let centering = match subcommand {
            "sample" | "verify" | "wigner" => Some("empirical batch mean".to_owned()),
            _ => None,
        };
        let mut artifacts: Vec<String> = output.artifacts.iter().map(|a| a.file_name.clone()).collect();
        artifacts.sort();
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            config_hash: config_hash(subcommand, &parameters),
            seed,
            centering,
            threads: rayon::current_num_threads(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            parameters,
            checks: output.checks.iter().map(CheckRecord::from).collect(),
            artifacts,
            passed: output.passed(),
        }
    }

    pub fn read(path: &Path) -> Result<(Self, PathBuf), String> {
        let file = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
        let m = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?;
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((m, dir))
    }
}

/// Writes artifacts in name order, then the manifest.
pub fn write_run(dir: &Path, manifest: &RunManifest, output: &SuiteOutput) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let mut artifacts: Vec<_> = output.artifacts.iter().collect();
    artifacts.sort_by(|a, b| a.file_name.cmp(&b.file_name));
    for a in artifacts {
        let path = dir.join(&a.file_name);
        std::fs::write(&path, &a.contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), |v| format!("{v:.6e}"))
}

pub fn render_text(m: &RunManifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "subcommand  {}", m.subcommand);
    let _ = writeln!(out, "version     {}", m.tool_version);
    let _ = writeln!(out, "timestamp   {}", m.timestamp);
    let _ = writeln!(out, "config_hash {}", m.config_hash);
    let _ = writeln!(
        out,
        "seed        {}",
        m.seed.map_or_else(|| "none".into(), |s| s.to_string())
    );
    if let Some(c) = &m.centering {
        let _ = writeln!(out, "centering   {c}");
    }
    let _ = writeln!(out, "threads     {}", m.threads);
    let _ = writeln!(out);
    let width = m.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &m.checks {
        let _ = writeln!(
            out,
            "{}  {:width$}  value {}  target {}  tol {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            num(c.value),
            num(c.target),
            num(c.tolerance),
        );
    }
    let passed = m.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(out, "\n{passed}/{} checks passed", m.checks.len());
    for a in &m.artifacts {
        let _ = writeln!(out, "artifact {a}");
    }
    out
}

pub fn render_csv(m: &RunManifest) -> String {
    let cell = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    let mut out = String::from("name,target,value,tolerance,pass\n");
    for c in &m.checks {
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{}",
            c.name.replace('"', "\"\""),
            cell(c.target),
            cell(c.value),
            cell(c.tolerance),
            c.pass
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn output() -> SuiteOutput {
        SuiteOutput {
            checks: vec![
                CheckOutcome::within("a", 1.0, 1.0, 0.0),
                CheckOutcome::within("b", f64::NAN, 2.0, 1.0),
            ],
            artifacts: Vec::new(),
        }
    }

    #[test]
    fn hash_depends_on_parameters_only() {
        let p = serde_json::json!({ "x": 1 });
        assert_eq!(config_hash("verify", &p), config_hash("verify", &p));
        assert_ne!(config_hash("verify", &p), config_hash("sample", &p));
        assert_ne!(config_hash("verify", &p), config_hash("verify", &serde_json::json!({ "x": 2 })));
        assert_eq!(config_hash("verify", &p).len(), 64);
    }

    #[test]
    fn manifest_round_trips_with_nan() {
        let m = RunManifest::new("wigner", serde_json::json!({}), Some(3), &output());
        assert!(!m.passed);
        assert!(m.centering.is_some());
        assert!(RunManifest::new("covariance", serde_json::json!({}), None, &output()).centering.is_none());
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.checks[1].target, None);
        assert!(render_text(&m).contains("1/2 checks passed"));
        assert_eq!(render_csv(&m).lines().count(), 3);
    }
}
