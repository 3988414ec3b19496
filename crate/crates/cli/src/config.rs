//! TOML run configuration. One optional table per subcommand; missing
//! tables and keys take the documented defaults, unknown keys are errors.

use std::path::Path;

use plancherel_core::pipeline::{
    CovarianceConfig, ExactCheckConfig, SampleSuiteConfig, VerifyScenario, WignerSuiteConfig,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub exact_check: ExactCheckConfig,
    pub sample: SampleSuiteConfig,
    pub covariance: CovarianceConfig,
    pub wigner: WignerSuiteConfig,
    pub verify: VerifyScenario,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<FileConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
