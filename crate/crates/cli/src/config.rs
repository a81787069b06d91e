//! Optional JSON config file supplying defaults; flags always win.

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub trunc: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub theta_c: Option<f64>,
    pub h: Option<Vec<f64>>,
    pub p: Option<f64>,
    #[serde(rename = "Bp")]
    pub b_p: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
        }
    }
}
