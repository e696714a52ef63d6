//! Run configuration: flags, optional JSON config file, and the merged record
//! echoed into every report.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CocycleChoice {
    Gns,
    Free,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
pub enum Format {
    #[default]
    #[value(name = "json")]
    #[serde(rename = "json")]
    Json,
    #[value(name = "json+csv")]
    #[serde(rename = "json+csv")]
    JsonCsv,
}

/// Every option a command may read. Commands ignore what they do not use.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Group: cyclic:N, free:K,R or a group JSON file.
    #[arg(long)]
    pub group: Option<String>,
    /// Length: word, word:1,3, csv:(0,1,..) or a CSV file.
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, value_enum)]
    pub cocycle: Option<CocycleChoice>,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Fractional order for fractional-kn.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the grid box.
    #[arg(long = "box")]
    pub half_width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub jmin: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub jmax: Option<i32>,
    /// Builtin symbol name, or a CSV grid dump.
    #[arg(long)]
    pub symbol: Option<String>,
    /// Algebra element CSV (element,re,im); random when absent.
    #[arg(long)]
    pub element: Option<PathBuf>,
    /// Branch spec JSON.
    #[arg(long)]
    pub branches: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    /// Fields set in `file` replace the flag values.
    pub fn overlay(&self, file: &serde_json::Value) -> Result<RunConfig, String> {
        let Some(obj) = file.as_object() else {
            return Err("config file must hold a JSON object".into());
        };
        let mut base = serde_json::to_value(self).map_err(|e| e.to_string())?;
        let map = base.as_object_mut().expect("struct serializes to an object");
        for (k, v) in obj {
            if !map.contains_key(k) {
                return Err(format!("unknown config field {k:?}"));
            }
            map.insert(k.clone(), v.clone());
        }
        serde_json::from_value(base).map_err(|e| e.to_string())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn ps_or(&self, default: &[f64]) -> Vec<f64> {
        if self.p.is_empty() {
            default.to_vec()
        } else {
            self.p.clone()
        }
    }

    pub fn require<'a, T>(&self, v: &'a Option<T>, flag: &str) -> Result<&'a T, String> {
        v.as_ref().ok_or_else(|| format!("missing --{flag}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_flags() {
        let flags = RunConfig { group: Some("cyclic:4".into()), seed: Some(3), ..Default::default() };
        let merged = flags.overlay(&serde_json::json!({"seed": 9, "p": [2.0, 4.0]})).unwrap();
        assert_eq!(merged.group.as_deref(), Some("cyclic:4"));
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.p, vec![2.0, 4.0]);
        assert!(flags.overlay(&serde_json::json!({"sede": 1})).is_err());
        assert!(flags.overlay(&serde_json::json!([1])).is_err());
    }

    #[test]
    fn format_names() {
        let f: Format = serde_json::from_str("\"json+csv\"").unwrap();
        assert_eq!(f, Format::JsonCsv);
    }
}
