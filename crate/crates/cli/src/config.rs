//! Declarative harness configuration. Every field has a default so a
//! config file only needs to state what it changes.

use serde::{Deserialize, Serialize};
use transit_core::types::Time;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Network directory (tables `stops`, `trips`, `transfers`).
    pub network: String,
    /// Delay limits (seconds) to build or load shortcuts for.
    pub delay_limits: Vec<Time>,
    /// Simulation window in seconds from midnight.
    pub window_start: Time,
    pub window_end: Time,
    /// Number of random queries (or affected queries when mining).
    pub query_count: usize,
    pub seed: u64,
    /// basic | advanced | none
    pub update_mode: String,
    /// Mine queries affected by the delay stream instead of uniform ones.
    pub affected_only: bool,
    /// fixed:<seconds> or measured[:<scale>]
    pub phase_cost: String,
    pub report_path: String,
    pub json_path: String,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            network: "network".to_string(),
            delay_limits: vec![300],
            window_start: 12 * 3600,
            window_end: 13 * 3600,
            query_count: 1000,
            seed: 1,
            update_mode: "advanced".to_string(),
            affected_only: false,
            phase_cost: "measured:1.0".to_string(),
            report_path: "report.txt".to_string(),
            json_path: "report.json".to_string(),
        }
    }
}

impl HarnessConfig {
    pub fn from_file(path: &str) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }
}
