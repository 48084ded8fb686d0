//! Machine-readable solve records (one JSON object per line).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub solver: String,
    pub frequency_hz: f64,
    /// Total RWG count of the scene.
    pub n_total: usize,
    /// Dimension of the factored linear system (0 for the analytic reference).
    pub system_dimension: usize,
    pub fill_s: f64,
    pub solve_s: f64,
    pub total_s: f64,
    pub peak_matrix_bytes: u64,
    pub solve_resident_bytes: u64,
    pub system_bytes: u64,
    pub condition_system: f64,
    pub condition_blocks: Vec<f64>,
    /// Pattern CSV files written for this solve.
    pub outputs: Vec<String>,
    /// Present when the solve failed; partial sweeps keep earlier records.
    pub error: Option<String>,
}

pub fn to_jsonl(records: &[SolveRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<SolveRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
