use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use pptmerge::classify::{ClassifyConfig, CriterionResult};
use pptmerge::{ClassificationReport, Verdict};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// A classification report as written by `classify --json`.
///
/// Only `timestamp` depends on when the report was made.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile {
    pub format_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub input_sha256: String,
    pub seed: u64,
    pub config: ClassifyConfig,
    pub verdict: Verdict,
    pub consistency: bool,
    pub criteria: Vec<CriterionResult>,
    pub witnesses: BTreeMap<String, f64>,
    pub fidelity_lower_bound: f64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ReportFile {
    pub fn new(input: &str, bytes: &[u8], seed: u64, config: ClassifyConfig, report: ClassificationReport) -> Self {
        ReportFile {
            format_version: REPORT_FORMAT_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            input: input.to_string(),
            input_sha256: sha256_hex(bytes),
            seed,
            config,
            verdict: report.verdict,
            consistency: report.consistency,
            criteria: report.criteria,
            witnesses: report.witnesses,
            fidelity_lower_bound: report.fidelity_lower_bound,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
