use std::fmt;

use serde::{Deserialize, Serialize};

/// How an engine result relates to a printed claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Confirmed,
    Stronger,
    Discrepancy,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Confirmed => "confirmed",
            Status::Stronger => "stronger",
            Status::Discrepancy => "discrepancy",
        })
    }
}

/// One audited claim: where it is printed, what it says, what the engine got.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub location: String,
    pub paper_claim: String,
    pub engine_result: String,
    pub status: Status,
}

impl AuditEntry {
    pub fn new(
        location: impl Into<String>,
        paper_claim: impl Into<String>,
        engine_result: impl Into<String>,
        status: Status,
    ) -> Self {
        AuditEntry {
            location: location.into(),
            paper_claim: paper_claim.into(),
            engine_result: engine_result.into(),
            status,
        }
    }
}
