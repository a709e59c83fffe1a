use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Inconclusive,
}

/// A decision with the evidence that produced it.
///
/// `anchor` is a stable dotted tag naming the statement being tested, so that
/// reports can be cross-referenced.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub anchor: String,
    pub summary: String,
    pub evidence: Value,
}

impl Verdict {
    pub fn new(decision: Decision, anchor: &str, summary: impl Into<String>, evidence: Value) -> Self {
        Self {
            decision,
            anchor: anchor.to_string(),
            summary: summary.into(),
            evidence,
        }
    }

    pub fn yes(anchor: &str, summary: impl Into<String>, evidence: Value) -> Self {
        Self::new(Decision::Yes, anchor, summary, evidence)
    }

    pub fn no(anchor: &str, summary: impl Into<String>, evidence: Value) -> Self {
        Self::new(Decision::No, anchor, summary, evidence)
    }

    pub fn inconclusive(anchor: &str, summary: impl Into<String>, evidence: Value) -> Self {
        Self::new(Decision::Inconclusive, anchor, summary, evidence)
    }

    pub fn passed(&self) -> bool {
        self.decision == Decision::Yes
    }
}
