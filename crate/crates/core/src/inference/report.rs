use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pass,
    Reject,
}

/// Outcome of one test. Serializes to
/// `{test, statistic, p_value, alpha, decision, n, seed, diagnostics}`.
///
/// `p_value` is `null` for exact verdicts; `diagnostics.exact_verdict` is then `true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub decision: Decision,
    pub n: usize,
    pub seed: Option<u64>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl TestReport {
    /// A statistical verdict: reject iff `p_value < alpha`.
    pub fn from_p_value(test: &str, statistic: f64, p_value: f64, alpha: f64, n: usize) -> Self {
        TestReport {
            test: test.to_string(),
            statistic,
            p_value: Some(p_value),
            alpha,
            decision: if p_value < alpha {
                Decision::Reject
            } else {
                Decision::Pass
            },
            n,
            seed: None,
            diagnostics: BTreeMap::new(),
        }
    }

    /// An exact verdict: reject iff a refutation was found.
    pub fn exact(test: &str, statistic: f64, refuted: bool, alpha: f64, n: usize) -> Self {
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("exact_verdict".to_string(), Value::Bool(true));
        TestReport {
            test: test.to_string(),
            statistic,
            p_value: None,
            alpha,
            decision: if refuted {
                Decision::Reject
            } else {
                Decision::Pass
            },
            n,
            seed: None,
            diagnostics,
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.decision == Decision::Pass
    }

    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }
}
