use serde::Serialize;
use serde_json::Value;

/// Uniform JSON report emitted by every check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub structure: String,
    pub instance: String,
    pub verdict: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub timing_ms: u64,
    pub seed: u64,
}

impl Report {
    pub fn new(check: &str, structure: &str, instance: impl Into<String>, verdict: impl Into<Value>) -> Self {
        Report {
            check: check.to_string(),
            structure: structure.to_string(),
            instance: instance.into(),
            verdict: verdict.into(),
            witness: None,
            components: None,
            params: None,
            steps: None,
            timing_ms: 0,
            seed: 0,
        }
    }

    /// Boolean verdicts map to `true`/`false`; string verdicts are true
    /// unless they name a failure.
    pub fn verdict_is_true(&self) -> bool {
        match &self.verdict {
            Value::Bool(b) => *b,
            Value::String(s) => !matches!(s.as_str(), "false" | "gap" | "not_a_cut" | "exhaustion_insufficient" | "audit_failed"),
            _ => false,
        }
    }

    /// Short verdict text used by corpus headers and text output.
    pub fn verdict_text(&self) -> String {
        match &self.verdict {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} [{}] {}: {}", self.check, self.structure, self.instance, self.verdict_text());
        if let Some(w) = &self.witness {
            out.push_str(&format!("\n  witness: {w}"));
        }
        if let Some(c) = &self.components {
            out.push_str(&format!("\n  components: {}", c.join(" u ")));
        }
        if let Some(p) = &self.params {
            out.push_str(&format!("\n  params: [{}]", p.join(", ")));
        }
        if let Some(s) = self.steps {
            out.push_str(&format!("\n  steps: {s}"));
        }
        out
    }
}
