use serde::{Deserialize, Serialize};

/// Outcome of one identity check on the buffered interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub label: String,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub buffer_cav: usize,
    pub buffer_mech: usize,
    pub passed: bool,
    /// Informational checks are reported but do not gate a suite.
    #[serde(default)]
    pub informational: bool,
    #[serde(default)]
    pub notes: String,
}

impl DeviationReport {
    pub fn new(label: impl Into<String>, max_abs_deviation: f64, tolerance: f64) -> Self {
        DeviationReport {
            label: label.into(),
            max_abs_deviation,
            tolerance,
            buffer_cav: 0,
            buffer_mech: 0,
            // NaN deviations never pass.
            passed: max_abs_deviation < tolerance,
            informational: false,
            notes: String::new(),
        }
    }

    pub fn with_buffers(mut self, cav: usize, mech: usize) -> Self {
        self.buffer_cav = cav;
        self.buffer_mech = mech;
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// A suite passes iff every gating report passes.
pub fn all_passed(reports: &[DeviationReport]) -> bool {
    reports.iter().filter(|r| !r.informational).all(|r| r.passed)
}
