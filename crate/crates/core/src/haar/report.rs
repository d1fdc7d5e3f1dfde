use serde::{Deserialize, Serialize};

/// One sub-test of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofComponent {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bin_id: usize,
    pub expected: f64,
    pub observed: f64,
}

/// Outcome of a statistical check. `pass` holds iff every component passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub suite: String,
    pub statistic_name: String,
    pub statistic: f64,
    pub sample_count: usize,
    pub bin_spec: String,
    pub p_value: Option<f64>,
    pub sigma_deviation: Option<f64>,
    pub components: Vec<GofComponent>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histogram: Vec<HistogramRow>,
}

impl GofReport {
    pub(crate) fn new(suite: &str, statistic_name: &str, sample_count: usize, bin_spec: String) -> Self {
        Self {
            suite: suite.into(),
            statistic_name: statistic_name.into(),
            statistic: f64::NAN,
            sample_count,
            bin_spec,
            p_value: None,
            sigma_deviation: None,
            components: Vec::new(),
            pass: false,
            histogram: Vec::new(),
        }
    }

    /// Records `|value| ≤ threshold`.
    pub(crate) fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.components.push(GofComponent {
            name: name.into(),
            value,
            threshold,
            pass: value.abs() <= threshold,
        });
        self.pass = self.components.iter().all(|c| c.pass);
    }

    pub fn is_consistent(&self) -> bool {
        self.components.iter().all(|c| c.pass == (c.value.abs() <= c.threshold))
            && self.pass == (!self.components.is_empty() && self.components.iter().all(|c| c.pass))
    }
}
