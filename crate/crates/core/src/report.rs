use std::fmt::Write as _;

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Result of a single identity check: pass iff `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckReport {
    pub fn measured(name: impl Into<String>, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        // NaN never passes.
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, residual: Some(residual), tolerance, detail: detail.into() }
    }

    pub fn error(name: impl Into<String>, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Error, residual: None, tolerance, detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn residual_or_nan(&self) -> f64 {
        self.residual.unwrap_or(f64::NAN)
    }

    /// One JSON object with fixed key order and 17 significant digits.
    pub fn to_json_line(&self) -> String {
        let mut s = String::from("{");
        let _ = write!(s, "\"name\":{}", json_str(&self.name));
        let _ = write!(s, ",\"status\":\"{}\"", self.status.as_str());
        match self.residual {
            Some(r) => {
                let _ = write!(s, ",\"residual\":{}", fmt_g17(r));
            }
            None => s.push_str(",\"residual\":null"),
        }
        let _ = write!(s, ",\"tolerance\":{}", fmt_g17(self.tolerance));
        let _ = write!(s, ",\"detail\":{}", json_str(&self.detail));
        s.push('}');
        s
    }

    pub fn to_text_line(&self) -> String {
        let residual = match self.residual {
            Some(r) => format!("{r:.3e}"),
            None => "-".to_string(),
        };
        format!(
            "[{:<5}] {:<44} residual={:<10} tol={:.1e}  {}",
            self.status.as_str().to_uppercase(),
            self.name,
            residual,
            self.tolerance,
            self.detail
        )
    }
}

/// Formats a float with 17 significant digits as a JSON-compatible number.
pub fn fmt_g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no representation for these.
        "null".to_string()
    }
}

pub(crate) fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}
