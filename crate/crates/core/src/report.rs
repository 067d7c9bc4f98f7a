//! Machine-readable run reports.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One CLI invocation: what was asked, what came out, and how long it took.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub subcommand: String,
    pub input: Value,
    pub outputs: Value,
    pub wall_time_seconds: f64,
    pub tool_version: String,
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn new(subcommand: &str, input: Value, outputs: Value, wall_time_seconds: f64, seed: Option<u64>) -> Self {
        RunReport {
            subcommand: subcommand.to_owned(),
            input,
            outputs,
            wall_time_seconds,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn report_round_trips() {
        let r = RunReport::new(
            "bounds",
            json!({"N": 3, "k": 2, "p": "1/1"}),
            json!({"max_D": "7", "ratio": 0.1 + 0.2}),
            0.000123456789,
            Some(7),
        );
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }
}
