use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Number, Value};

pub const SCHEMA: &str = "gtmm/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violated,
    BudgetExceeded,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::Error => 2,
            Status::BudgetExceeded => 3,
        }
    }
}

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub budget: u64,
    /// SHA-256 of every file read.
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    pub exit_code: i32,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: Timing,
}

#[derive(Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn twelve_digits() {
        let v = round_floats(json!({"a": [2.908_796_123_456_789_f64, 3], "b": 1.0}));
        assert_eq!(v["a"][0], json!(2.90879612346));
        assert_eq!(v["a"][1], json!(3));
        assert_eq!(v["b"], json!(1.0));
    }
}
