//! Verification reports and their JSON / CSV encodings.

use serde::Serialize;

use crate::config::RunConfig;

/// One verdict. Non-finite values serialize as `null` and never pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Expected value, error text or other context.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `|value| ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value.abs() <= tolerance,
            detail: None,
        }
    }

    /// `value ≥ −tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value >= -tolerance,
            detail: None,
        }
    }

    /// `|value − expected| ≤ tolerance`; `value` is the measured quantity.
    pub fn near(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
            detail: Some(format!("expected {expected}")),
        }
    }

    /// A boolean condition, recorded as 1 (holds) or 0.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            tolerance: 0.0,
            pass: holds,
            detail: None,
        }
    }

    /// A check whose computation itself failed.
    pub fn failed(name: impl Into<String>, tolerance: f64, error: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            tolerance,
            pass: false,
            detail: Some(error.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let d = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(old) => format!("{old}; {d}"),
            None => d,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<Check>, elapsed_ms: u64) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self {
            config,
            checks,
            pass,
            elapsed_ms,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Names of the failing checks, in record order.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only serializable data");
        s.push('\n');
        s
    }

    /// One row per check: `name,value,tolerance,pass`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["name", "value", "tolerance", "pass"]);
        for c in &self.checks {
            let value = if c.value.is_finite() { c.value.to_string() } else { String::new() };
            let _ = w.write_record([c.name.clone(), value, c.tolerance.to_string(), c.pass.to_string()]);
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Campaign, Overrides};

    fn config() -> RunConfig {
        RunConfig::resolve(Campaign::Pizzetti, &Overrides::new()).unwrap()
    }

    #[test]
    fn verdicts() {
        assert!(Check::at_most("a", -1e-9, 1e-8).pass);
        assert!(!Check::at_most("a", f64::NAN, 1e-8).pass);
        assert!(Check::at_least("b", -1e-9, 1e-8).pass);
        assert!(!Check::at_least("b", -1e-7, 1e-8).pass);
        assert!(Check::near("c", 2.0 + 1e-7, 2.0, 1e-6).pass);
        assert!(!Check::flag("d", false).pass);
    }

    #[test]
    fn overall_pass_needs_every_check() {
        let r = Report::new(config(), vec![Check::flag("x", true), Check::flag("y", false)], 0);
        assert!(!r.pass);
        assert_eq!(r.failures(), vec!["y"]);
        assert!(Report::new(config(), vec![Check::flag("x", true)], 0).pass);
        assert!(!Report::new(config(), vec![], 0).pass);
    }

    #[test]
    fn json_schema_field_names() {
        let r = Report::new(config(), vec![Check::failed("broken", 1.0, "no convergence")], 0);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["config", "checks", "pass", "elapsed_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let c = &v["checks"][0];
        assert!(c["value"].is_null());
        assert_eq!(c["name"], "broken");
        assert_eq!(c["pass"], false);
        assert_eq!(v["config"]["campaign"], "pizzetti");
    }

    #[test]
    fn csv_rows() {
        let r = Report::new(config(), vec![Check::at_most("gap,max", 0.5, 1.0), Check::failed("f", 2.0, "e")], 0);
        assert_eq!(r.to_csv(), "name,value,tolerance,pass\n\"gap,max\",0.5,1,true\nf,,2,false\n");
    }
}
