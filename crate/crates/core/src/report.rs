//! Verdicts of verification runs: one JSON object per line plus an optional
//! summary table. Output is deterministic unless runtimes are requested.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub statement: String,
    pub status: Status,
    pub instance: String,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Serializes anything serializable for a verdict field.
pub fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    /// One verdict per line. Runtimes are dropped unless `timings` is set.
    pub fn json_lines(&self, timings: bool) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let mut v = v.clone();
            if !timings {
                v.runtime_ms = None;
            }
            out.push_str(&serde_json::to_string(&v).expect("verdicts serialize"));
            out.push('\n');
        }
        out
    }

    pub fn summary_table(&self, timings: bool) -> String {
        let width = self
            .verdicts
            .iter()
            .map(|v| v.claim.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  STATUS  INSTANCE", "CLAIM");
        for v in &self.verdicts {
            let _ = write!(
                out,
                "{:<width$}  {:<6}  {}",
                v.claim,
                v.status.as_str(),
                v.instance
            );
            if let (true, Some(ms)) = (timings, v.runtime_ms) {
                let _ = write!(out, "  ({ms} ms)");
            }
            out.push('\n');
        }
        let passed = self.verdicts.iter().filter(|v| v.passed()).count();
        let _ = writeln!(out, "{passed}/{} passed", self.verdicts.len());
        out
    }

    /// Reads verdicts back from JSON lines, skipping blank lines.
    pub fn parse_json_lines(text: &str) -> serde_json::Result<Report> {
        let verdicts = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<serde_json::Result<_>>()?;
        Ok(Report { verdicts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(claim: &str, ok: bool) -> Verdict {
        Verdict {
            claim: claim.into(),
            statement: "s".into(),
            status: Status::from_bool(ok),
            instance: "i".into(),
            detail: Value::Null,
            witness: None,
            runtime_ms: Some(12),
        }
    }

    #[test]
    fn lines_are_deterministic_without_timings() {
        let r = Report {
            verdicts: vec![verdict("a", true), verdict("b", false)],
        };
        let text = r.json_lines(false);
        assert!(!text.contains("runtime_ms"));
        assert!(r.json_lines(true).contains("\"runtime_ms\":12"));
        let back = Report::parse_json_lines(&text).unwrap();
        assert_eq!(back.verdicts.len(), 2);
        assert_eq!(back.verdicts[1].status, Status::Fail);
        assert_eq!(back.json_lines(false), text);
        assert!(!r.all_pass());
        assert!(r.summary_table(false).ends_with("1/2 passed\n"));
    }
}
