//! Law-check reports: line-oriented text plus a machine-readable summary.
//!
//! Failures are data, not errors. Every checker accumulates per-law counts
//! and keeps the first counterexample it saw, so reports stay byte-stable
//! for a fixed configuration and seed.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The instance held, decided exactly.
    Pass,
    /// The instance held on the probe set; a larger probe set could
    /// still refute it.
    PassSampled,
    Fail(String),
    /// Fuel ran out while deciding the instance; neither pass nor fail.
    Indeterminate(String),
}

#[derive(Clone, Debug)]
pub struct LawItem {
    pub law: String,
    pub pass: u64,
    /// How many of the passes were probe-sampled rather than exact.
    pub sampled: u64,
    pub fail: u64,
    pub indeterminate: u64,
    pub first_failure: Option<String>,
    pub first_indeterminate: Option<String>,
}

impl LawItem {
    pub fn new(law: impl Into<String>) -> Self {
        LawItem {
            law: law.into(),
            pass: 0,
            sampled: 0,
            fail: 0,
            indeterminate: 0,
            first_failure: None,
            first_indeterminate: None,
        }
    }

    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Pass => self.pass += 1,
            Outcome::PassSampled => {
                self.pass += 1;
                self.sampled += 1;
            }
            Outcome::Fail(w) => {
                if self.first_failure.is_none() {
                    self.first_failure = Some(w);
                }
                self.fail += 1;
            }
            Outcome::Indeterminate(w) => {
                if self.first_indeterminate.is_none() {
                    self.first_indeterminate = Some(w);
                }
                self.indeterminate += 1;
            }
        }
    }

    pub fn record_bool(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.record(Outcome::Pass);
        } else {
            self.record(Outcome::Fail(witness()));
        }
    }

    pub fn ok(&self) -> bool {
        self.fail == 0
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub suite: String,
    pub items: Vec<LawItem>,
}

impl LawReport {
    pub fn new(suite: impl Into<String>) -> Self {
        LawReport {
            suite: suite.into(),
            items: Vec::new(),
        }
    }

    pub fn item(&mut self, law: impl Into<String>) -> &mut LawItem {
        self.items.push(LawItem::new(law));
        self.items.last_mut().expect("just pushed")
    }

    pub fn push(&mut self, item: LawItem) {
        self.items.push(item);
    }

    pub fn merge(&mut self, other: LawReport) {
        self.items.extend(other.items);
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(LawItem::ok)
    }

    pub fn total_indeterminate(&self) -> u64 {
        self.items.iter().map(|i| i.indeterminate).sum()
    }

    /// One JSON object per line; flat fields only.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(&format!(
                "{{\"suite\":{},\"law\":{},\"pass\":{},\"sampled\":{},\"fail\":{},\"indeterminate\":{}",
                json_str(&self.suite),
                json_str(&item.law),
                item.pass,
                item.sampled,
                item.fail,
                item.indeterminate
            ));
            if let Some(w) = &item.first_failure {
                out.push_str(&format!(",\"first_failure\":{}", json_str(w)));
            }
            out.push_str("}\n");
        }
        out
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            write!(
                f,
                "{}: {}  pass={} sampled={} fail={} indet={}",
                if item.ok() { "ok  " } else { "FAIL" },
                item.law,
                item.pass,
                item.sampled,
                item.fail,
                item.indeterminate
            )?;
            if let Some(w) = &item.first_failure {
                write!(f, "  first: {w}")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "suite {}: {}",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
