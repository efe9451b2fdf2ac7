//! Machine-readable verdicts with witnesses.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Malformed,
    Skipped,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

pub type Witness = BTreeMap<String, String>;

/// Build a witness from `(key, value)` pairs.
pub fn witness<K: Into<String>, V: Display>(entries: impl IntoIterator<Item = (K, V)>) -> Witness {
    entries
        .into_iter()
        .map(|(k, v)| (k.into(), v.to_string()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Number of individual instances examined.
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Report>,
}

impl Report {
    pub fn pass(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            verdict: Verdict::Pass,
            witness: None,
            checked: 0,
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn fail(name: impl Into<String>, witness: Witness) -> Self {
        Report {
            verdict: Verdict::Fail,
            witness: Some(witness),
            ..Report::pass(name)
        }
    }

    pub fn malformed(name: impl Into<String>, witness: Witness) -> Self {
        Report {
            verdict: Verdict::Malformed,
            ..Report::fail(name, witness)
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Report {
            verdict: Verdict::Skipped,
            notes: vec![reason.into()],
            ..Report::pass(name)
        }
    }

    /// Aggregate children; the parent fails when any child does not pass.
    pub fn group(name: impl Into<String>, children: Vec<Report>) -> Self {
        let verdict = if children.iter().any(|c| c.verdict == Verdict::Malformed) {
            Verdict::Malformed
        } else if children.iter().all(|c| c.verdict.is_pass()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let checked = children.iter().map(|c| c.checked).sum();
        Report {
            name: name.into(),
            verdict,
            witness: None,
            checked,
            notes: Vec::new(),
            children,
        }
    }

    pub fn with_checked(mut self, checked: usize) -> Self {
        self.checked = checked;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// First failing report in depth-first order, if any.
    pub fn first_failure(&self) -> Option<&Report> {
        if self.passed() {
            return None;
        }
        self.children
            .iter()
            .find_map(Report::first_failure)
            .or(Some(self))
    }

    pub fn find(&self, name: &str) -> Option<&Report> {
        if self.name == name {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(name))
    }
}

/// Accumulates a single law check: counts instances, keeps the first witness.
#[derive(Debug)]
pub struct Check {
    name: String,
    checked: usize,
    failures: usize,
    witness: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            checked: 0,
            failures: 0,
            witness: None,
        }
    }

    /// Record one instance; `witness` is only evaluated on failure.
    pub fn expect(&mut self, ok: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
        ok
    }

    pub fn failed(&self) -> bool {
        self.failures > 0
    }

    pub fn finish(self) -> Report {
        let mut report = match self.witness {
            Some(w) => Report::fail(self.name, w),
            None => Report::pass(self.name),
        };
        report.checked = self.checked;
        if self.failures > 1 {
            report.notes.push(format!("{} failing instances", self.failures));
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_propagates_failure() {
        let mut c = Check::new("law");
        c.expect(true, Witness::new);
        c.expect(false, || witness([("x", 1)]));
        c.expect(false, || witness([("x", 2)]));
        let r = Report::group("all", vec![Report::pass("ok"), c.finish()]);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.checked, 3);
        let f = r.first_failure().unwrap();
        assert_eq!(f.name, "law");
        assert_eq!(f.witness.as_ref().unwrap()["x"], "1");
    }
}
