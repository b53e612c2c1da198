//! Verification reports shared by every suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One checked identity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub index: Vec<i64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    /// Free-form findings that are not pass/fail (e.g. which convention won).
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), ..Default::default() }
    }

    pub fn param(mut self, k: &str, v: impl fmt::Display) -> Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    pub fn record(&mut self, id: &str, index: Vec<i64>, pass: bool, witness: impl FnOnce() -> String) {
        let witness = if pass { None } else { Some(witness()) };
        self.checks.push(Check { id: id.to_string(), index, pass, witness });
    }

    pub fn pass(&mut self, id: &str, index: Vec<i64>) {
        self.record(id, index, true, String::new);
    }

    pub fn fail(&mut self, id: &str, index: Vec<i64>, witness: impl Into<String>) {
        let w = witness.into();
        self.record(id, index, false, || w);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Absorb another report's checks and notes, prefixing its suite name onto the ids.
    pub fn absorb(&mut self, other: Report) {
        let prefix = other.suite.clone();
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            if !prefix.is_empty() {
                c.id = format!("{prefix}/{}", c.id);
            }
            c
        }));
        self.notes.extend(other.notes);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    /// A report with no checks at all does not count as a pass.
    pub fn is_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// Sort checks by id then index, for byte-stable output.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.index.cmp(&b.index)));
    }

    /// Per-identity counts `(passed, failed)`.
    pub fn tally(&self) -> BTreeMap<String, (usize, usize)> {
        let mut t: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for c in &self.checks {
            let e = t.entry(c.id.clone()).or_default();
            if c.pass {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        t
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(f, "suite {} [{}]", self.suite, params.join(" "))?;
        for (id, (ok, bad)) in self.tally() {
            let status = if bad == 0 { "ok" } else { "FAIL" };
            writeln!(f, "  {status:4} {id}: {ok} passed, {bad} failed")?;
        }
        for c in self.failures().take(20) {
            writeln!(
                f,
                "  failure {} {:?}: {}",
                c.id,
                c.index,
                c.witness.as_deref().unwrap_or("")
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        let verdict = if self.is_pass() { "PASS" } else { "FAIL" };
        write!(f, "  result: {verdict} ({} checks, {} failed)", self.checks.len(), self.failure_count())
    }
}
